"""Group and Lie-algebra primitives of the 3-dimensional Heisenberg group.

Points are written in the global chart ``(x, y, z)`` with product

    (x, y, z) . (w, s, t) = (x + w + y t, y + s, z + t)

and the Lie algebra is R^3 with ``[(x,y,z), (a,b,c)] = (0, 0, y a - b x)``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class GroupElement(NamedTuple):
    x: float
    y: float
    z: float


class AlgebraElement(NamedTuple):
    x: float
    y: float
    z: float


IDENTITY = GroupElement(0.0, 0.0, 0.0)


def mul(g, h) -> GroupElement:
    gx, gy, gz = g
    hx, hy, hz = h
    return GroupElement(gx + hx + gy * hz, gy + hy, gz + hz)


def inverse(g) -> GroupElement:
    x, y, z = g
    return GroupElement(y * z - x, -y, -z)


def bracket(u, v) -> AlgebraElement:
    ux, uy, _ = u
    vx, vy, _ = v
    return AlgebraElement(0.0, 0.0, uy * vx - vy * ux)


def to_matrix(g) -> np.ndarray:
    """Upper unitriangular matrix of ``g``; debug helper only.

    ``to_matrix(mul(g, h)) == to_matrix(g) @ to_matrix(h)``.
    """
    x, y, z = g
    return np.array([[1.0, y, x], [0.0, 1.0, z], [0.0, 0.0, 1.0]])


def is_close(g, h, tol: float = 1e-12) -> bool:
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    scale = max(1.0, float(np.max(np.abs(g))), float(np.max(np.abs(h))))
    return bool(np.max(np.abs(g - h)) <= tol * scale)
