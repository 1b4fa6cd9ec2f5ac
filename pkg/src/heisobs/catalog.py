"""Closed simply connected subgroups H1..H9 and homomorphisms onto them.

Every homomorphism from the Heisenberg group onto one of these subgroups is
linear in the chart coordinates and ignores ``x``; it is stored as a 3x3
matrix mapping ``(x, y, z)`` to the coordinates of the image point. Kernels
are therefore linear subspaces and always contain the ``x`` axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .group import GroupElement, mul
from .linalg import Subspace

TAGS = ("H1", "H2", "H3", "H4", "H5", "H6", "H7", "H8", "H9")
SUBGROUP_TOL = 1e-9
HOM_TOL = 1e-12

# image directions of the single-functional families: h(g) = s(g) * direction
_LINE_DIRECTIONS = {
    "H3": (0.0, 1.0, 0.0),
    "H4": (0.0, 0.0, 1.0),
    "H5": (1.0, 0.0, 0.0),
    "H6": (1.0, 1.0, 0.0),
    "H7": (1.0, 0.0, 1.0),
}


class HomomorphismError(ValueError):
    pass


@dataclass(frozen=True)
class SubgroupId:
    tag: str
    a_hat: float | None = None
    b_hat: float | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown subgroup {self.tag!r}")
        if self.tag in ("H8", "H9"):
            if self.a_hat is None or self.b_hat is None:
                raise ValueError(f"{self.tag} needs a_hat and b_hat")
            if float(self.a_hat) * float(self.b_hat) == 0.0:
                raise ValueError(f"{self.tag} needs a_hat * b_hat != 0")
            object.__setattr__(self, "a_hat", float(self.a_hat))
            object.__setattr__(self, "b_hat", float(self.b_hat))
        elif self.a_hat is not None or self.b_hat is not None:
            raise ValueError(f"{self.tag} takes no a_hat/b_hat")

    def __str__(self) -> str:
        if self.tag in ("H8", "H9"):
            return f"{self.tag}({self.a_hat:g},{self.b_hat:g})"
        return self.tag


def subgroup_contains(sid: SubgroupId, g, tol: float = SUBGROUP_TOL) -> bool:
    x, y, z = (float(v) for v in g)
    scale = tol * max(1.0, abs(x), abs(y), abs(z))

    def zero(v):
        return abs(v) <= scale

    tag = sid.tag
    if tag == "H1":
        return zero(z)
    if tag == "H2":
        return zero(y)
    if tag == "H3":
        return zero(x) and zero(z)
    if tag == "H4":
        return zero(x) and zero(y)
    if tag == "H5":
        return zero(y) and zero(z)
    if tag == "H6":
        return zero(x - y) and zero(z)
    if tag == "H7":
        return zero(x - z) and zero(y)
    # H8 = {(a t, b t, 0)}, H9 = {(a s, 0, b s)}
    second = y if tag == "H8" else z
    other = z if tag == "H8" else y
    return zero(other) and zero(sid.b_hat * x - sid.a_hat * second)


@dataclass(frozen=True, eq=False)
class Homomorphism:
    """A map ``g -> matrix @ g`` into ``target``.

    ``coeffs`` keeps the family parameters as given: ``(beta1, gamma1,
    beta2, gamma2)`` for H1/H2 and ``(beta, gamma)`` (named ``alpha, beta``
    for H8/H9) otherwise. Instances built directly are not validated; use
    :func:`build_homomorphism` or :func:`homomorphism_from_matrix`.
    """

    target: SubgroupId
    matrix: np.ndarray
    coeffs: tuple[float, ...] = field(default=())

    def __call__(self, g) -> GroupElement:
        return GroupElement(*(float(v) for v in self.matrix @ np.asarray(g, dtype=float)))

    @property
    def rows(self) -> np.ndarray:
        """Nonzero rows of the output map."""
        keep = np.any(self.matrix != 0.0, axis=1)
        return self.matrix[keep]

    @property
    def output_map(self) -> np.ndarray:
        """The output map ``C``; the zero row when ``h`` is trivial."""
        rows = self.rows
        return rows if rows.shape[0] else np.zeros((1, 3))

    @property
    def is_trivial(self) -> bool:
        return not np.any(self.matrix)

    def coefficient_matrix(self) -> np.ndarray:
        """``B = [[beta1, gamma1], [beta2, gamma2]]`` acting on ``(y, z)``.

        Single-functional families give a rank <= 1 matrix whose first row is
        the functional.
        """
        tag = self.target.tag
        if tag in ("H1", "H2") and len(self.coeffs) == 4:
            b1, g1, b2, g2 = self.coeffs
            return np.array([[b1, g1], [b2, g2]], dtype=float)
        if len(self.coeffs) == 2:
            beta, gamma = self.coeffs
            if tag in ("H8", "H9"):
                a_hat, b_hat = self.target.a_hat, self.target.b_hat
                return np.array([[beta * a_hat, gamma * a_hat], [beta * b_hat, gamma * b_hat]])
            return np.array([[beta, gamma], [0.0, 0.0]], dtype=float)
        rows = self.rows[:, 1:]
        out = np.zeros((2, 2))
        out[: min(2, rows.shape[0])] = rows[:2]
        return out

    def describe(self) -> str:
        names = ("x", "y", "z")
        comps = []
        for row in self.matrix:
            terms = [f"{v:g}{n}" for v, n in zip(row, names) if v != 0.0]
            comps.append(" + ".join(terms) if terms else "0")
        return f"h(x,y,z) = ({', '.join(comps)}) onto {self.target}"


def _family_matrix(target: SubgroupId, coeffs) -> np.ndarray:
    tag = target.tag
    M = np.zeros((3, 3))
    if tag in ("H1", "H2"):
        if len(coeffs) != 4:
            raise HomomorphismError(f"{tag} takes (beta1, gamma1, beta2, gamma2)")
        b1, g1, b2, g2 = coeffs
        M[0, 1:] = (b1, g1)
        M[1 if tag == "H1" else 2, 1:] = (b2, g2)
        return M
    if len(coeffs) != 2:
        names = "(alpha, beta)" if tag in ("H8", "H9") else "(beta, gamma)"
        raise HomomorphismError(f"{tag} takes {names}")
    beta, gamma = coeffs
    if tag in ("H8", "H9"):
        direction = (target.a_hat, target.b_hat, 0.0) if tag == "H8" else (target.a_hat, 0.0, target.b_hat)
    else:
        direction = _LINE_DIRECTIONS[tag]
    M[:, 1] = np.multiply(direction, beta)
    M[:, 2] = np.multiply(direction, gamma)
    return M


def build_homomorphism(target: SubgroupId, coeffs, trials: int = 64, seed: int = 0) -> Homomorphism:
    coeffs = tuple(float(c) for c in coeffs)
    if not all(np.isfinite(coeffs)):
        raise HomomorphismError("coefficients must be finite")
    h = Homomorphism(target, _family_matrix(target, coeffs), coeffs)
    _validate(h, trials, seed)
    return h


def homomorphism_from_matrix(target: SubgroupId, matrix, trials: int = 64, seed: int = 0) -> Homomorphism:
    """Validate an arbitrary linear map as a homomorphism onto ``target``."""
    M = np.array(matrix, dtype=float).reshape(3, 3)
    if np.any(M[:, 0] != 0.0):
        raise HomomorphismError("homomorphisms onto H1..H9 cannot depend on x")
    h = Homomorphism(target, M)
    _validate(h, trials, seed)
    return h


def trivial_homomorphism(target: SubgroupId | None = None) -> Homomorphism:
    target = target or SubgroupId("H1")
    return build_homomorphism(target, (0.0,) * (4 if target.tag in ("H1", "H2") else 2))


def _validate(h: Homomorphism, trials: int, seed: int) -> None:
    if np.any(h.matrix[:, 0] != 0.0):
        raise HomomorphismError("homomorphisms onto H1..H9 cannot depend on x")
    rng = np.random.default_rng(seed)
    for g in rng.uniform(-10.0, 10.0, size=(trials, 3)):
        if not subgroup_contains(h.target, h(g)):
            raise HomomorphismError(f"image of {tuple(g)} is not in {h.target}")
    if not homomorphism_check(h, trials, seed):
        raise HomomorphismError("map does not respect the group product")


def homomorphism_check(h: Homomorphism, trials: int = 1000, seed: int = 0, mul_impl=mul) -> bool:
    """Test ``h(g g') == h(g) h(g')`` on random pairs in ``[-10, 10]^3``."""
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    pairs = rng.uniform(-10.0, 10.0, size=(trials, 2, 3))
    for g, gp in pairs:
        lhs = np.asarray(h(mul_impl(g, gp)))
        rhs = np.asarray(mul_impl(h(g), h(gp)))
        scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
        if np.max(np.abs(lhs - rhs)) > HOM_TOL * scale:
            return False
    return True


@dataclass(frozen=True)
class KernelReport:
    subspace: Subspace
    label: str


KERNEL_LABELS = {
    "full": "full group",
    "y0": "y = 0",
    "z0": "z = 0",
    "mixed": "beta1*y = -gamma1*z",
    "invertible": "B invertible",
}


def kernel_label(B) -> str:
    """Kernel case of the coefficient matrix ``B``, decided by exact zero tests.

    For a singular ``B`` the first nonzero row plays the role of
    ``(beta1, gamma1)``.
    """
    B = np.asarray(B, dtype=float)
    if B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0] != 0.0:
        return KERNEL_LABELS["invertible"]
    nonzero = [row for row in B if np.any(row != 0.0)]
    if not nonzero:
        return KERNEL_LABELS["full"]
    beta, gamma = nonzero[0]
    if gamma == 0.0:
        return KERNEL_LABELS["y0"]
    if beta == 0.0:
        return KERNEL_LABELS["z0"]
    return KERNEL_LABELS["mixed"]


def representative_functional(h: Homomorphism) -> tuple[float, float]:
    """``(beta1, gamma1)`` used in the singular-``B`` case analysis."""
    for row in h.coefficient_matrix():
        if np.any(row != 0.0):
            return float(row[0]), float(row[1])
    return 0.0, 0.0


def kernel(h: Homomorphism) -> KernelReport:
    space = Subspace.nullspace(h.output_map)
    return KernelReport(space, kernel_label(h.coefficient_matrix()))
