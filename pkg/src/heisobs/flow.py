"""Flows of linear vector fields on the Heisenberg group.

A linear vector field is fixed by a derivation with matrix

    D = [[a, b, 0],
         [c, d, 0],
         [e, f, a + d]]

and its flow is ``(x, y, z) -> (exp(tA)(x, y), e^{t(a+d)} (<F(t), (x, y)> + z))``
where ``A = [[a, b], [c, d]]`` and ``F(t) = (f1(t), f2(t))`` is the integral
of ``exp(s (A - (a+d) I)^T) (e, f)`` over ``[0, t]``.

``exp(tA)`` is evaluated with Sylvester's two-term formula. Time arguments of
``sylvester_coeffs``, ``exp2``, ``integral_term`` and ``flow_matrix`` may be
scalars or 1-d arrays; array input adds a leading time axis to the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .group import GroupElement

CONFLUENT_RTOL = 1e-8


@dataclass(frozen=True)
class Derivation:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0
    e: float = 0.0
    f: float = 0.0

    def __post_init__(self):
        for name in "abcdef":
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"derivation entry {name} is not finite")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, params) -> "Derivation":
        return cls(*(float(p) for p in params))

    def as_tuple(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c, self.d, self.e, self.f)

    @property
    def trace_a(self) -> float:
        """``a + d``, the trace of ``A`` and the (3,3) entry of ``D``."""
        return self.a + self.d

    @property
    def A(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def D(self) -> np.ndarray:
        return np.array(
            [
                [self.a, self.b, 0.0],
                [self.c, self.d, 0.0],
                [self.e, self.f, self.a + self.d],
            ]
        )

    def field(self, g) -> np.ndarray:
        """The vector field evaluated at ``g``."""
        return self.D @ np.asarray(g, dtype=float)


@dataclass(frozen=True)
class SylvesterCoeffs:
    s0: np.ndarray | float
    s1: np.ndarray | float
    t: np.ndarray | float
    alpha: complex
    beta: complex
    branch: str


@dataclass(frozen=True)
class FlowSample:
    t: float
    point: GroupElement


@dataclass(frozen=True)
class _Spectrum:
    mean: float
    half_gap: float  # |alpha - beta| / 2, real part or imaginary part
    branch: str  # "distinct", "complex" or "confluent"


def _spectrum(deriv: Derivation) -> _Spectrum:
    mean = 0.5 * (deriv.a + deriv.d)
    half_diff = 0.5 * (deriv.a - deriv.d)
    # discriminant of the characteristic polynomial over 4, written so that
    # no mean^2 - det cancellation occurs
    disc = half_diff * half_diff + deriv.b * deriv.c
    w = math.sqrt(abs(disc))
    largest = abs(mean) + w if disc >= 0 else math.hypot(mean, w)
    scale = max(1.0, largest)
    if 2.0 * w < CONFLUENT_RTOL * scale:
        return _Spectrum(mean, 0.0, "confluent")
    return _Spectrum(mean, w, "distinct" if disc > 0 else "complex")


def eigenvalues(deriv: Derivation) -> tuple[complex, complex]:
    sp = _spectrum(deriv)
    if sp.branch == "complex":
        return complex(sp.mean, sp.half_gap), complex(sp.mean, -sp.half_gap)
    return complex(sp.mean + sp.half_gap), complex(sp.mean - sp.half_gap)


def sylvester_coeffs(deriv: Derivation, t) -> SylvesterCoeffs:
    """Scalars ``s0(t), s1(t)`` with ``exp(tA) = s0 I + s1 A``.

    With eigenvalues ``m +- w`` the two-term formula reads
    ``s1 = e^{mt} sinh(wt)/w`` and ``s0 = e^{mt} (cosh(wt) - m sinh(wt)/w)``,
    which is the divided-difference form rewritten without the
    ``1/(beta - alpha)`` cancellation. For a complex pair ``m +- iw`` the
    hyperbolic functions become circular ones, so both scalars stay real.
    The repeated-root branch ``s0 = (1 - mt) e^{mt}``, ``s1 = t e^{mt}`` is
    used when ``|alpha - beta| < 1e-8 max(1, |alpha|, |beta|)``.
    """
    sp = _spectrum(deriv)
    t_arr = np.asarray(t, dtype=float)
    m, w = sp.mean, sp.half_gap
    growth = np.exp(m * t_arr)
    if sp.branch == "confluent":
        s1 = t_arr * growth
        s0 = (1.0 - m * t_arr) * growth
    elif sp.branch == "distinct":
        sh = np.sinh(w * t_arr) / w
        s1 = growth * sh
        s0 = growth * (np.cosh(w * t_arr) - m * sh)
    else:
        sn = np.sin(w * t_arr) / w
        s1 = growth * sn
        s0 = growth * (np.cos(w * t_arr) - m * sn)
    alpha, beta = eigenvalues(deriv)
    if t_arr.ndim == 0:
        s0, s1, t_out = float(s0), float(s1), float(t_arr)
    else:
        t_out = t_arr
    return SylvesterCoeffs(s0, s1, t_out, alpha, beta, sp.branch)


def exp2(deriv: Derivation, t) -> np.ndarray:
    """``exp(tA)`` for the 2x2 block, via ``s0 I + s1 A``."""
    sc = sylvester_coeffs(deriv, t)
    s0 = np.asarray(sc.s0)[..., None, None]
    s1 = np.asarray(sc.s1)[..., None, None]
    return s0 * np.eye(2) + s1 * deriv.A


def integral_term(deriv: Derivation, t) -> tuple:
    """``(f1(t), f2(t))``, the integral of ``exp(s M) (e, f)`` over ``[0, t]``.

    ``M = (A - (a+d) I)^T``. The integral is the top-right column of
    ``exp(t [[M, v], [0, 0]])``, which stays valid when ``M`` is singular.
    """
    t_arr = np.asarray(t, dtype=float)
    M = (deriv.A - deriv.trace_a * np.eye(2)).T
    N = np.zeros((3, 3))
    N[:2, :2] = M
    N[:2, 2] = (deriv.e, deriv.f)
    if t_arr.ndim == 0:
        if t_arr == 0.0:
            return 0.0, 0.0
        col = expm(float(t_arr) * N)[:2, 2]
        return float(col[0]), float(col[1])
    cols = expm(t_arr[:, None, None] * N)[:, :2, 2]
    cols[t_arr == 0.0] = 0.0
    return cols[:, 0], cols[:, 1]


def flow_matrix(deriv: Derivation, t) -> np.ndarray:
    """Matrix ``L(t)`` with ``flow(deriv, t, g) = L(t) @ g``."""
    t_arr = np.asarray(t, dtype=float)
    E = exp2(deriv, t_arr)
    f1, f2 = integral_term(deriv, t_arr)
    growth = np.exp(deriv.trace_a * t_arr)
    L = np.zeros(t_arr.shape + (3, 3))
    L[..., :2, :2] = E
    L[..., 2, 0] = growth * f1
    L[..., 2, 1] = growth * f2
    L[..., 2, 2] = growth
    return L


def flow(deriv: Derivation, t: float, g) -> GroupElement:
    """Point reached at time ``t`` by the flow started at ``g``."""
    x, y, z = (float(v) for v in g)
    if t == 0:
        return GroupElement(x, y, z)
    E = exp2(deriv, t)
    f1, f2 = integral_term(deriv, t)
    growth = math.exp(deriv.trace_a * t)
    xt, yt = E @ (x, y)
    zt = growth * (f1 * x + f2 * y) + growth * z
    return GroupElement(float(xt), float(yt), float(zt))


def trajectory(deriv: Derivation, times, g) -> list[FlowSample]:
    times = np.asarray(times, dtype=float)
    pts = flow_matrix(deriv, times) @ np.asarray(g, dtype=float)
    return [FlowSample(float(t), GroupElement(*map(float, p))) for t, p in zip(times, pts)]


def rk4_flow(deriv: Derivation, t: float, g, steps: int) -> GroupElement:
    """Classical fourth-order Runge-Kutta for the flow ODE.

    Works on the component equations directly (no matrices) so that it is
    independent of the closed form it is used to check.
    """
    if int(steps) != steps or steps < 1:
        raise ValueError("steps must be a positive integer")
    a, b, c, d, e, f = deriv.as_tuple()
    s = a + d
    x, y, z = (float(v) for v in g)
    h = float(t) / steps
    if h == 0.0:
        return GroupElement(x, y, z)

    def rhs(x, y, z):
        return a * x + b * y, c * x + d * y, e * x + f * y + s * z

    for _ in range(int(steps)):
        k1x, k1y, k1z = rhs(x, y, z)
        k2x, k2y, k2z = rhs(x + 0.5 * h * k1x, y + 0.5 * h * k1y, z + 0.5 * h * k1z)
        k3x, k3y, k3z = rhs(x + 0.5 * h * k2x, y + 0.5 * h * k2y, z + 0.5 * h * k2z)
        k4x, k4y, k4z = rhs(x + h * k3x, y + h * k3y, z + h * k3z)
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
    return GroupElement(x, y, z)
