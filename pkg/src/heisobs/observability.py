"""Fixed points, unobservable subgroups and observability verdicts.

For a linear vector field with derivation ``D`` and an output homomorphism
``h`` with kernel ``K``, the pair is locally observable iff the set ``I`` of
points whose whole trajectory stays in ``K`` is discrete, and observable iff
moreover ``Fix(flow) & K`` is trivial. Both sets are linear subspaces in the
chart coordinates:

* ``Fix(flow) = ker D``
* ``I = ker [C; C D; C D^2]`` where ``C`` is the output map of ``h``
  (Cayley-Hamilton stops the powers at 2).

:func:`decide_oracle` decides from these subspaces. :func:`decide_paper`
replays the published case analysis instead and reports where the two
disagree.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .catalog import KERNEL_LABELS, Homomorphism, kernel, kernel_label
from .flow import Derivation, flow_matrix, integral_term
from .group import GroupElement, mul
from .linalg import RANK_RTOL, Subspace, row_reduce

logger = logging.getLogger(__name__)

BRANCH_TOL = 1e-12
DISTINGUISH_TOL = 1e-9
CROSS_CHECK_TIMES = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
CROSS_CHECK_TOL = 1e-8
# y = 0 makes p k equal to p + k in the chart, so the witness rests on
# linearity of the flow alone (the chart product is not flow-invariant)
WITNESS_BASE = GroupElement(1.0, 0.0, 1.0)
J_TEST_TOL = 1e-10


class Status(str, enum.Enum):
    OBSERVABLE = "Observable"
    NOT_LOCALLY_OBSERVABLE = "NotLocallyObservable"
    LOCALLY_OBSERVABLE_ONLY = "LocallyObservableOnly"

    def __str__(self) -> str:
        return self.value


class CrossCheckError(RuntimeError):
    """The unobservable subspace failed its flow-sampling cross-check."""


# fixed-point branches of the case analysis
INVERTIBLE_TRACE_NONZERO = "A invertible, a != -d"
INVERTIBLE_TRACE_ZERO = "A invertible, a = -d"
SINGULAR_GENERIC = "A singular, a != -d, f != be/a"
SINGULAR_TRACE_ZERO = "A singular, a = -d, f != be/a"
SINGULAR_F_MATCHED = "A singular, a != -d, f = be/a"
SINGULAR_BOTH = "A singular, a = -d, f = be/a"
SINGULAR_D_GENERIC = "A singular (a = 0), e != fc/d"
SINGULAR_D_MATCHED = "A singular (a = 0), e = fc/d"
SINGULAR_DEGENERATE = "A singular, a = d = 0"

CASE_BRANCHES = (
    INVERTIBLE_TRACE_NONZERO,
    INVERTIBLE_TRACE_ZERO,
    SINGULAR_GENERIC,
    SINGULAR_TRACE_ZERO,
    SINGULAR_F_MATCHED,
    SINGULAR_BOTH,
)


def _zero(value: float, *terms: float) -> bool:
    return abs(value) <= BRANCH_TOL * max([1.0] + [abs(t) for t in terms])


@dataclass(frozen=True)
class FixedPointReport:
    subspace: Subspace
    case_label: str
    case_set: Subspace | None = None


def fixed_point_case(deriv: Derivation) -> tuple[str, Subspace | None]:
    """Branch of the case analysis and the fixed-point set it predicts.

    The singular branches normalise on ``a != 0``; with ``a = 0`` and
    ``d != 0`` the same reduction runs with the rows of ``A`` exchanged.
    ``None`` is returned for the set when ``a = d = 0``.
    """
    a, b, c, d, e, f = deriv.as_tuple()
    s = a + d
    trace_zero = _zero(s, a, d)
    if not _zero(a * d - b * c, a * d, b * c):
        if trace_zero:
            return INVERTIBLE_TRACE_ZERO, Subspace.span([(0.0, 0.0, 1.0)])
        return INVERTIBLE_TRACE_NONZERO, Subspace.zero()

    if a != 0.0:
        # x = -b y / a and (f - b e / a) y + (a + d) z = 0
        f_matched = _zero(f * a - b * e, f * a, b * e)
        line = (-b / a, 1.0, 0.0)
        if trace_zero and f_matched:
            return SINGULAR_BOTH, Subspace.span([line, (0.0, 0.0, 1.0)])
        if trace_zero:
            return SINGULAR_TRACE_ZERO, Subspace.span([(0.0, 0.0, 1.0)])
        if f_matched:
            return SINGULAR_F_MATCHED, Subspace.span([line])
        return SINGULAR_GENERIC, Subspace.span([(-b / a, 1.0, (b * e / a - f) / s)])

    if d != 0.0:
        # y = -c x / d and (e - f c / d) x + (a + d) z = 0
        if _zero(e * d - f * c, e * d, f * c):
            return SINGULAR_D_MATCHED, Subspace.span([(1.0, -c / d, 0.0)])
        return SINGULAR_D_GENERIC, Subspace.span([(1.0, -c / d, (f * c / d - e) / s)])

    return SINGULAR_DEGENERATE, None


def fixed_points(deriv: Derivation) -> FixedPointReport:
    D = deriv.D
    space = Subspace.nullspace(D, RANK_RTOL)
    label, case_set = fixed_point_case(deriv)
    return FixedPointReport(space, label, case_set)


def observability_matrix(deriv: Derivation, h: Homomorphism) -> np.ndarray:
    C = h.output_map
    D = deriv.D
    CD = C @ D
    return np.vstack([C, CD, CD @ D])


def unobservable_subspace(deriv: Derivation, h: Homomorphism, check: bool = True) -> Subspace:
    space = Subspace.nullspace(observability_matrix(deriv, h), RANK_RTOL)
    if check and space.dim:
        _cross_check(deriv, h, space)
    return space


def _cross_check(deriv: Derivation, h: Homomorphism, space: Subspace) -> None:
    C = h.output_map
    Ls = flow_matrix(deriv, np.array(CROSS_CHECK_TIMES))
    for t, L in zip(CROSS_CHECK_TIMES, Ls):
        CL = C @ L
        bound = CROSS_CHECK_TOL * max(1.0, float(np.linalg.norm(CL)))
        for v in space.basis:
            resid = float(np.linalg.norm(CL @ v))
            if resid > bound:
                msg = f"flow of unobservable direction {v} leaves the kernel at t={t} (residual {resid:.3g})"
                if space.fragile:
                    logger.warning(msg)
                else:
                    raise CrossCheckError(msg)


@dataclass(frozen=True)
class Verdict:
    status: Status
    unobservable: Subspace
    fix_cap_kernel: Subspace
    witness: tuple[GroupElement, GroupElement] | None = None
    fragile: bool = False

    @property
    def observable(self) -> bool:
        return self.status is Status.OBSERVABLE


def witness_pair(space: Subspace) -> tuple[GroupElement, GroupElement]:
    """Two points with equal outputs for all time: ``p`` and ``p k``, ``k`` in ``I``."""
    k = GroupElement(*(float(v) for v in space.basis[0]))
    return WITNESS_BASE, mul(WITNESS_BASE, k)


def decide_oracle(deriv: Derivation, h: Homomorphism) -> Verdict:
    I = unobservable_subspace(deriv, h)
    fix_k = Subspace.nullspace(np.vstack([deriv.D, h.output_map]), RANK_RTOL)
    if I.dim >= 1:
        status = Status.NOT_LOCALLY_OBSERVABLE
    elif fix_k.dim >= 1:
        status = Status.LOCALLY_OBSERVABLE_ONLY
    else:
        status = Status.OBSERVABLE
    witness = witness_pair(I) if I.dim else None
    return Verdict(status, I, fix_k, witness, I.fragile or fix_k.fragile)


@dataclass(frozen=True)
class RemarkThreeReport:
    times: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f1_zero: bool
    f2_zero: bool
    J_empty: bool
    forced: tuple[str, ...]
    claim: str  # "discrete", "line" or "not discrete"


def symmetric_grid(t_max: float = 2.0, samples: int = 65) -> np.ndarray:
    if t_max <= 0 or samples < 1:
        raise ValueError("need t_max > 0 and samples >= 1")
    return np.linspace(-t_max, t_max, samples)


def remark3_report(deriv: Derivation, grid=None) -> RemarkThreeReport:
    """Sample ``f1, f2`` and run the ``J = I1 & I2`` test on a time grid.

    ``f_j`` counts as identically zero when its largest sample is at most
    ``1e-10`` times ``max(1, max|f1|, max|f2|)``; the same threshold decides
    membership of a grid time in ``I1`` and ``I2``.
    """
    times = symmetric_grid() if grid is None else np.asarray(grid, dtype=float).ravel()
    if times.size == 0:
        raise ValueError("time grid is empty")
    ordered = np.sort(times)
    if not np.allclose(ordered, -ordered[::-1], rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(ordered).max()))):
        raise ValueError("time grid must be symmetric about 0")
    f1, f2 = integral_term(deriv, times)
    f1 = np.atleast_1d(np.asarray(f1, dtype=float))
    f2 = np.atleast_1d(np.asarray(f2, dtype=float))
    scale = max(1.0, float(np.abs(f1).max()), float(np.abs(f2).max()))
    thresh = J_TEST_TOL * scale
    in_i1 = np.abs(f1) > thresh
    in_i2 = np.abs(f2) > thresh
    f1_zero = not in_i1.any()
    f2_zero = not in_i2.any()
    J_empty = not np.any(in_i1 & in_i2)
    forced = tuple(name for name, z in (("x", f1_zero), ("y", f2_zero)) if not z)
    if f1_zero and f2_zero:
        claim = "not discrete"
    elif J_empty:
        claim = "discrete"
    else:
        claim = "line"
    return RemarkThreeReport(times, f1, f2, f1_zero, f2_zero, J_empty, forced, claim)


@dataclass(frozen=True)
class Finding:
    kind: str
    message: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message, "details": dict(self.details)}

    @classmethod
    def from_dict(cls, data: dict) -> "Finding":
        return cls(data["kind"], data["message"], dict(data.get("details", {})))


# kinds that document known gaps of the published case analysis
AMBIGUITY_KINDS = frozenset({"invertible_b_formulations", "y0_kernel_I_not_K", "z0_kernel_J_test"})


@dataclass(frozen=True)
class PaperDecision:
    status: Status | None
    covered: bool
    rule: str
    findings: tuple[Finding, ...] = ()


def _params(deriv: Derivation, h: Homomorphism) -> dict:
    out = dict(zip("abcdef", deriv.as_tuple()))
    out["target"] = str(h.target)
    out["coeffs"] = list(h.coeffs)
    return out


def decide_paper(
    deriv: Derivation,
    h: Homomorphism,
    oracle: Verdict | None = None,
    grid=None,
) -> PaperDecision:
    """Replay the published conditions in order and compare with the oracle.

    Covered rules: trivial ``h``; kernel ``{y = 0}``; kernel ``{z = 0}``
    through the ``J`` test; invertible ``B`` with ``a + d != 0`` and
    ``e != 0``. Anything else is reported as not covered. Disagreements with
    ``oracle`` become findings rather than errors.
    """
    oracle = oracle or decide_oracle(deriv, h)
    a, b, c, d, e, f = deriv.as_tuple()
    findings: list[Finding] = []
    status: Status | None = None
    rule = "not covered"

    B = h.coefficient_matrix()
    label = kernel_label(B)
    if h.is_trivial or label == KERNEL_LABELS["full"]:
        status, rule = Status.NOT_LOCALLY_OBSERVABLE, "trivial homomorphism, K = H"
    elif label == KERNEL_LABELS["y0"]:
        status, rule = Status.NOT_LOCALLY_OBSERVABLE, "kernel y = 0, I = K"
        K = kernel(h).subspace
        if not oracle.unobservable.equals(K):
            findings.append(
                Finding(
                    "y0_kernel_I_not_K",
                    f"claimed I = K (dim {K.dim}) but I has dim {oracle.unobservable.dim}; c = {c:g}",
                    {**_params(deriv, h), "dim_I": oracle.unobservable.dim, "dim_K": K.dim},
                )
            )
    elif label == KERNEL_LABELS["z0"]:
        rep = remark3_report(deriv, grid)
        rule = f"kernel z = 0, J test ({rep.claim})"
        status = Status.OBSERVABLE if rep.claim == "discrete" else Status.NOT_LOCALLY_OBSERVABLE
        if status is not oracle.status:
            findings.append(
                Finding(
                    "z0_kernel_J_test",
                    f"J test claims I {rep.claim} but dim I = {oracle.unobservable.dim}",
                    {
                        **_params(deriv, h),
                        "J_empty": rep.J_empty,
                        "f1_zero": rep.f1_zero,
                        "f2_zero": rep.f2_zero,
                        "dim_I": oracle.unobservable.dim,
                    },
                )
            )
    elif label == KERNEL_LABELS["invertible"]:
        hypotheses = (a + d) != 0.0 and e != 0.0
        if hypotheses:
            status, rule = Status.OBSERVABLE, "B invertible, a + d != 0, e != 0"
        conditions = {
            "hypotheses": hypotheses,  # a + d != 0 and e != 0
            "proof": c != 0.0 or e != 0.0,  # c x = e x = 0 forces x = 0
            "closing": c != 0.0,  # "c != 0 and B invertible"
            "oracle": oracle.observable,
        }
        if len(set(conditions.values())) > 1:
            findings.append(
                Finding(
                    "invertible_b_formulations",
                    "invertible-B conditions disagree: "
                    + ", ".join(f"{k}={v}" for k, v in conditions.items()),
                    {**_params(deriv, h), **conditions},
                )
            )
    # mixed kernel beta1*y = -gamma1*z: no published condition applies

    covered = status is not None
    if covered and status is not oracle.status and not any(x.kind in AMBIGUITY_KINDS for x in findings):
        findings.append(
            Finding(
                "unexplained_mismatch",
                f"paper rule '{rule}' gives {status} but oracle gives {oracle.status}",
                _params(deriv, h),
            )
        )
    return PaperDecision(status, covered, rule, tuple(findings))


def separating_times(deriv: Derivation, h: Homomorphism, P, Q, t_max: float, samples: int, tol: float = DISTINGUISH_TOL) -> np.ndarray:
    """First sampled time separating each pair ``(P[i], Q[i])``, NaN if none."""
    if samples < 2 or not t_max > 0:
        raise ValueError("need samples >= 2 and t_max > 0")
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    times = np.linspace(0.0, t_max, samples)
    HL = h.matrix @ flow_matrix(deriv, times)  # (samples, 3, 3)
    # one product for all times: column block s of M is HL[s].T
    M = HL.transpose(2, 0, 1).reshape(3, -1)
    diff = (P @ M - Q @ M).reshape(len(P), samples, 3)
    gap = np.sqrt(np.einsum("nsk,nsk->ns", diff, diff)) > tol
    first = np.argmax(gap, axis=1)
    return np.where(gap.any(axis=1), times[first], np.nan)


def distinguish(
    deriv: Derivation,
    h: Homomorphism,
    p,
    q,
    t_max: float = 4.0,
    samples: int = 64,
    tol: float = DISTINGUISH_TOL,
) -> float | None:
    t = separating_times(deriv, h, [p], [q], t_max, samples, tol)[0]
    return None if np.isnan(t) else float(t)


def kalman_rank(A, C, rtol: float = RANK_RTOL) -> int:
    """Rank of ``[C; C A; ...; C A^(n-1)]``."""
    A = np.asarray(A, dtype=float)
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError("A must be a nonempty square matrix")
    if C.shape[1] != A.shape[0]:
        raise ValueError(f"C has {C.shape[1]} columns, A is {A.shape[0]}x{A.shape[0]}")
    blocks = [C]
    for _ in range(A.shape[0] - 1):
        blocks.append(blocks[-1] @ A)
    return row_reduce(np.vstack(blocks), rtol).rank
