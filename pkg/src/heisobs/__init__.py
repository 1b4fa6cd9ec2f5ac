"""Observability of linear vector fields on the 3-dimensional Heisenberg group."""

from .catalog import (
    Homomorphism,
    HomomorphismError,
    SubgroupId,
    build_homomorphism,
    homomorphism_check,
    kernel,
    subgroup_contains,
)
from .flow import Derivation, exp2, flow, flow_matrix, integral_term, rk4_flow, sylvester_coeffs
from .group import AlgebraElement, GroupElement, bracket, inverse, mul
from .linalg import Subspace
from .observability import (
    Status,
    Verdict,
    decide_oracle,
    decide_paper,
    distinguish,
    fixed_points,
    kalman_rank,
    remark3_report,
    unobservable_subspace,
)

__all__ = [
    "AlgebraElement",
    "Derivation",
    "GroupElement",
    "Homomorphism",
    "HomomorphismError",
    "Status",
    "SubgroupId",
    "Subspace",
    "Verdict",
    "bracket",
    "build_homomorphism",
    "decide_oracle",
    "decide_paper",
    "distinguish",
    "exp2",
    "fixed_points",
    "flow",
    "flow_matrix",
    "homomorphism_check",
    "integral_term",
    "inverse",
    "kalman_rank",
    "kernel",
    "mul",
    "remark3_report",
    "rk4_flow",
    "subgroup_contains",
    "sylvester_coeffs",
    "unobservable_subspace",
]
