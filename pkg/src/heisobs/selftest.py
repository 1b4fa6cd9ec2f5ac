"""Built-in invariant suites behind ``heisobs selftest``.

Every suite takes a seeded generator and the group product to use, so a
deliberately broken product can be injected to confirm the suites notice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import group
from .catalog import SubgroupId, build_homomorphism, homomorphism_check, kernel
from .flow import Derivation, flow, flow_matrix, rk4_flow
from .observability import Status, decide_oracle, distinguish, fixed_points

FAULTS = ("mul-sign",)


def _faulty_mul(g, h):
    gx, gy, gz = g
    hx, hy, hz = h
    return group.GroupElement(gx + hx - gy * hz, gy + hy, gz + hz)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    checks: int
    detail: str = ""


def _close(u, v, tol):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    scale = max(1.0, float(np.abs(u).max()), float(np.abs(v).max()))
    return float(np.abs(u - v).max()) <= tol * scale


def _random_derivation(rng) -> Derivation:
    return Derivation.from_array(rng.uniform(-2.0, 2.0, 6))


def _random_homomorphism(rng, seed):
    tag = rng.choice(["H1", "H2", "H3", "H4", "H5", "H6", "H7", "H8", "H9"])
    if tag in ("H1", "H2"):
        return build_homomorphism(SubgroupId(tag), rng.integers(-2, 3, 4), seed=seed)
    if tag in ("H8", "H9"):
        sid = SubgroupId(tag, *rng.choice([-2.0, -1.0, 1.0, 2.0], 2))
        return build_homomorphism(sid, rng.integers(-2, 3, 2), seed=seed)
    return build_homomorphism(SubgroupId(tag), rng.integers(-2, 3, 2), seed=seed)


def suite_group(rng, trials, mul):
    n = 0
    for _ in range(trials):
        g, h, k = rng.uniform(-10.0, 10.0, (3, 3))
        checks = [
            _close(mul(group.IDENTITY, g), g, 1e-12),
            _close(mul(g, group.inverse(g)), group.IDENTITY, 1e-12),
            _close(mul(group.inverse(g), g), group.IDENTITY, 1e-12),
            _close(mul(mul(g, h), k), mul(g, mul(h, k)), 1e-12),
            _close(group.bracket(g, h), np.negative(group.bracket(h, g)), 1e-12),
        ]
        n += len(checks)
        if not all(checks):
            return SuiteResult("group", False, n, f"failed at g={g.tolist()}, h={h.tolist()}")
    return SuiteResult("group", True, n)


def suite_flow(rng, trials, mul):
    n = 0
    for _ in range(trials):
        deriv = _random_derivation(rng)
        t, s = rng.uniform(-2.0, 2.0, 2)
        g = rng.uniform(-1.0, 1.0, 3)
        checks = [
            _close(flow(deriv, t + s, g), flow(deriv, t, flow(deriv, s, g)), 1e-9),
            _close(flow(deriv, t, g), rk4_flow(deriv, t, g, 400), 1e-6),
            abs(np.linalg.det(flow_matrix(deriv, t)) / np.exp(2 * deriv.trace_a * t) - 1.0) <= 1e-9,
        ]
        n += len(checks)
        if not all(checks):
            return SuiteResult("flow", False, n, f"failed at {deriv}, t={t}, s={s}")
    return SuiteResult("flow", True, n)


def suite_catalog(rng, trials, mul, seed):
    n = 0
    for _ in range(max(1, trials // 4)):
        h = _random_homomorphism(rng, seed)
        K = kernel(h).subspace
        ok = homomorphism_check(h, 50, seed, mul_impl=mul) and K.contains((1.0, 0.0, 0.0))
        for g in rng.uniform(-10.0, 10.0, (20, 3)):
            in_kernel = np.allclose(h(g), 0.0, atol=1e-9 * max(1.0, np.abs(g).max()))
            ok = ok and in_kernel == K.contains(g)
        n += 22
        if not ok:
            return SuiteResult("catalog", False, n, h.describe())
    return SuiteResult("catalog", True, n)


def suite_engine(rng, trials, mul, seed):
    n = 0
    for _ in range(max(1, trials // 4)):
        deriv = Derivation.from_array(rng.integers(-1, 2, 6))
        h = _random_homomorphism(rng, seed)
        fp = fixed_points(deriv)
        ok = bool(np.allclose(deriv.D @ fp.subspace.basis.T, 0.0, atol=1e-9))
        if fp.case_set is not None:
            ok = ok and fp.case_set.equals(fp.subspace)
        v = decide_oracle(deriv, h)
        ok = ok and v.unobservable.contains_subspace(v.fix_cap_kernel)
        ok = ok and (v.status is Status.OBSERVABLE) == (v.unobservable.dim == 0)
        if v.witness is not None:
            p, q = v.witness
            # the witness is q = p k built with the product under test
            k = group.GroupElement(*v.unobservable.basis[0])
            ok = ok and distinguish(deriv, h, p, mul(p, k), 4.0, 64) is None
        n += 4
        if not ok:
            return SuiteResult("engine", False, n, f"{deriv} with {h.describe()}")
    return SuiteResult("engine", True, n)


def run_selftest(seed: int = 0, trials: int = 100, fault: str | None = None) -> list[SuiteResult]:
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    mul = _faulty_mul if fault == "mul-sign" else group.mul
    results = []
    for i, suite in enumerate((suite_group, suite_flow, suite_catalog, suite_engine)):
        rng = np.random.default_rng([seed, i])
        if suite in (suite_catalog, suite_engine):
            results.append(suite(rng, trials, mul, seed))
        else:
            results.append(suite(rng, trials, mul))
    return results
