"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also collected into the terminal summary.
"""

import itertools
import time

import numpy as np

from acceptance_log import record
from heisobs.catalog import KERNEL_LABELS, SubgroupId, build_homomorphism, kernel, trivial_homomorphism
from heisobs.flow import Derivation, exp2, flow, rk4_flow, sylvester_coeffs
from heisobs.group import mul
from heisobs.linalg import Subspace
from heisobs.observability import (
    AMBIGUITY_KINDS,
    INVERTIBLE_TRACE_NONZERO,
    INVERTIBLE_TRACE_ZERO,
    SINGULAR_BOTH,
    SINGULAR_F_MATCHED,
    SINGULAR_GENERIC,
    SINGULAR_TRACE_ZERO,
    Finding,
    Status,
    decide_oracle,
    decide_paper,
    distinguish,
    fixed_points,
    kalman_rank,
    separating_times,
)
from oracles import expm_ref

WITNESS_TIMES = np.linspace(0.0, 4.0, 64)


def _rel_close(u, v, rtol):
    u, v = np.asarray(u, float), np.asarray(v, float)
    return np.all(np.abs(u - v) <= rtol * np.abs(v) + 1e-15)


def _witness_ok(dv, h, p, q):
    """Outputs of ``p`` and ``q`` agree at 64 times in [0, 4] to 1e-9."""
    if distinguish(dv, h, p, q, 4.0, 64, 1e-9) is not None:
        return False
    for t in WITNESS_TIMES:
        gap = np.subtract(h(flow(dv, t, p)), h(flow(dv, t, q)))
        if np.linalg.norm(gap) > 1e-9:
            return False
    return not np.allclose(p, q)


def test_criterion_1_flow_matches_rk4():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    bad = 0
    for _ in range(1000):
        dv = Derivation.from_array(rng.uniform(-2, 2, 6))
        t = rng.uniform(-2, 2)
        g = rng.uniform(-1, 1, 3)
        u = np.array(flow(dv, t, g))
        v = np.array(rk4_flow(dv, t, g, 1000))
        worst = max(worst, float(np.max(np.abs(u - v) / np.maximum(np.abs(v), 1e-300))))
        bad += not _rel_close(u, v, 1e-6)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed <= 10.0
    record(1, ok, f"1000 draws, {bad} over 1e-6, worst rel {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_criterion_2_group_law():
    rng = np.random.default_rng(102)
    group_fail = auto_fail = 0
    worst_auto = 0.0
    for _ in range(1000):
        dv = Derivation.from_array(rng.uniform(-2, 2, 6))
        t, s = rng.uniform(-2, 2, 2)
        g = rng.uniform(-1, 1, 3)
        lhs = np.array(flow(dv, t + s, g))
        rhs = np.array(flow(dv, t, flow(dv, s, g)))
        group_fail += np.abs(lhs - rhs).max() > 1e-9 * max(1.0, np.abs(lhs).max())
    for _ in range(1000):
        dv = Derivation.from_array(rng.uniform(-2, 2, 6))
        t = rng.uniform(-2, 2)
        g, h = rng.uniform(-1, 1, (2, 3))
        lhs = np.array(flow(dv, t, mul(g, h)))
        rhs = np.array(mul(flow(dv, t, g), flow(dv, t, h)))
        err = np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max())
        worst_auto = max(worst_auto, float(err))
        auto_fail += err > 1e-9
    ok = group_fail == 0 and auto_fail == 0
    record(
        2,
        ok,
        f"one-parameter group {1000 - group_fail}/1000, "
        f"automorphism of the chart product {1000 - auto_fail}/1000 (worst rel {worst_auto:.2e})",
    )
    assert group_fail == 0
    assert auto_fail == 0


def _near_confluent(rng, gap):
    lam = rng.uniform(-2, 2)
    P = rng.uniform(-1, 1, (2, 2)) + 2 * np.eye(2)
    return P @ np.diag([lam, lam + gap]) @ np.linalg.inv(P)


def _complex_pair(rng):
    p, q = rng.uniform(-2, 2), rng.uniform(0.1, 2)
    P = rng.uniform(-1, 1, (2, 2)) + 2 * np.eye(2)
    return P @ np.array([[p, -q], [q, p]]) @ np.linalg.inv(P)


def test_criterion_3_sylvester_exponential():
    rng = np.random.default_rng(103)
    mats = [rng.uniform(-2, 2, (2, 2)) for _ in range(600)]
    mats += [_near_confluent(rng, 1e-6) for _ in range(200)]
    mats += [_complex_pair(rng) for _ in range(200)]
    bad = 0
    worst = 0.0
    branches = set()
    for A in mats:
        dv = Derivation(A[0, 0], A[0, 1], A[1, 0], A[1, 1], 0.0, 0.0)
        t = rng.uniform(-2, 2)
        ours = exp2(dv, t)
        ref = expm_ref(t * A)
        err = np.abs(ours - ref).max() / np.abs(ref).max()
        worst = max(worst, float(err))
        bad += err > 1e-9
        branches.add(sylvester_coeffs(dv, t).branch)
    ok = bad == 0 and {"distinct", "complex"} <= branches
    record(3, ok, f"1000 matrices ({sorted(branches)}), {bad} over 1e-9, worst rel {worst:.2e}")
    assert ok


def _pm(rng, lo=0.2, hi=2.0):
    return rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi)


def _branch_draw(rng, branch):
    a, b, e, f = _pm(rng), _pm(rng), rng.uniform(-2, 2), rng.uniform(-2, 2)
    if branch == INVERTIBLE_TRACE_NONZERO:
        while True:
            c, d = rng.uniform(-2, 2, 2)
            if abs(a * d - b * c) > 0.1 and abs(a + d) > 0.1:
                break
        return (a, b, c, d, e, f), Subspace.zero()
    if branch == INVERTIBLE_TRACE_ZERO:
        c = _pm(rng)
        if abs(-a * a - b * c) < 0.1:
            c = -c
        return (a, b, c, -a, e, f), Subspace.span([(0, 0, 1)])
    if branch in (SINGULAR_GENERIC, SINGULAR_F_MATCHED):
        c = _pm(rng)
        d = b * c / a
        if abs(a + d) < 0.1:
            d, c = -d, -c
        if branch == SINGULAR_F_MATCHED:
            f = b * e / a
            return (a, b, c, d, e, f), Subspace.span([(-b / a, 1, 0)])
        if abs(f - b * e / a) < 0.1:
            f += 1.0
        return (a, b, c, d, e, f), Subspace.span([(-b / a, 1, (b * e / a - f) / (a + d))])
    # a = -d with A singular: b c = -a^2
    c = -a * a / b
    if branch == SINGULAR_BOTH:
        f = b * e / a
        return (a, b, c, -a, e, f), Subspace.span([(-b / a, 1, 0), (0, 0, 1)])
    if abs(f - b * e / a) < 0.1:
        f += 1.0
    return (a, b, c, -a, e, f), Subspace.span([(0, 0, 1)])


def test_criterion_4_fixed_point_table():
    rng = np.random.default_rng(104)
    branches = (
        INVERTIBLE_TRACE_NONZERO,
        INVERTIBLE_TRACE_ZERO,
        SINGULAR_GENERIC,
        SINGULAR_TRACE_ZERO,
        SINGULAR_F_MATCHED,
        SINGULAR_BOTH,
    )
    failures = {}
    for branch in branches:
        bad = 0
        for _ in range(500):
            params, expected = _branch_draw(rng, branch)
            fp = fixed_points(Derivation(*params))
            same = (
                fp.case_label == branch
                and fp.subspace.dim == expected.dim
                and fp.subspace.contains_subspace(expected, 1e-9)
                and expected.contains_subspace(fp.subspace, 1e-9)
            )
            bad += not same
        failures[branch] = bad
    ok = not any(failures.values())
    record(4, ok, "6 branches x 500 draws, mismatches " + str(sum(failures.values())))
    assert ok, failures


def _invertible_B(rng):
    while True:
        B = rng.uniform(-2, 2, (2, 2))
        if abs(np.linalg.det(B)) > 0.05:
            return B


def test_criterion_5_propositions():
    rng = np.random.default_rng(105)
    oracle_bad = paper_bad = 0
    for i in range(500):
        B = _invertible_B(rng)
        tag = "H1" if i % 2 == 0 else "H2"
        h = build_homomorphism(SubgroupId(tag), (B[0, 0], B[0, 1], B[1, 0], B[1, 1]))
        a, b, c, d = rng.uniform(-2, 2, 4)
        if abs(a + d) < 0.05:
            d += 0.5
        e, f = _pm(rng, 0.05), rng.uniform(-2, 2)
        dv = Derivation(a, b, c, d, e, f)
        verdict = decide_oracle(dv, h)
        pd = decide_paper(dv, h, verdict)
        oracle_bad += verdict.status is not Status.OBSERVABLE
        paper_bad += not (pd.covered and pd.status is Status.OBSERVABLE)
    ok = oracle_bad == 0 and paper_bad == 0
    record(5, ok, f"500 draws, oracle not Observable {oracle_bad}, case rules disagree {paper_bad}")
    assert ok


def test_criterion_6_degenerate_kernels():
    rng = np.random.default_rng(106)
    cases = [
        ((0, 0, 0, 0), KERNEL_LABELS["full"], Subspace.full()),
        ((1.5, 0, -2, 0), KERNEL_LABELS["y0"], Subspace.span([(1, 0, 0), (0, 0, 1)])),
        ((0, 2, 0, 1), KERNEL_LABELS["z0"], Subspace.span([(1, 0, 0), (0, 1, 0)])),
        ((1, 2, 0.5, 1), KERNEL_LABELS["mixed"], Subspace.span([(1, 0, 0), (0, 2, -1)])),
        ((1, 0, 0, 1), KERNEL_LABELS["invertible"], Subspace.span([(1, 0, 0)])),
    ]
    kernel_bad = 0
    for coeffs, label, expected in cases:
        for tag in ("H1", "H2"):
            k = kernel(build_homomorphism(SubgroupId(tag), coeffs))
            kernel_bad += not (k.label == label and k.subspace.equals(expected))

    witness_bad = 0
    homs = [trivial_homomorphism(), build_homomorphism(SubgroupId("H1"), (1.5, 0, -2, 0))]
    for h in homs:
        for _ in range(200):
            p = rng.uniform(-2, 2, 6)
            p[2] = 0.0 if h is homs[1] else p[2]  # c = 0 for the y = 0 kernel
            dv = Derivation.from_array(p)
            v = decide_oracle(dv, h)
            witness_bad += not (v.status is Status.NOT_LOCALLY_OBSERVABLE and _witness_ok(dv, h, *v.witness))
    ok = kernel_bad == 0 and witness_bad == 0
    record(6, ok, f"kernel cases mismatched {kernel_bad}/10, witnesses failed {witness_bad}/400")
    assert ok


SWEEP_HOMS = [
    (SubgroupId("H1"), (1, 0, 0, 1)),
    (SubgroupId("H1"), (1, 1, 0, 1)),
    (SubgroupId("H1"), (1, 0, 0, 0)),
    (SubgroupId("H1"), (0, 1, 0, 0)),
    (SubgroupId("H1"), (1, 1, 0, 0)),
    (SubgroupId("H1"), (0, 0, 0, 0)),
    (SubgroupId("H2"), (1, 0, 0, 1)),
    (SubgroupId("H2"), (2, 1, -1, 1)),
    (SubgroupId("H3"), (1, 0)),
    (SubgroupId("H4"), (0, 1)),
    (SubgroupId("H5"), (1, 1)),
    (SubgroupId("H6"), (1, -1)),
    (SubgroupId("H7"), (2, 1)),
    (SubgroupId("H8", 1, 2), (1, 1)),
    (SubgroupId("H9", -1, 1), (0, 1)),
]


def test_criterion_7_witness_and_distinguishability():
    rng = np.random.default_rng(107)
    grid = list(itertools.product((-1.0, 0.0, 1.0), repeat=6))
    start = time.perf_counter()
    points = nlo = obs = 0
    witness_bad = undistinguished = 0
    for target, coeffs in SWEEP_HOMS:
        h = build_homomorphism(target, coeffs)
        for params in grid:
            dv = Derivation(*params)
            v = decide_oracle(dv, h)
            points += 1
            if v.status is Status.NOT_LOCALLY_OBSERVABLE:
                nlo += 1
                p, q = v.witness
                witness_bad += distinguish(dv, h, p, q, 4.0, 64, 1e-9) is not None or np.allclose(p, q)
            elif v.status is Status.OBSERVABLE:
                obs += 1
                P = rng.uniform(-1, 1, (1000, 3))
                Q = rng.uniform(-1, 1, (1000, 3))
                undistinguished += int(np.isnan(separating_times(dv, h, P, Q, 4.0, 64, 1e-9)).sum())
    elapsed = time.perf_counter() - start
    ok = points >= 10_000 and witness_bad == 0 and undistinguished == 0 and elapsed <= 60.0
    record(
        7,
        ok,
        f"{points} points ({nlo} not observable, {obs} observable), bad witnesses {witness_bad}, "
        f"undistinguished pairs {undistinguished}, {elapsed:.1f}s",
    )
    assert ok


def test_criterion_8_kalman_baseline():
    A = [[0, 1], [0, 0]]
    position = kalman_rank(A, [[1, 0]])
    velocity = kalman_rank(A, [[0, 1]])
    ok = position == 2 and velocity == 1
    record(8, ok, f"position output rank {position}, velocity output rank {velocity}")
    assert ok


def test_criterion_9_discrepancy_ledger():
    Bs = [(1, 0, 0, 1), (0, 1, 1, 0), (2, -1, 1, 1), (1, 1, -1, 1)]
    homs = [build_homomorphism(SubgroupId(tag), B) for tag in ("H1", "H2") for B in Bs]
    # the two singular kernels the remark treats
    homs += [build_homomorphism(SubgroupId("H1"), (1, 0, 0, 0)), build_homomorphism(SubgroupId("H3"), (0, 1))]
    vals = (-1.0, 0.0, 1.0)
    points = inconsistent = crashes = unexplained = 0
    kinds = {}
    for h in homs:
        for a, d, b, c, e, f in itertools.product(vals, (-1.0, 0.0, 1.0, 2.0), vals, vals, vals, (0.0, 1.0)):
            points += 1
            dv = Derivation(a, b, c, d, e, f)
            try:
                v = decide_oracle(dv, h)
                pd = decide_paper(dv, h, v)
            except Exception:
                crashes += 1
                continue
            inconsistent += (v.unobservable.dim == 0) != (v.status is Status.OBSERVABLE)
            for finding in pd.findings:
                assert isinstance(finding, Finding)
                assert Finding.from_dict(finding.to_dict()) == finding
                assert {"a", "b", "c", "d", "e", "f", "target"} <= set(finding.details)
                kinds[finding.kind] = kinds.get(finding.kind, 0) + 1
                unexplained += finding.kind not in AMBIGUITY_KINDS
    ok = crashes == 0 and inconsistent == 0 and unexplained == 0 and "invertible_b_formulations" in kinds
    record(
        9,
        ok,
        f"{points} points, crashes {crashes}, inconsistent verdicts {inconsistent}, findings {dict(sorted(kinds.items()))}",
    )
    assert ok
