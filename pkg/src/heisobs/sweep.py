"""Deterministic parameter sweeps over derivations and homomorphisms.

A sweep file::

    {
      "ranges": {"a": [-1, 0, 1], "d": {"start": -1, "stop": 1, "num": 3}, "e": 1},
      "homomorphisms": [{"target": "H1", "coefficients": [1, 0, 0, 1]}],
      "options": {"seed": 0}
    }

Each range is a list of values, a ``linspace`` object or a single number;
omitted parameters are held at 0. Points are visited homomorphism-major,
then ``a`` through ``f`` in lexicographic order.
"""

from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .flow import Derivation
from .observability import Finding, decide_oracle, decide_paper, symmetric_grid
from .problem import (
    GRID_CAP,
    HomomorphismSpec,
    Options,
    SpecParseError,
    SpecValidationError,
    _number,
    _object,
    parse_homomorphism,
    parse_options,
)

CSV_HEADER = (
    "a", "b", "c", "d", "e", "f", "target",
    "verdict_oracle", "verdict_paper", "covered", "dim_I", "dim_fix_cap_K",
)


@dataclass(frozen=True)
class SweepSpec:
    ranges: dict[str, tuple[float, ...]]
    homomorphisms: tuple[HomomorphismSpec, ...]
    options: Options = field(default_factory=Options)

    @property
    def size(self) -> int:
        n = len(self.homomorphisms)
        for name in "abcdef":
            n *= len(self.ranges[name])
        return n

    def points(self):
        axes = [self.ranges[name] for name in "abcdef"]
        for hom in self.homomorphisms:
            for params in itertools.product(*axes):
                yield params, hom


def _parse_range(value, name: str) -> tuple[float, ...]:
    if isinstance(value, list):
        return tuple(_number(v, f"ranges.{name}") for v in value)
    if isinstance(value, dict):
        if set(value) != {"start", "stop", "num"}:
            raise SpecParseError(f"ranges.{name}: linspace needs start, stop, num")
        num = value["num"]
        if isinstance(num, bool) or not isinstance(num, int) or num < 0:
            raise SpecParseError(f"ranges.{name}.num: expected a non-negative integer")
        start = _number(value["start"], f"ranges.{name}.start")
        stop = _number(value["stop"], f"ranges.{name}.stop")
        return tuple(float(v) for v in np.linspace(start, stop, num))
    return (_number(value, f"ranges.{name}"),)


def parse_sweep(data) -> SweepSpec:
    data = _object(data, "sweep")
    unknown = set(data) - {"ranges", "homomorphisms", "homomorphism", "options"}
    if unknown:
        raise SpecParseError(f"unknown top-level keys {sorted(unknown)}")
    ranges_in = _object(data.get("ranges", {}), "ranges")
    bad = set(ranges_in) - set("abcdef")
    if bad:
        raise SpecParseError(f"ranges: unknown keys {sorted(bad)}")
    ranges = {name: _parse_range(ranges_in.get(name, 0.0), name) for name in "abcdef"}
    for name, values in ranges.items():
        if not all(np.isfinite(values)):
            raise SpecValidationError(f"ranges.{name}: values must be finite")
    if "homomorphisms" in data:
        homs = data["homomorphisms"]
        if not isinstance(homs, list):
            raise SpecParseError("homomorphisms: expected a list")
    elif "homomorphism" in data:
        homs = [data["homomorphism"]]
    else:
        raise SpecParseError("sweep needs 'homomorphisms'")
    spec = SweepSpec(ranges, tuple(parse_homomorphism(h) for h in homs), parse_options(data.get("options")))
    if spec.size > GRID_CAP:
        raise SpecValidationError(f"grid has {spec.size} points, cap is {GRID_CAP}")
    return spec


@dataclass(frozen=True)
class SweepRow:
    params: tuple[float, ...]
    target: str
    verdict_oracle: str
    verdict_paper: str
    covered: bool
    dim_I: int
    dim_fix_cap_K: int
    findings: tuple[Finding, ...]

    def csv_fields(self) -> list:
        return [
            *(repr(p) for p in self.params),
            self.target,
            self.verdict_oracle,
            self.verdict_paper,
            "true" if self.covered else "false",
            self.dim_I,
            self.dim_fix_cap_K,
        ]


@lru_cache(maxsize=256)
def _built(hom: HomomorphismSpec, seed: int):
    return hom.build(seed=seed)


def evaluate_point(params, hom: HomomorphismSpec, options: Options = Options()) -> SweepRow:
    deriv = Derivation(*params)
    h = _built(hom, options.seed)
    verdict = decide_oracle(deriv, h)
    grid = symmetric_grid(options.t_max, 2 * options.samples + 1)
    paper = decide_paper(deriv, h, verdict, grid)
    return SweepRow(
        tuple(params),
        hom.label(),
        verdict.status.value,
        "" if paper.status is None else paper.status.value,
        paper.covered,
        verdict.unobservable.dim,
        verdict.fix_cap_kernel.dim,
        paper.findings,
    )


def _evaluate(args) -> SweepRow:
    return evaluate_point(*args)


@dataclass
class SweepResult:
    rows: list[SweepRow]

    def summary(self) -> dict:
        oracle = Counter(r.verdict_oracle for r in self.rows)
        paper = Counter(r.verdict_paper or "not covered" for r in self.rows)
        kinds = Counter(f.kind for r in self.rows for f in r.findings)
        covered = [r for r in self.rows if r.covered]
        agree = sum(r.verdict_paper == r.verdict_oracle for r in covered)
        return {
            "points": len(self.rows),
            "oracle": dict(sorted(oracle.items())),
            "paper": dict(sorted(paper.items())),
            "covered": len(covered),
            "covered_agree": agree,
            "findings": dict(sorted(kinds.items())),
        }

    @property
    def discrepancies(self) -> list[Finding]:
        return [f for r in self.rows for f in r.findings]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(row.csv_fields())
        return buf.getvalue()


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate every grid point; output order never depends on ``jobs``."""
    work = [(params, hom, spec.options) for params, hom in spec.points()]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_evaluate, work, chunksize=max(1, len(work) // (8 * jobs))))
    else:
        rows = [_evaluate(w) for w in work]
    return SweepResult(rows)
