"""Analysis reports: build, serialise and render."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

import numpy as np

from .catalog import kernel
from .flow import rk4_flow, flow
from .observability import decide_oracle, decide_paper, distinguish, fixed_points, symmetric_grid
from .problem import ProblemSpec


def _sub(space) -> dict | None:
    return None if space is None else space.to_dict()


@dataclass
class Report:
    spec: dict
    fixed_points: dict
    kernel: dict
    unobservable: dict
    oracle: dict
    paper: dict
    findings: list
    witness: dict | None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        names = {f.name for f in fields(cls)}
        missing = names - set(data)
        if missing:
            raise ValueError(f"report is missing {sorted(missing)}")
        return cls(**{k: data[k] for k in names})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def analyze(problem: ProblemSpec) -> Report:
    opts = problem.options
    deriv = problem.derivation
    h = problem.homomorphism.build(seed=opts.seed)

    fp = fixed_points(deriv)
    ker = kernel(h)
    verdict = decide_oracle(deriv, h)
    grid = symmetric_grid(opts.t_max, 2 * opts.samples + 1)
    paper = decide_paper(deriv, h, verdict, grid)

    witness = None
    if verdict.witness is not None:
        p, q = verdict.witness
        witness = {
            "p": list(p),
            "q": list(q),
            "separated_at": distinguish(deriv, h, p, q, opts.t_max, opts.samples, opts.tol),
        }
    return Report(
        spec=problem.to_dict(),
        fixed_points={
            "subspace": fp.subspace.to_dict(),
            "case_label": fp.case_label,
            "case_set": _sub(fp.case_set),
        },
        kernel={"subspace": ker.subspace.to_dict(), "label": ker.label},
        unobservable=verdict.unobservable.to_dict(),
        oracle={
            "status": verdict.status.value,
            "dim_I": verdict.unobservable.dim,
            "fix_cap_kernel": verdict.fix_cap_kernel.to_dict(),
            "fragile": verdict.fragile,
        },
        paper={
            "status": None if paper.status is None else paper.status.value,
            "covered": paper.covered,
            "rule": paper.rule,
        },
        findings=[f.to_dict() for f in paper.findings],
        witness=witness,
    )


def _num(v) -> str:
    # full repr so the text and JSON renderings carry the same numbers
    return repr(float(v))


def _vec(v) -> str:
    return "(" + ", ".join(_num(x) for x in v) + ")"


def _space(d: dict | None) -> str:
    if d is None:
        return "n/a"
    if d["dim"] == 0:
        return "{0}"
    return f"dim {d['dim']} span " + ", ".join(_vec(b) for b in d["basis"])


def render_text(report: Report) -> str:
    s = report.spec
    der = s["derivation"]
    hom = s["homomorphism"]
    lines = [
        "derivation   " + " ".join(f"{k}={_num(der[k])}" for k in "abcdef"),
        f"homomorphism {hom['target']} coefficients {_vec(hom['coefficients'])}"
        + (f" a_hat={_num(hom['a_hat'])} b_hat={_num(hom['b_hat'])}" if "a_hat" in hom else ""),
        "options      " + " ".join(f"{k}={_num(v)}" for k, v in sorted(s["options"].items())),
        "",
        f"Fix          {_space(report.fixed_points['subspace'])}",
        f"  case       {report.fixed_points['case_label']}",
        f"  case set   {_space(report.fixed_points['case_set'])}",
        f"K = ker h    {_space(report.kernel['subspace'])}  [{report.kernel['label']}]",
        f"I            {_space(report.unobservable)}",
        f"Fix & K      {_space(report.oracle['fix_cap_kernel'])}",
        "",
        f"oracle       {report.oracle['status']} (dim I = {report.oracle['dim_I']})"
        + ("  WARNING: rank decision near tolerance" if report.oracle["fragile"] else ""),
    ]
    paper = report.paper
    if paper["covered"]:
        lines.append(f"case rules   {paper['status']} via {paper['rule']}")
    else:
        lines.append("case rules   not covered by a published condition")
    if report.witness is not None:
        w = report.witness
        sep = "never separated" if w["separated_at"] is None else f"separated at t={_num(w['separated_at'])}"
        lines.append(f"witness      p={_vec(w['p'])} q={_vec(w['q'])} ({sep})")
    for f in report.findings:
        lines.append(f"finding      [{f['kind']}] {f['message']}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FlowComparison:
    t: float
    point: tuple[float, float, float]
    closed_form: tuple[float, float, float]
    rk4: tuple[float, float, float]
    steps: int

    @property
    def max_diff(self) -> float:
        return float(np.max(np.abs(np.subtract(self.closed_form, self.rk4))))


def compare_flow(problem: ProblemSpec, t: float, point, steps: int | None = None) -> FlowComparison:
    steps = problem.options.steps if steps is None else steps
    closed = flow(problem.derivation, t, point)
    numeric = rk4_flow(problem.derivation, t, point, steps)
    return FlowComparison(float(t), tuple(map(float, point)), tuple(closed), tuple(numeric), steps)


def render_flow(cmp: FlowComparison) -> str:
    return (
        f"t            {_num(cmp.t)}\n"
        f"start        {_vec(cmp.point)}\n"
        f"closed form  {_vec(cmp.closed_form)}\n"
        f"rk4 ({cmp.steps} steps) {_vec(cmp.rk4)}\n"
        f"max diff     {cmp.max_diff:.3e}\n"
    )
