"""Problem descriptions read from JSON.

A problem file looks like::

    {
      "derivation": {"a": 1, "b": 0, "c": 0, "d": 1, "e": 1, "f": 0},
      "homomorphism": {"target": "H1", "coefficients": [1, 0, 0, 1]},
      "options": {"tol": 1e-9, "t_max": 4.0, "samples": 64, "steps": 1000, "seed": 0}
    }

H8/H9 targets also carry ``"a_hat"`` and ``"b_hat"``. Missing derivation
entries default to 0 and missing options to the values above.

Malformed input raises :class:`SpecParseError`; well-formed input that
violates a constraint raises :class:`SpecValidationError`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .catalog import TAGS, Homomorphism, HomomorphismError, SubgroupId, build_homomorphism
from .flow import Derivation

GRID_CAP = 10**6


class SpecParseError(ValueError):
    pass


class SpecValidationError(ValueError):
    pass


@dataclass(frozen=True)
class Options:
    tol: float = 1e-9
    t_max: float = 4.0
    samples: int = 64
    steps: int = 1000
    seed: int = 0


@dataclass(frozen=True)
class HomomorphismSpec:
    target: str
    coefficients: tuple[float, ...]
    a_hat: float | None = None
    b_hat: float | None = None

    def subgroup(self) -> SubgroupId:
        try:
            return SubgroupId(self.target, self.a_hat, self.b_hat)
        except ValueError as exc:
            raise SpecValidationError(str(exc)) from None

    def build(self, seed: int = 0) -> Homomorphism:
        try:
            return build_homomorphism(self.subgroup(), self.coefficients, seed=seed)
        except HomomorphismError as exc:
            raise SpecValidationError(str(exc)) from None

    def label(self) -> str:
        coeffs = ";".join(f"{c:g}" for c in self.coefficients)
        return f"{self.subgroup()}:{coeffs}"

    def to_dict(self) -> dict:
        out = {"target": self.target, "coefficients": list(self.coefficients)}
        if self.a_hat is not None:
            out["a_hat"] = self.a_hat
            out["b_hat"] = self.b_hat
        return out


@dataclass(frozen=True)
class ProblemSpec:
    derivation: Derivation
    homomorphism: HomomorphismSpec
    options: Options = field(default_factory=Options)

    def to_dict(self) -> dict:
        return {
            "derivation": dict(zip("abcdef", self.derivation.as_tuple())),
            "homomorphism": self.homomorphism.to_dict(),
            "options": asdict(self.options),
        }


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecParseError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _object(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise SpecParseError(f"{where}: expected an object")
    return value


def _finite(value: float, where: str) -> float:
    if not math.isfinite(value):
        raise SpecValidationError(f"{where}: must be finite")
    return value


def parse_derivation(data) -> Derivation:
    data = _object(data, "derivation")
    unknown = set(data) - set("abcdef")
    if unknown:
        raise SpecParseError(f"derivation: unknown keys {sorted(unknown)}")
    values = [_finite(_number(data.get(k, 0.0), f"derivation.{k}"), f"derivation.{k}") for k in "abcdef"]
    return Derivation(*values)


def parse_homomorphism(data) -> HomomorphismSpec:
    data = _object(data, "homomorphism")
    unknown = set(data) - {"target", "coefficients", "a_hat", "b_hat"}
    if unknown:
        raise SpecParseError(f"homomorphism: unknown keys {sorted(unknown)}")
    if "target" not in data or "coefficients" not in data:
        raise SpecParseError("homomorphism: needs 'target' and 'coefficients'")
    target = data["target"]
    if not isinstance(target, str):
        raise SpecParseError("homomorphism.target: expected a string")
    if target not in TAGS:
        raise SpecValidationError(f"homomorphism.target: unknown subgroup {target!r}")
    coeffs = data["coefficients"]
    if not isinstance(coeffs, list):
        raise SpecParseError("homomorphism.coefficients: expected a list")
    coeffs = tuple(_finite(_number(c, "homomorphism.coefficients"), "homomorphism.coefficients") for c in coeffs)
    a_hat = b_hat = None
    if "a_hat" in data or "b_hat" in data:
        a_hat = _number(data.get("a_hat"), "homomorphism.a_hat")
        b_hat = _number(data.get("b_hat"), "homomorphism.b_hat")
    spec = HomomorphismSpec(target, coeffs, a_hat, b_hat)
    spec.subgroup()  # validates a_hat * b_hat != 0
    return spec


def parse_options(data) -> Options:
    if data is None:
        return Options()
    data = _object(data, "options")
    defaults = Options()
    unknown = set(data) - set(asdict(defaults))
    if unknown:
        raise SpecParseError(f"options: unknown keys {sorted(unknown)}")
    tol = _number(data.get("tol", defaults.tol), "options.tol")
    t_max = _number(data.get("t_max", defaults.t_max), "options.t_max")
    ints = {}
    for key in ("samples", "steps", "seed"):
        value = data.get(key, getattr(defaults, key))
        if isinstance(value, bool) or not isinstance(value, int):
            raise SpecParseError(f"options.{key}: expected an integer")
        ints[key] = value
    if not (math.isfinite(tol) and tol > 0):
        raise SpecValidationError("options.tol must be positive")
    if not (math.isfinite(t_max) and t_max > 0):
        raise SpecValidationError("options.t_max must be positive")
    if ints["samples"] < 2:
        raise SpecValidationError("options.samples must be at least 2")
    if ints["steps"] < 1:
        raise SpecValidationError("options.steps must be positive")
    if ints["seed"] < 0:
        raise SpecValidationError("options.seed must be non-negative")
    return Options(tol, t_max, ints["samples"], ints["steps"], ints["seed"])


def parse_problem(data) -> ProblemSpec:
    data = _object(data, "problem")
    unknown = set(data) - {"derivation", "homomorphism", "options"}
    if unknown:
        raise SpecParseError(f"unknown top-level keys {sorted(unknown)}")
    if "derivation" not in data or "homomorphism" not in data:
        raise SpecParseError("problem needs 'derivation' and 'homomorphism'")
    return ProblemSpec(
        parse_derivation(data["derivation"]),
        parse_homomorphism(data["homomorphism"]),
        parse_options(data.get("options")),
    )


def load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{path}: invalid JSON ({exc})") from None


def load_problem(path) -> ProblemSpec:
    return parse_problem(load_json(path))
