"""Approximation rates and the per-operation resource cost model."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple, Union

from .circuit import Circuit, depth, gate_count


class ReportError(ValueError):
    pass


# -- over / under approximation ----------------------------------------------

def _values(x) -> set:
    """Value set of a set, a mapping (keys with non-zero weight) or a distribution."""
    if hasattr(x, "support"):
        return set(x.support())
    if isinstance(x, Mapping):
        return {k for k, v in x.items() if v}
    return set(x)


def _pct(r: Fraction) -> float:
    return round(float(r) * 100, 1)


@dataclass(frozen=True)
class ApproxReport:
    gt: frozenset
    analysis: frozenset

    @property
    def fp(self) -> frozenset:
        return self.analysis - self.gt

    @property
    def fn(self) -> frozenset:
        return self.gt - self.analysis

    @property
    def over_rate(self) -> Fraction:
        return Fraction(len(self.fp) + len(self.gt), len(self.gt))

    @property
    def under_rate(self) -> Fraction:
        return Fraction(len(self.fn), len(self.gt))

    @property
    def over_pct(self) -> float:
        return _pct(self.over_rate)

    @property
    def under_pct(self) -> float:
        return _pct(self.under_rate)

    def to_json(self) -> dict:
        return {"gt": sorted(self.gt), "analysis": sorted(self.analysis),
                "fp": sorted(self.fp), "fn": sorted(self.fn),
                "over_rate_pct": self.over_pct, "under_rate_pct": self.under_pct}

    def __str__(self) -> str:
        return f"over {self.over_pct:.1f}%  under {self.under_pct:.1f}%"


def compare(analysis, oracle) -> ApproxReport:
    """Rates of an analysis' value set against the oracle's ground truth."""
    gt = frozenset(_values(oracle))
    if not gt:
        raise ReportError("ground truth is empty")
    return ApproxReport(gt, frozenset(_values(analysis)))


# -- cost model --------------------------------------------------------------

Form = Callable[[int], int]

# per-operation (gates, depth) closed forms in the register width n
COST_MODEL: Dict[str, Tuple[Form, Form]] = {
    "add": (lambda n: 3 * n * (n + 1) // 2, lambda n: 5 * n - 2),
    "sub": (lambda n: 3 * n * (n + 1) // 2, lambda n: 5 * n - 2),
    "mul": (lambda n: (11 * n ** 3 - 16 * n ** 2 + 5 * n) // 2,
            lambda n: (11 * n ** 3 - 18 * n ** 2 + 9 * n) // 2),
    "div": (lambda n: n * (28 * n ** 2 + 4 * n + 4), lambda n: 22 * n ** 3 + 3 * n ** 2 + 6 * n + 1),
    "if_else": (lambda n: 9 * n * (n + 1) + 1, lambda n: 10 * n - 3),
}
# a relation compiles to one adder or subtractor
CHARGED_AS = {"add": "add", "sub": "sub", "mul": "mul", "div": "div", "if_else": "if_else",
              "cmp": "add"}
# width-linear register copies, outside the model
UNMODELED = ("copy", "const")
# provenance kinds attributed to the modeled rows
MODELED_KINDS = {"add", "sub", "mul", "div", "cmp", "uncompute", "branch", "merge", "loop"}


def cost(op: str, n: int) -> Tuple[int, int]:
    """(gates, depth) of one operation at width ``n``."""
    if n < 1:
        raise ReportError("width must be at least 1")
    try:
        g, d = COST_MODEL[CHARGED_AS[op]]
    except KeyError:
        raise ReportError(f"unknown operation kind {op!r}") from None
    return g(n), d(n)


@dataclass
class ResourceEstimate:
    n: int
    tally: Dict[str, int]
    gates: int
    depth: int
    per_op: Dict[str, Tuple[int, int]] = field(default_factory=dict)
    unmodeled: Dict[str, int] = field(default_factory=dict)
    measured: Optional[dict] = None

    def to_json(self) -> dict:
        out = {"n": self.n, "model": {"gates": self.gates, "depth": self.depth},
               "tally": dict(sorted(self.tally.items())),
               "per_op": {k: {"gates": g, "depth": d} for k, (g, d) in sorted(self.per_op.items())}}
        if self.unmodeled:
            out["unmodeled"] = dict(sorted(self.unmodeled.items()))
        if self.measured is not None:
            out["measured"] = self.measured
        return out


def measure(c: Circuit) -> dict:
    """Gates, depth, qubits and the share of gates attributed to modeled operations."""
    total = len(c.gates)
    kinds = Counter((g.src or "").rsplit(":", 1)[-1] for g in c.gates)
    modeled = sum(v for k, v in kinds.items() if k in MODELED_KINDS)
    return {"gates": gate_count(c)["total"], "depth": depth(c), "qubits": c.n_qubits,
            "modeled_share": round(modeled / total, 4) if total else 1.0,
            "by_kind": dict(sorted(kinds.items()))}


def estimate(tally: Mapping[str, int], n: int, circuit: Optional[Circuit] = None) -> ResourceEstimate:
    """Model totals ``sum(tally[op] * form[op](n))``; depth assumes serialized statements."""
    if n < 1:
        raise ReportError("width must be at least 1")
    per_op: Dict[str, Tuple[int, int]] = {}
    unmodeled: Dict[str, int] = {}
    gates = dep = 0
    for op, k in sorted(tally.items()):
        if op in UNMODELED:
            if k:
                unmodeled[op] = k
            continue
        g, d = cost(op, n)
        per_op[op] = (k * g, k * d)
        gates += k * g
        dep += k * d
    return ResourceEstimate(n, dict(tally), gates, dep, per_op, unmodeled,
                            measure(circuit) if circuit is not None else None)


@dataclass
class ScaleReport:
    small: ResourceEstimate
    large: ResourceEstimate
    registers: Optional[int] = None

    @property
    def gates_ratio(self) -> Optional[Fraction]:
        return Fraction(self.large.gates, self.small.gates) if self.small.gates else None

    @property
    def depth_ratio(self) -> Optional[Fraction]:
        return Fraction(self.large.depth, self.small.depth) if self.small.depth else None

    @property
    def qubit_factor(self) -> Fraction:
        """Per-register growth ``(n_to + 1) / (n_from + 1)``."""
        return Fraction(self.large.n + 1, self.small.n + 1)

    def to_json(self) -> dict:
        def frac(x):
            return None if x is None else {"num": x.numerator, "den": x.denominator, "value": float(x)}
        out = {"from": self.small.to_json(), "to": self.large.to_json(),
               "gates_ratio": frac(self.gates_ratio), "depth_ratio": frac(self.depth_ratio),
               "qubit_factor": frac(self.qubit_factor)}
        if self.registers is not None:
            out["qubits"] = {"from": self.registers * (self.small.n + 1),
                             "to": self.registers * (self.large.n + 1)}
        return out


def scale_report(tally: Mapping[str, int], n_from: int = 3, n_to: int = 64,
                 registers: Optional[int] = None) -> ScaleReport:
    """Model totals at two widths side by side; ``registers`` counts (n+1)-qubit registers."""
    return ScaleReport(estimate(tally, n_from), estimate(tally, n_to), registers)
