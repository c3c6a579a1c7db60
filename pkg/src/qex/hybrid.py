"""Hybrid analysis: a classical prefix feeding value domains into a quantum suffix.

The prefix (which holds every pointer statement) is analyzed either by exhaustive
enumeration, which yields the joint tuples of the suffix inputs and so keeps their
dependencies, or by interval analysis, which yields one independent interval per
input.  The suffix is synthesized and simulated from that initial state.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .amplify import SearchStats, required_L, search
from .classical.domain import Domain, DomainLike, InputDomain, ValueDistribution, as_domain
from .classical.interp import DEFAULT_CAP, enumerate_program, interpret, joint_inputs
from .classical.intervals import interval_analyze
from .classical.split import index_at_line, observables, split
from .lang import ast as A
from .lang.check import unroll
from .report import ApproxReport, compare
from .sim import Distribution, SparseState
from .synth import SynthOptions, SynthResult, synthesize

BACKENDS = ("enumerate", "interval")


class HybridError(ValueError):
    pass


def _has_pointer(s) -> bool:
    if isinstance(s, A.POINTER_STMTS):
        return True
    if isinstance(s, (A.If, A.While, A.Block)):
        blocks = (s.then, s.orelse) if isinstance(s, A.If) else (s.body,) if isinstance(s, A.While) else (s,)
        return any(isinstance(t, A.POINTER_STMTS) for b in blocks for t in A.walk_stmts(b))
    return False


def min_split(p: A.Program) -> int:
    """Smallest top-level index after the last statement that touches a pointer."""
    last = -1
    for i, s in enumerate(p.body.stmts):
        if _has_pointer(s):
            last = i
    return last + 1


@dataclass
class HybridPlan:
    split: int
    prefix_backend: str = "enumerate"
    delta: float = 0.1
    target: Optional[str] = None

    def __post_init__(self):
        if self.prefix_backend not in BACKENDS:
            raise HybridError(f"unknown prefix backend {self.prefix_backend!r}")

    def to_json(self) -> dict:
        out = {"split": self.split, "prefix_backend": self.prefix_backend, "delta": self.delta}
        if self.target is not None:
            out["target"] = self.target
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "HybridPlan":
        return cls(int(obj["split"]), obj.get("prefix_backend", "enumerate"),
                   float(obj.get("delta", 0.1)), obj.get("target"))

    @classmethod
    def load(cls, path) -> "HybridPlan":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def plan(p: A.Program, dom: DomainLike = None, m: int = 3, split_at: Optional[int] = None,
         split_line: Optional[int] = None, backend: Optional[str] = None, cap: int = DEFAULT_CAP,
         delta: float = 0.1, target: Optional[str] = None) -> HybridPlan:
    """Choose the split point and the prefix backend.

    The split defaults to just after the last pointer statement; ``split_at`` (a
    statement index) or ``split_line`` (a source line) override it.  The backend
    defaults to enumeration unless the input space exceeds ``cap``.
    """
    need = min_split(p)
    if split_line is not None:
        split_at = index_at_line(p, split_line)
    point = need if split_at is None else split_at
    if point < need:
        raise HybridError(f"pointer statement at top-level index {need - 1} lies after split point {point}")
    if backend is None:
        backend = "enumerate" if as_domain(dom).size(p.inputs, m) <= cap else "interval"
    return HybridPlan(point, backend, delta, target)


@dataclass
class BoundN:
    domains: InputDomain
    n_refined: int
    n_full: int
    reachable: bool = True

    def required_L(self, delta: float, M: int = 1) -> Tuple[int, int]:
        """Iteration counts with the refined and the unrefined worst-case p0 bounds."""
        return required_L(delta, M / self.n_refined), required_L(delta, M / self.n_full)

    def to_json(self) -> dict:
        return {"domains": self.domains.to_json(), "N": self.n_refined, "N_full": self.n_full,
                "reachable": self.reachable}


def bound_N(p: A.Program, dom: DomainLike = None, m: int = 3, split_at: Optional[int] = None) -> BoundN:
    """Interval-refined domains of the suffix inputs and the refined search-space size."""
    point = min_split(p) if split_at is None else split_at
    prefix, suffix = split(p, point)
    env = interval_analyze(prefix, dom, m)
    top = (1 << (m + 1)) - 1
    n_full = (top + 1) ** len(suffix.inputs)
    if not env.reachable:
        return BoundN(InputDomain(), 0, n_full, False)
    doms = InputDomain()
    n = 1
    for name in suffix.inputs:
        lo, hi = env.get(name, (0, 0))
        lo, hi = max(lo, 0), min(hi, top)
        doms[name] = Domain.interval(lo, hi)
        n *= hi - lo + 1
    return BoundN(doms, n, n_full)


@dataclass
class HybridResult:
    plan: HybridPlan
    prefix: A.Program
    suffix: A.Program
    synth: SynthResult
    state: SparseState
    target: str
    distribution: Distribution
    report: ApproxReport
    N: int
    joint_counts: Optional[Counter] = None
    stats: Optional[SearchStats] = None

    def values(self) -> set:
        return self.distribution.support()

    def to_json(self) -> dict:
        out = {"plan": self.plan.to_json(), "suffix_inputs": list(self.suffix.inputs),
               "target": self.target, "N": self.N,
               "distribution": self.distribution.to_json(),
               "report": self.report.to_json()}
        if self.stats is not None:
            out["search"] = self.stats.to_json()
        return out


def _target(p: A.Program, target: Optional[str]) -> str:
    if target is not None:
        return target
    obs = observables(p)
    if A.RETURN in obs:
        return A.RETURN
    raise HybridError("program has no return value; name the variable to observe")


def run_hybrid(p: A.Program, dom: DomainLike = None, hp: Optional[HybridPlan] = None,
               opts: Optional[SynthOptions] = None, var: Optional[str] = None,
               cap: int = DEFAULT_CAP, shots: int = 0, seed: Optional[int] = None) -> HybridResult:
    """Analyze the prefix classically, the suffix quantumly, and rate the result.

    The ground truth is the full program enumerated over ``dom`` (loops bounded by
    the unroll setting, exactly like the suffix circuit).
    """
    opts = opts or SynthOptions()
    m = opts.width
    hp = hp or plan(p, dom, m, cap=cap)
    target = _target(p, var)
    prefix, suffix = split(p, hp.split, observe=[target])
    names = list(suffix.inputs)
    joint = None
    if hp.prefix_backend == "enumerate":
        joint = joint_inputs(prefix, dom, m, names, cap)
        sdom = {n: sorted({t[i] for t in joint}) for i, n in enumerate(names)}
        res = synthesize(suffix, sdom, opts)
        state = res.simulate(tuple(names), joint) if names else res.simulate()
        n_space = len(joint)
    else:
        bn = bound_N(p, dom, m, hp.split)
        if not bn.reachable:
            raise HybridError("the split point is unreachable under interval analysis")
        res = synthesize(suffix, bn.domains, opts)
        state = res.simulate()
        n_space = bn.n_refined
    dist = res.distribution(state, target)
    gt = enumerate_program(unroll(p, opts.unroll), dom, m, [target], cap=cap)[target]
    report = compare(dist, gt)
    stats = None
    if hp.target:
        stats = search(None, None, opts, hp.target, hp.delta, shots, seed,
                       p0_bound=1.0 / n_space, result=res, state=state)
    return HybridResult(hp, prefix, suffix, res, state, target, dist, report, n_space, joint, stats)


def feed_forward(result: SynthResult, state: SparseState, names: Sequence[str],
                 later: A.Program, m: int, targets: Sequence[str]) -> Dict[str, ValueDistribution]:
    """Enumerate ``later`` over the joint values of ``names`` decoded from a quantum state.

    Each decoded tuple is weighted by its probability mass so the classical stage sees
    exactly the value combinations the quantum stage can produce.
    """
    dist = result.joint_distribution(state, names)
    weights = dist.counts if dist.exact else {k: p for k, p in dist.probs.items()}
    per = {t: Counter() for t in targets}
    total = 0
    for tup, w in weights.items():
        env = interpret(later, dict(zip(later.inputs, tup)), m)
        for t in targets:
            per[t][env.values.get(t, 0)] += w
        total += w
    return {t: ValueDistribution(c, total) for t, c in per.items()}
