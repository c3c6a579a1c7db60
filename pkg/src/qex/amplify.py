"""Fixed-point amplitude amplification over a synthesized program's final state.

The two generalized reflections act at the projector level on the sparse state:
``S_t(b) = I - (1 - e^{ib}) P_t`` marks target basis states and
``S_s(a) = I - (1 - e^{-ia}) |s><s|`` reflects about the prepared state.  Both keep
the state inside the span of ``|s>``'s support, so amplification runs on the
amplitude vector of that support.
"""
from __future__ import annotations

import math
import operator
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .circuit import gate_count
from .classical.domain import DomainLike
from .sim import SparseState, sample
from .synth import SynthOptions, SynthResult, synthesize

MAX_L = 1 << 20


class AmplifyError(ValueError):
    pass


# -- schedule ----------------------------------------------------------------

def _check_delta(delta: float) -> None:
    if not 0 < delta <= 1:
        raise AmplifyError(f"delta must lie in (0, 1], got {delta}")


def gamma(delta: float, L: int) -> float:
    """``1 / T_{1/(2L+1)}(1/delta)``, evaluated with arccosh since ``1/delta >= 1``."""
    _check_delta(delta)
    if L < 0:
        raise AmplifyError("L must be non-negative")
    return 1.0 / math.cosh(math.acosh(1.0 / delta) / (2 * L + 1))


def chebyshev(n: int, x: float) -> float:
    """``T_n(x)`` by the three-term recurrence (valid for any real ``x``)."""
    t0, t1 = 1.0, x
    if n == 0:
        return t0
    for _ in range(n - 1):
        t0, t1 = t1, 2 * x * t1 - t0
    return t1


def coverage(delta: float, L: int) -> float:
    """Smallest initial success probability the schedule is guaranteed to amplify."""
    return 1.0 - gamma(delta, L) ** 2


def required_L(delta: float, p0_bound: float) -> int:
    """Minimal ``L`` with ``1 - gamma(delta, L)**2 <= p0_bound``."""
    _check_delta(delta)
    if not p0_bound > 0:
        raise AmplifyError("p0 lower bound must be positive")
    p0_bound = float(p0_bound)
    L = 0
    while coverage(delta, L) > p0_bound:
        L += 1
        if L > MAX_L:
            raise AmplifyError(f"p0 bound {p0_bound} needs more than {MAX_L} iterations")
    return L


def _arccot(y: float) -> float:
    return math.atan2(1.0, y)


@dataclass(frozen=True)
class Schedule:
    L: int
    delta: float
    gamma: float
    alphas: Tuple[float, ...]
    betas: Tuple[float, ...]

    def to_json(self) -> dict:
        return {"L": self.L, "delta": self.delta, "gamma": self.gamma,
                "alpha": list(self.alphas), "beta": list(self.betas)}


def schedule(delta: float, L: int) -> Schedule:
    """Phases ``alpha_j = 2 arccot(tan(2 pi j / (2L+1)) sqrt(1 - gamma^2))``, ``beta_j = -alpha_{L-j+1}``.

    Equivalently ``beta_{L-j+1} = -2 arccot(tan(2 pi j / (2L+1)) sqrt(1 - gamma^2))`` with
    ``alpha_j = -beta_{L-j+1}``; iteration ``j`` applies ``S_t(beta_j)`` then ``S_s(alpha_j)``.
    """
    g = gamma(delta, L)
    root = math.sqrt(max(0.0, 1.0 - g * g))
    alphas = [2.0 * _arccot(math.tan(2 * math.pi * j / (2 * L + 1)) * root) for j in range(1, L + 1)]
    betas = [-alphas[L - j] for j in range(1, L + 1)]
    return Schedule(L, delta, g, tuple(alphas), tuple(betas))


def grover_iterations(N: int, M: int) -> int:
    """Iteration count of plain Grover search, ``floor(pi/4 * sqrt(N/M))``."""
    if M < 1 or M > N:
        raise AmplifyError("need 1 <= M <= N")
    return math.floor(math.pi / 4 * math.sqrt(N / M))


# -- targets -----------------------------------------------------------------

_OPS = {"==": operator.eq, "!=": operator.ne, "<": operator.lt, "<=": operator.le,
        ">": operator.gt, ">=": operator.ge}
_COND_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(==|!=|<=|>=|<|>)\s*(\d+)\s*$")


@dataclass(frozen=True)
class Condition:
    var: str
    op: str
    value: int

    def holds(self, v) -> np.ndarray:
        return _OPS[self.op](v, self.value)

    def __str__(self) -> str:
        return f"{self.var} {self.op} {self.value}"


@dataclass(frozen=True)
class TargetSpec:
    """Conjunction of ``var op constant`` conditions."""
    conditions: Tuple[Condition, ...]

    @classmethod
    def parse(cls, text: str) -> "TargetSpec":
        parts = re.split(r"\band\b|&&", text)
        conds = []
        for part in parts:
            mt = _COND_RE.match(part)
            if not mt:
                raise AmplifyError(f"cannot read target condition {part.strip()!r} "
                                   f"(expected e.g. 'z == 8')")
            conds.append(Condition(mt.group(1), mt.group(2), int(mt.group(3))))
        return cls(tuple(conds))

    @property
    def vars(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(c.var for c in self.conditions))

    def matches(self, values: Mapping[str, int]) -> bool:
        return all(c.holds(values[c.var]) for c in self.conditions)

    def mask(self, result: SynthResult, state: SparseState) -> np.ndarray:
        """Boolean mask of support rows satisfying every condition."""
        top = 1 << (result.options.width + 1)
        out = np.ones(len(state), dtype=bool)
        for c in self.conditions:
            if c.var not in result.layout:
                raise AmplifyError(f"target variable {c.var!r} has no register in the final layout")
            if c.value >= top:
                raise AmplifyError(f"target constant {c.value} does not fit {top.bit_length() - 1} bits")
            out &= c.holds(state.values(result.layout[c.var]))
        return out

    def __str__(self) -> str:
        return " and ".join(map(str, self.conditions))


# -- amplification -----------------------------------------------------------

def amplify_amplitudes(s: np.ndarray, marked: np.ndarray, sched: Schedule) -> np.ndarray:
    """Apply ``S_s(alpha_j) S_t(beta_j)`` for ``j = 1..L`` starting from ``s``."""
    s = np.asarray(s, dtype=np.complex128)
    state = s.copy()
    for a, b in zip(sched.alphas, sched.betas):
        state = state - (1 - np.exp(1j * b)) * np.where(marked, state, 0)
        state = state - (1 - np.exp(-1j * a)) * np.vdot(s, state) * s
    return state


def amplify_two_level(p0: float, sched: Schedule) -> float:
    """Final success probability from the same reflections on the 2-D span of |t>, |t_perp>."""
    s = np.array([math.sqrt(p0), math.sqrt(1 - p0)], dtype=np.complex128)
    return float(abs(amplify_amplitudes(s, np.array([True, False]), sched)[0]) ** 2)


def success_probability(state: np.ndarray, marked: np.ndarray) -> float:
    return float(np.sum(np.abs(state[marked]) ** 2))


@dataclass
class SearchStats:
    N: int
    M: int
    p0: Union[Fraction, float]
    L: int
    delta: float
    gamma: float
    p_final: float
    queries: int
    query_gates: int = 0
    shots: int = 0
    hits: int = 0
    samples: Dict = field(default_factory=dict)
    note: str = ""

    @property
    def hit_rate(self) -> float:
        return self.hits / self.shots if self.shots else 0.0

    def to_json(self) -> dict:
        p0 = self.p0
        out = {"N": self.N, "M": self.M,
               "p0": {"num": p0.numerator, "den": p0.denominator} if isinstance(p0, Fraction) else p0,
               "L": self.L, "delta": self.delta, "gamma": self.gamma, "p_final": self.p_final,
               "queries": self.queries, "query_gates": self.query_gates,
               "reflection_overhead": "2 generalized reflections per iteration, not counted"}
        if self.shots:
            out.update({"shots": self.shots, "hits": self.hits, "hit_rate": self.hit_rate,
                        "samples": {",".join(map(str, k)) if isinstance(k, tuple) else str(k): v
                                    for k, v in self.samples.items()}})
        if self.note:
            out["note"] = self.note
        return out


def _exact_p0(state: SparseState, marked: np.ndarray) -> Tuple[int, Union[Fraction, float]]:
    p = float(np.sum(np.abs(state.amps[marked]) ** 2))
    if state.den:
        m = round(p * state.den)
        if abs(p * state.den - m) < 1e-6:
            return m, Fraction(m, state.den)
    return -1, p


def amplify(result: SynthResult, target: TargetSpec, sched: Schedule,
            state: Optional[SparseState] = None) -> Tuple[SparseState, SearchStats]:
    """Amplify ``target`` in the final state of ``result`` (simulated unless given)."""
    s = state if state is not None else result.simulate()
    marked = target.mask(result, s)
    M, p0 = _exact_p0(s, marked)
    N = s.den or len(s)
    if M < 0:
        M = int(np.count_nonzero(marked))
    amps = amplify_amplitudes(s.amps, marked, sched)
    out = SparseState(s.n_qubits, s.keys.copy(), amps, None)
    gates = gate_count(result.circuit)["total"]
    stats = SearchStats(N, M, p0, sched.L, sched.delta, sched.gamma,
                        success_probability(amps, marked), sched.L, sched.L * 2 * gates)
    if M == 0:
        stats.note = "no state of interest"
    return out, stats


def search(p, dom: DomainLike = None, opts: Optional[SynthOptions] = None,
           target: Union[str, TargetSpec] = "", delta: float = 0.1, shots: int = 1000,
           seed: Optional[int] = None, p0_bound: Union[float, str, None] = None,
           result: Optional[SynthResult] = None, state: Optional[SparseState] = None) -> SearchStats:
    """Synthesize, simulate, amplify and sample.

    ``p0_bound`` picks the iteration count: a number is used as the lower bound on
    the success probability, ``"exact"`` uses the simulated p0, and ``None`` falls
    back to the worst case ``1/N``.  ``state`` replaces the default simulation of
    ``result`` (e.g. a state prepared from joint input tuples).
    """
    tgt = TargetSpec.parse(target) if isinstance(target, str) else target
    res = result if result is not None else synthesize(p, dom, opts)
    s = state if state is not None else res.simulate()
    marked = tgt.mask(res, s)
    N = s.den or len(s)
    M, p0 = _exact_p0(s, marked)
    if M == 0:
        return SearchStats(N, 0, p0, 0, delta, gamma(delta, 0), 0.0, 0, 0,
                           note="no state of interest")
    if p0_bound is None:
        bound = 1.0 / N
    elif p0_bound == "exact":
        bound = float(p0)
    else:
        bound = float(p0_bound)
    sched = schedule(delta, required_L(delta, bound))
    final, stats = amplify(res, tgt, sched, s)
    if shots:
        regs = [res.layout[v] for v in tgt.vars]
        counts = sample(final, regs, shots, seed)
        stats.shots = shots
        stats.samples = dict(counts)
        stats.hits = sum(c for vals, c in counts.items()
                         if tgt.matches(dict(zip(tgt.vars, vals))))
    return stats
