"""Non-relational interval analysis over the ``m + 1``-bit value range.

Transfer functions are exact on intervals when the result stays inside
``[0, 2^(m+1) - 1]``; anything that may wrap goes to the clamped top, which keeps
the analysis sound with respect to :mod:`qex.classical.interp`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Tuple

from ..lang import ast as A
from .domain import DomainLike, as_domain
from .interp import cell_of

WIDEN_AFTER = 3

Interval = Optional[Tuple[int, int]]  # None is bottom


def join(a: Interval, b: Interval) -> Interval:
    if a is None:
        return b
    if b is None:
        return a
    return (min(a[0], b[0]), max(a[1], b[1]))


def meet(a: Interval, b: Interval) -> Interval:
    if a is None or b is None:
        return None
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    return (lo, hi) if lo <= hi else None


def size(a: Interval) -> int:
    return 0 if a is None else a[1] - a[0] + 1


class Arith:
    """Interval transfer functions for one bit width."""

    def __init__(self, m: int):
        self.top_value = (1 << (m + 1)) - 1
        self.top = (0, self.top_value)

    def fit(self, lo: int, hi: int) -> Tuple[int, int]:
        if lo < 0 or hi > self.top_value:
            return self.top
        return (lo, hi)

    def binop(self, op: str, a: Interval, b: Interval) -> Interval:
        if a is None or b is None:
            return None
        if op == "+":
            return self.fit(a[0] + b[0], a[1] + b[1])
        if op == "-":
            return self.fit(a[0] - b[1], a[1] - b[0])
        if op == "*":
            return self.fit(a[0] * b[0], a[1] * b[1])
        # floor division with x/0 = 0
        if b[1] == 0:
            return (0, 0)
        lo = a[0] // b[1]
        hi = a[1] // max(b[0], 1)
        if b[0] == 0:
            lo = 0
        return (lo, hi)


@dataclass
class IntervalEnv:
    """Final abstract state: one interval per variable (``None`` = unreachable)."""
    values: Dict[str, Interval] = field(default_factory=dict)
    points_to: Dict[str, FrozenSet[str]] = field(default_factory=dict)
    reachable: bool = True

    def __getitem__(self, name: str) -> Interval:
        return self.values[name]

    def get(self, name: str, default=None):
        return self.values.get(name, default)

    def copy(self) -> "IntervalEnv":
        return IntervalEnv(dict(self.values), dict(self.points_to), self.reachable)


def _join_env(a: IntervalEnv, b: IntervalEnv) -> IntervalEnv:
    if not a.reachable:
        return b.copy()
    if not b.reachable:
        return a.copy()
    out = IntervalEnv()
    for k in set(a.values) | set(b.values):
        # a name missing on one side holds 0 there
        out.values[k] = join(a.values.get(k, (0, 0)), b.values.get(k, (0, 0)))
    for k in set(a.points_to) | set(b.points_to):
        out.points_to[k] = a.points_to.get(k, frozenset()) | b.points_to.get(k, frozenset())
    return out


class _Analyzer:
    def __init__(self, m: int):
        self.ar = Arith(m)

    def expr(self, e: A.Expr, env: IntervalEnv) -> Interval:
        if isinstance(e, A.Num):
            v = e.value & self.ar.top_value
            return (v, v)
        if isinstance(e, A.Var):
            return env.values.get(e.name, (0, 0))
        return self.ar.binop(e.op, self.expr(e.left, env), self.expr(e.right, env))

    # -- predicate refinement --
    def refine(self, p: A.Pred, env: IntervalEnv, truth: bool) -> IntervalEnv:
        if not env.reachable:
            return env
        if isinstance(p, A.BoolConst):
            return env if p.value == truth else _bottom()
        if isinstance(p, A.Not):
            return self.refine(p.arg, env, not truth)
        if isinstance(p, A.And) and truth or isinstance(p, A.Or) and not truth:
            return self.refine(p.right, self.refine(p.left, env, truth), truth)
        if isinstance(p, (A.And, A.Or)):
            return _join_env(self.refine(p.left, env, truth), self.refine(p.right, env, truth))
        op = p.op if truth else {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}[p.op]
        a, b = self.expr(p.left, env), self.expr(p.right, env)
        if a is None or b is None:
            return _bottom()
        # bounds implied for each side
        if op == "<":
            na, nb = (a[0], min(a[1], b[1] - 1)), (max(b[0], a[0] + 1), b[1])
        elif op == "<=":
            na, nb = (a[0], min(a[1], b[1])), (max(b[0], a[0]), b[1])
        elif op == ">":
            na, nb = (max(a[0], b[0] + 1), a[1]), (b[0], min(b[1], a[1] - 1))
        else:
            na, nb = (max(a[0], b[0]), a[1]), (b[0], min(b[1], a[1]))
        if na[0] > na[1] or nb[0] > nb[1]:
            return _bottom()
        out = env.copy()
        if isinstance(p.left, A.Var):
            out.values[p.left.name] = meet(out.values.get(p.left.name, (0, 0)), na)
        if isinstance(p.right, A.Var):
            out.values[p.right.name] = meet(out.values.get(p.right.name, (0, 0)), nb)
        if any(v is None for v in out.values.values()):
            return _bottom()
        return out

    # -- statements --
    def block(self, block: A.Block, env: IntervalEnv) -> IntervalEnv:
        for s in block:
            env = self.stmt(s, env)
        return env

    def stmt(self, s, env: IntervalEnv) -> IntervalEnv:
        if not env.reachable:
            return env
        if isinstance(s, A.Assign):
            out = env.copy()
            out.values[s.var] = self.expr(s.expr, env)
            return out
        if isinstance(s, A.AddrOf):
            out = env.copy()
            out.points_to[s.var] = frozenset({s.target})
            return out
        if isinstance(s, A.DerefRead):
            out = env.copy()
            val = None
            for t in env.points_to.get(s.pointer, frozenset()):
                val = join(val, env.values.get(t, (0, 0)))
            out.values[s.var] = val if val is not None else self.ar.top
            return out
        if isinstance(s, A.DerefWrite):
            out = env.copy()
            v = self.expr(s.expr, env)
            targets = env.points_to.get(s.pointer, frozenset())
            if len(targets) == 1:
                (t,) = targets
                out.values[t] = v
            else:
                for t in targets:
                    out.values[t] = join(env.values.get(t, (0, 0)), v)
            return out
        if isinstance(s, A.If):
            t = self.block(s.then, self.refine(s.pred, env, True))
            f = self.block(s.orelse, self.refine(s.pred, env, False))
            return _join_env(t, f)
        if isinstance(s, A.While):
            return self.loop(s, env)
        if isinstance(s, A.Block):
            return self.block(s, env)
        raise TypeError(s)

    def loop(self, s: A.While, env: IntervalEnv) -> IntervalEnv:
        head = env
        unstable = 0
        while True:
            body_out = self.block(s.body, self.refine(s.pred, head, True))
            nxt = _join_env(env, body_out)
            if _same(nxt, head):
                break
            unstable += 1
            if unstable >= WIDEN_AFTER:
                nxt = self.widen(head, nxt)
                if _same(nxt, head):
                    break
            head = nxt
        return self.refine(s.pred, head, False)

    def widen(self, old: IntervalEnv, new: IntervalEnv) -> IntervalEnv:
        out = new.copy()
        for k, v in new.values.items():
            if old.values.get(k) != v:
                out.values[k] = self.ar.top
        return out


def _bottom() -> IntervalEnv:
    return IntervalEnv(reachable=False)


def _same(a: IntervalEnv, b: IntervalEnv) -> bool:
    return a.reachable == b.reachable and a.values == b.values and a.points_to == b.points_to


def initial_intervals(p: A.Program, dom: DomainLike, m: int) -> IntervalEnv:
    dom = as_domain(dom)
    env = IntervalEnv()
    for name in p.inputs:
        d = dom.get_domain(name)
        d.check(m)
        env.values[name] = d.hull(m)
    for name in p.pointer_params:
        env.points_to[name] = frozenset({cell_of(name)})
        env.values[cell_of(name)] = (0, 0)
    # locals read 0 until assigned
    for name in sorted(A.assigned_vars(p.body) - set(env.values)):
        env.values[name] = (0, 0)
    return env


def interval_analyze(p: A.Program, dom: DomainLike = None, m: int = 3) -> IntervalEnv:
    """Final interval per variable (and ``return``) after running ``p`` abstractly."""
    an = _Analyzer(m)
    env = an.block(p.body, initial_intervals(p, dom, m))
    if p.ret is not None and env.reachable:
        env.values[A.RETURN] = an.expr(p.ret, env)
    return env
