"""Concrete interpreter and exhaustive enumerator (the brute-force oracle).

Values are unsigned ``m + 1``-bit integers: ``m`` value bits plus one overflow bit.
Arithmetic wraps modulo ``2**(m + 1)``, ``x / 0`` is 0, and a variable that is
assigned somewhere in the program but not on the executed path reads as 0 (the
same convention as a freshly allocated all-zero register).
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..lang import ast as A
from .domain import DomainLike, ValueDistribution, as_domain

STEP_LIMIT = 10 ** 6
DEFAULT_CAP = 1 << 24


class InterpError(RuntimeError):
    def __init__(self, message: str, inputs: Optional[Mapping[str, int]] = None):
        self.inputs = dict(inputs) if inputs else None
        if inputs:
            message = f"{message} (inputs {self.inputs})"
        super().__init__(message)


class CapExceeded(InterpError):
    pass


def cell_of(pointer_param: str) -> str:
    """Name of the anonymous cell an ``int*`` parameter points to."""
    return f"*{pointer_param}"


@dataclass
class ConcreteEnv:
    values: Dict[str, int] = field(default_factory=dict)
    pointers: Dict[str, str] = field(default_factory=dict)

    def __getitem__(self, name: str) -> int:
        return self.values[name]

    def get(self, name, default=None):
        return self.values.get(name, default)


def eval_expr(e: A.Expr, read, mask: int) -> int:
    if isinstance(e, A.Num):
        return e.value & mask
    if isinstance(e, A.Var):
        return read(e.name)
    a = eval_expr(e.left, read, mask)
    b = eval_expr(e.right, read, mask)
    if e.op == "+":
        return (a + b) & mask
    if e.op == "-":
        return (a - b) & mask
    if e.op == "*":
        return (a * b) & mask
    return a // b if b else 0


def eval_pred(p: A.Pred, read, mask: int) -> bool:
    if isinstance(p, A.BoolConst):
        return p.value
    if isinstance(p, A.Not):
        return not eval_pred(p.arg, read, mask)
    if isinstance(p, A.And):
        return eval_pred(p.left, read, mask) and eval_pred(p.right, read, mask)
    if isinstance(p, A.Or):
        return eval_pred(p.left, read, mask) or eval_pred(p.right, read, mask)
    a = eval_expr(p.left, read, mask)
    b = eval_expr(p.right, read, mask)
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[p.op]


class _Machine:
    def __init__(self, p: A.Program, m: int, step_limit: int):
        self.p = p
        self.mask = (1 << (m + 1)) - 1
        self.known = A.program_vars(p)
        self.steps = 0
        self.step_limit = step_limit

    def run(self, env: ConcreteEnv) -> ConcreteEnv:
        self.env = env
        self.block(self.p.body)
        if self.p.ret is not None:
            env.values[A.RETURN] = eval_expr(self.p.ret, self.read, self.mask)
        return env

    def read(self, name: str) -> int:
        v = self.env.values.get(name)
        if v is None:
            if name in self.known or name.startswith("*"):
                return 0
            raise InterpError(f"unbound variable {name!r}")
        return v

    def deref(self, ptr: str) -> str:
        target = self.env.pointers.get(ptr)
        if target is None:
            raise InterpError(f"dereference of unbound pointer {ptr!r}")
        return target

    def block(self, block: A.Block) -> None:
        for s in block:
            self.stmt(s)

    def stmt(self, s) -> None:
        env = self.env
        if isinstance(s, A.Assign):
            env.values[s.var] = eval_expr(s.expr, self.read, self.mask)
        elif isinstance(s, A.If):
            self.block(s.then if eval_pred(s.pred, self.read, self.mask) else s.orelse)
        elif isinstance(s, A.While):
            while eval_pred(s.pred, self.read, self.mask):
                self.steps += 1
                if self.steps > self.step_limit:
                    raise InterpError(f"loop exceeded {self.step_limit} steps")
                self.block(s.body)
        elif isinstance(s, A.AddrOf):
            env.pointers[s.var] = s.target
        elif isinstance(s, A.DerefRead):
            env.values[s.var] = self.read(self.deref(s.pointer))
        elif isinstance(s, A.DerefWrite):
            env.values[self.deref(s.pointer)] = eval_expr(s.expr, self.read, self.mask)
        elif isinstance(s, A.Block):
            self.block(s)
        else:
            raise TypeError(s)


def initial_env(p: A.Program, inputs: Mapping[str, int]) -> ConcreteEnv:
    env = ConcreteEnv()
    for name in p.inputs:
        if name not in inputs:
            raise InterpError(f"input {name!r} not bound")
        env.values[name] = int(inputs[name])
    for name in p.pointer_params:
        env.pointers[name] = cell_of(name)
    return env


def interpret(p: A.Program, inputs: Mapping[str, int], m: int = 3,
              step_limit: int = STEP_LIMIT) -> ConcreteEnv:
    """Run ``p`` on one concrete input binding and return the final environment."""
    env = initial_env(p, inputs)
    mask = (1 << (m + 1)) - 1
    for name, v in env.values.items():
        if v < 0 or v > mask:
            raise InterpError(f"input {name}={v} outside the {m + 1}-bit range")
    try:
        return _Machine(p, m, step_limit).run(env)
    except InterpError as exc:
        if exc.inputs is None:
            raise InterpError(str(exc), inputs) from None
        raise


@dataclass
class Enumeration:
    """Result of :func:`enumerate_program`."""
    per_target: Dict[str, ValueDistribution]
    joint: Optional[ValueDistribution]
    targets: Tuple[str, ...]
    total: int

    def __getitem__(self, target: str) -> ValueDistribution:
        return self.per_target[target]


def input_tuples(p: A.Program, dom: DomainLike, m: int, cap: int = DEFAULT_CAP):
    dom = as_domain(dom)
    resolved = dom.resolved(p.inputs, m)
    total = 1
    for vals in resolved.values():
        total *= len(vals)
    if total > cap:
        raise CapExceeded(f"input space of {total} tuples exceeds cap {cap}")
    names = list(p.inputs)
    return names, itertools.product(*(resolved[n] for n in names)), total


def enumerate_program(p: A.Program, dom: DomainLike = None, m: int = 3,
                      targets: Sequence[str] = (), joint: bool = False,
                      cap: int = DEFAULT_CAP) -> Enumeration:
    """Exact per-target value counts over every input tuple of ``dom``."""
    names, tuples, total = input_tuples(p, dom, m, cap)
    targets = tuple(targets)
    per = {t: Counter() for t in targets}
    jc: Counter = Counter()
    known = A.program_vars(p)
    for t in targets:
        if t not in known:
            raise InterpError(f"unknown target variable {t!r}")
    for tup in tuples:
        env = interpret(p, dict(zip(names, tup)), m)
        vals = tuple(env.values.get(t, 0) for t in targets)
        for t, v in zip(targets, vals):
            per[t][v] += 1
        if joint:
            jc[vals] += 1
    dists = {t: ValueDistribution(Counter(dict(sorted(c.items()))), total) for t, c in per.items()}
    jd = ValueDistribution(Counter(dict(sorted(jc.items()))), total) if joint else None
    return Enumeration(dists, jd, targets, total)


def joint_inputs(p: A.Program, dom: DomainLike, m: int, names: Sequence[str],
                 cap: int = DEFAULT_CAP) -> Counter:
    """Counts of the joint values of ``names`` after running ``p`` on every input tuple."""
    in_names, tuples, _ = input_tuples(p, dom, m, cap)
    out: Counter = Counter()
    for tup in tuples:
        env = interpret(p, dict(zip(in_names, tup)), m)
        out[tuple(env.values.get(n, 0) for n in names)] += 1
    return Counter(dict(sorted(out.items())))
