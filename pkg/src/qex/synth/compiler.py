"""Program to circuit compilation.

Every assignment writes a fresh (write-once) register of ``m + 1`` qubits.  A
branch computes its predicate into a control qubit, compiles each body with every
gate control-lifted by that branch's control, and merges the two sets of
registers at the join.  Immediates and predicate computations are never lifted:
they are pure functions of registers that already exist.

Optional passes (see :class:`SynthOptions`):

* ``uncompute`` appends the inverse of each predicate's scratch computation once
  the control qubit is extracted and returns the scratch qubits to a free pool;
* ``share_immediates`` keeps a single immediate register that X gates morph from
  one constant to the next, and lets the else branch write straight into the
  then branch's destination register (no swap at the join);
* ``parallel_copy`` gives the else branch its own CX copy of every variable both
  branches read, so the two bodies touch disjoint qubits.
"""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..circuit import Circuit, Gate, Register, inverse_gates, x_gate
from ..classical.domain import DomainLike, as_domain
from ..classical.intervals import Arith, join
from ..lang import ast as A
from ..lang.check import unroll_stmts, validate
from ..sim import Distribution, SparseState, init, joint, marginal, run
from . import arith as K

BACKENDS = ("ripple", "fourier")
FLAG_NAMES = {"uncompute": "uncompute", "share": "share_immediates",
              "share_immediates": "share_immediates", "parallel": "parallel_copy",
              "parallel_copy": "parallel_copy"}


class SynthError(RuntimeError):
    pass


@dataclass(frozen=True)
class SynthOptions:
    width: int = 3
    unroll: int = 8
    uncompute: bool = False
    share_immediates: bool = False
    parallel_copy: bool = False
    backend: str = "ripple"
    # compile eligible top-level loops with an iteration counter (constant qubits in k)
    counter_loops: bool = True
    max_qubits: int = 4096

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be at least 1")
        if self.unroll < 0:
            raise ValueError("unroll bound must be non-negative")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown arithmetic backend {self.backend!r}")

    @classmethod
    def from_flags(cls, flags: Iterable[str] = (), **kw) -> "SynthOptions":
        """Options from flag names such as ``"uncompute"``, ``"share"``, ``"parallel"``."""
        for f in flags:
            f = f.strip()
            if not f:
                continue
            if f not in FLAG_NAMES:
                raise ValueError(f"unknown optimization {f!r}")
            kw[FLAG_NAMES[f]] = True
        return cls(**kw)

    @property
    def flags(self) -> Tuple[str, ...]:
        return tuple(n for n, on in (("uncompute", self.uncompute), ("share", self.share_immediates),
                                     ("parallel", self.parallel_copy)) if on)


@dataclass
class BranchInfo:
    src: str
    cq_then: int
    cq_else: int
    scratch: List[Register]
    uncomputed: bool


@dataclass
class LoopInfo:
    src: str
    counter: Register
    flag: int
    iterations: int


@dataclass
class SynthResult:
    circuit: Circuit
    layout: Dict[str, Register]
    history: Dict[str, List[Register]]
    inputs: Dict[str, Register]
    # explicit value sets for inputs prepared at simulation time (None: H in the circuit)
    input_values: Dict[str, Optional[List[int]]]
    tally: Counter
    options: SynthOptions
    program: A.Program
    branches: List[BranchInfo] = field(default_factory=list)
    loops: List[LoopInfo] = field(default_factory=list)
    diagnostics: List[str] = field(default_factory=list)

    @property
    def n_qubits(self) -> int:
        return self.circuit.n_qubits

    def register(self, var: str) -> Register:
        try:
            return self.layout[var]
        except KeyError:
            raise SynthError(f"variable {var!r} has no register in the final layout") from None

    def input_size(self, joint_counts: Optional[Mapping] = None, joint_vars: Sequence[str] = ()) -> int:
        n = 1
        for name, vals in self.input_values.items():
            if name in joint_vars:
                continue
            n *= (1 << self.options.width) if vals is None else len(vals)
        if joint_counts is not None:
            n *= sum(joint_counts.values())
        return n

    def initial_state(self, joint_vars: Sequence[str] = (),
                      joint_counts: Optional[Mapping[tuple, int]] = None) -> SparseState:
        """Zero state with non-full inputs set to their value sets.

        ``joint_vars``/``joint_counts`` prepare several inputs jointly, weighted by the
        tuple counts (used to feed a classical prefix's output into the circuit).
        """
        assign = {}
        for name, vals in self.input_values.items():
            if name in joint_vars:
                continue
            if vals is not None:
                assign[self.inputs[name]] = vals
        groups = []
        if joint_vars:
            for v in joint_vars:
                if self.input_values.get(v, ()) is None:
                    raise SynthError(f"input {v!r} is Hadamard-initialized; give it a set domain")
            groups.append(([self.inputs[v] for v in joint_vars], joint_counts))
        s = init(self.n_qubits, assign, groups)
        s.den = self.input_size(joint_counts if joint_vars else None, joint_vars)
        return s

    def simulate(self, joint_vars: Sequence[str] = (), joint_counts=None,
                 check_norm: bool = False) -> SparseState:
        s = run(self.circuit, self.initial_state(joint_vars, joint_counts), check_norm=check_norm)
        s.den = self.input_size(joint_counts if joint_vars else None, joint_vars)
        return s

    def distribution(self, state: SparseState, var: str) -> Distribution:
        return marginal(state, self.register(var))

    def joint_distribution(self, state: SparseState, vars: Sequence[str]) -> Distribution:
        return joint(state, [self.register(v) for v in vars])

    def sidecar(self) -> dict:
        m = self.options.width
        return {"vars": {v: {"register": list(r.qubits[:m]), "sign": r.qubits[m]}
                         for v, r in sorted(self.layout.items())},
                "tally": dict(sorted(self.tally.items())),
                "diagnostics": list(self.diagnostics)}


# -- compiler ----------------------------------------------------------------

@dataclass(eq=False)
class _Recording:
    entries: list = field(default_factory=list)  # Gate or ("imm", value) markers
    regs: List[Register] = field(default_factory=list)
    imm_before: int = 0


def _reads_block(block: A.Block) -> set:
    out = set()
    for s in A.walk_stmts(block):
        if isinstance(s, A.Assign):
            out |= A.expr_vars(s.expr)
        elif isinstance(s, (A.If, A.While)):
            out |= A.pred_vars(s.pred)
    return out


def _expr_eq(a: A.Expr, b: A.Expr) -> bool:
    return a == b


class _Compiler:
    def __init__(self, p: A.Program, dom, opts: SynthOptions):
        self.p = p
        self.opts = opts
        self.m = opts.width
        self.w = opts.width + 1
        self.mask = (1 << self.w) - 1
        self.ar = Arith(self.m)
        self.dom = as_domain(dom)
        self.c = Circuit()
        self.pool: List[int] = []
        self.cq: Optional[int] = None
        self.src = "init"
        # operation kind recorded in each gate's provenance ("<stmt>:<kind>")
        self.what = "h"
        self.layout: Dict[str, Register] = {}
        self.history: Dict[str, List[Register]] = defaultdict(list)
        self.iv: Dict[str, Tuple[int, int]] = {}
        self.tally: Counter = Counter()
        self.diagnostics: List[str] = []
        self.branches: List[BranchInfo] = []
        self.loops: List[LoopInfo] = []
        self.nonperm = False
        self.recorders: List[_Recording] = []
        self.shared: Optional[Register] = None
        self.shared_value = 0
        self.shared_busy = False
        self.serial_targets: Dict[str, Register] = {}
        # counter loops uncompute every constant, so sharing one register gains nothing there
        self.in_loop = False
        self.pred_recordings: List[_Recording] = []
        self.known = A.program_vars(p)
        self.names = itertools.count()
        self.stmt_ids = itertools.count()
        self._diag_seen: set = set()

    # -- low level --
    def diag(self, msg: str) -> None:
        if msg not in self._diag_seen:
            self._diag_seen.add(msg)
            self.diagnostics.append(msg)

    def emit(self, g: Gate, lift: bool = True) -> None:
        if lift and self.cq is not None:
            g = g.lifted([self.cq])
        g = replace(g, src=f"{self.src}:{self.what}")
        if not g.is_permutation and not self.src.startswith("init"):
            self.nonperm = True
        self.c.append(g)
        for r in self.recorders:
            r.entries.append(g)

    def alloc(self, name: str, width: int, role: str) -> Register:
        take = self.pool[:width]
        del self.pool[:width]
        fresh = width - len(take)
        qubits = tuple(take) + tuple(range(self.c.n_qubits, self.c.n_qubits + fresh))
        self.c.n_qubits += fresh
        if self.c.n_qubits > self.opts.max_qubits:
            raise SynthError(f"register budget exceeded: {self.c.n_qubits} qubits > "
                             f"cap {self.opts.max_qubits}")
        reg = Register(f"{name}#{next(self.names)}", qubits, role)
        self.c.add_register(reg)
        for r in self.recorders:
            r.regs.append(reg)
        return reg

    def release(self, reg: Register) -> None:
        if reg.retired:
            return
        reg.retired = True
        self.pool.extend(reg.qubits)
        self.pool.sort()

    @contextmanager
    def doing(self, what: str):
        saved = self.what
        self.what = what
        try:
            yield
        finally:
            self.what = saved

    @contextmanager
    def unlifted(self):
        saved = self.cq
        self.cq = None
        try:
            yield
        finally:
            self.cq = saved

    @contextmanager
    def recording(self):
        rec = _Recording(imm_before=self.shared_value)
        self.recorders.append(rec)
        try:
            yield rec
        finally:
            self.recorders.remove(rec)

    def invert_recording(self, rec: _Recording, release: bool = True) -> None:
        """Append the inverse of a recorded segment, tracking the shared immediate."""
        markers = [e[1] for e in rec.entries if isinstance(e, tuple)]
        values = [rec.imm_before] + markers
        need = values[-1]
        idx = len(values) - 1
        for e in reversed(rec.entries):
            if isinstance(e, tuple):
                idx -= 1
                need = values[idx]
                continue
            if self.shared is not None and set(e.qubits) & set(self.shared.qubits) and need != self.shared_value:
                self.morph(need)
            inv = replace(e.inverse(), src=f"{self.src}:uncompute")
            self.c.append(inv)
            for r in self.recorders:
                r.entries.append(inv)
        if release:
            for reg in rec.regs:
                if reg is not self.shared:
                    self.release(reg)

    # -- registers and values --
    def set_var(self, name: str, reg: Register) -> None:
        self.layout[name] = reg
        self.history[name].append(reg)

    def read(self, name: str) -> Register:
        reg = self.layout.get(name)
        if reg is not None:
            return reg
        if name not in self.known:
            raise SynthError(f"unbound variable {name!r}")
        # assigned elsewhere but not on this path: a fresh all-zero register reads as 0
        saved, self.recorders = self.recorders, []
        reg = self.alloc(name, self.w, "value")
        self.recorders = saved
        self.iv[reg.name] = (0, 0)
        self.layout[name] = reg
        return reg

    def interval(self, e: A.Expr) -> Tuple[int, int]:
        if isinstance(e, A.Num):
            v = e.value & self.mask
            return (v, v)
        if isinstance(e, A.Var):
            reg = self.layout.get(e.name)
            return (0, 0) if reg is None else self.iv.get(reg.name, (0, self.mask))
        return self.ar.binop(e.op, self.interval(e.left), self.interval(e.right))

    def morph(self, value: int) -> None:
        with self.unlifted():
            saved = self.recorders
            self.recorders = []
            with self.doing("imm"):
                K.prepare_constant(self.emit, self.shared.qubits, value, self.shared_value)
            self.recorders = saved
        self.shared_value = value
        for r in self.recorders:
            r.entries.append(("imm", value))

    def immediate(self, value: int) -> Register:
        value &= self.mask
        if self.opts.share_immediates and not self.shared_busy and not self.in_loop:
            if self.shared is None:
                saved = self.recorders
                self.recorders = []
                self.shared = self.alloc("imm", self.w, "immediate")
                self.recorders = saved
                self.shared_value = 0
            if value != self.shared_value:
                self.morph(value)
            elif self.recorders:
                for r in self.recorders:
                    r.entries.append(("imm", value))
            self.shared_busy = True
            self.iv[self.shared.name] = (value, value)
            return self.shared
        reg = self.alloc("imm", self.w, "immediate")
        with self.unlifted():
            with self.doing("imm"):
                K.prepare_constant(self.emit, reg.qubits, value)
        self.iv[reg.name] = (value, value)
        return reg

    def operand(self, e: A.Expr) -> Register:
        """Register holding ``e``'s value (existing for variables, fresh otherwise)."""
        if isinstance(e, A.Var):
            return self.read(e.name)
        if isinstance(e, A.Num):
            return self.immediate(e.value)
        reg = self.alloc("t", self.w, "scratch")
        self.binop_into(e, reg)
        return reg

    def expr_into(self, e: A.Expr, dest: Register) -> None:
        if isinstance(e, A.Num):
            v = e.value & self.mask
            with self.doing("const"):
                K.prepare_constant(lambda g, lift=True: self.emit(g), dest.qubits, v)
            self.iv[dest.name] = (v, v)
        elif isinstance(e, A.Var):
            src = self.read(e.name)
            with self.doing("copy"):
                K.copy(self.emit, src.qubits, dest.qubits)
            self.iv[dest.name] = self.iv.get(src.name, (0, self.mask))
        else:
            self.binop_into(e, dest)

    def binop_into(self, e: A.BinOp, dest: Register) -> None:
        busy = self.shared_busy
        a = self.operand(e.left)
        b = self.operand(e.right)
        if a is b:
            # the kernels need distinct operand qubits
            cp = self.alloc("t", self.w, "scratch")
            with self.doing("copy"):
                K.copy(self.emit, a.qubits, cp.qubits)
            self.iv[cp.name] = self.iv.get(a.name, (0, self.mask))
            b = cp
        self.kernel(e.op, a.qubits, b.qubits, dest.qubits)
        self.iv[dest.name] = self.ar.binop(e.op, self.iv.get(a.name, (0, self.mask)),
                                           self.iv.get(b.name, (0, self.mask)))
        # the shared immediate is free again once this operation has consumed it
        self.shared_busy = busy

    def kernel(self, op: str, a, b, r, what: Optional[str] = None) -> None:
        with self.doing(what or {"+": "add", "-": "sub", "*": "mul", "/": "div"}[op]):
            self._kernel(op, a, b, r)

    def _kernel(self, op: str, a, b, r) -> None:
        fourier = self.opts.backend == "fourier"
        if op == "+":
            (K.fourier_add_out if fourier else K.add_out)(self.emit, a, b, r)
        elif op == "-":
            (K.fourier_sub_out if fourier else K.sub_out)(self.emit, a, b, r)
        elif op == "*":
            if fourier:
                self.diag("fourier backend: multiplication uses the ripple circuit")
            anc = self.alloc("anc", 1, "scratch")
            K.mul_out(self.emit, a, b, r, anc.qubits[0])
            self.release(anc)
        else:
            if fourier:
                self.diag("fourier backend: division uses the ripple circuit")
            work = self.alloc("rem", 2 * self.w, "scratch")
            anc = self.alloc("anc", 3, "scratch")
            K.div_out(self.emit, a, b, r, work.qubits, anc.qubits)
            self.release(anc)

    # -- predicates --
    def tally_expr(self, e: A.Expr) -> None:
        names = {"+": "add", "-": "sub", "*": "mul", "/": "div"}
        for node in A.expr_nodes(e):
            if isinstance(node, A.BinOp):
                self.tally[names[node.op]] += 1

    def tally_pred(self, p: A.Pred) -> None:
        for q in A.pred_nodes(p):
            if isinstance(q, A.Rel):
                self.tally["cmp"] += 1
                self.tally_expr(q.left)
                self.tally_expr(q.right)

    def const_cq(self, value: bool) -> Tuple[int, bool]:
        q = self.alloc("cq", 1, "control").qubits[0]
        if value:
            self.emit(x_gate(q))
        return q, False

    def pred(self, p: A.Pred) -> int:
        """Fresh control qubit holding ``p`` (emitted unlifted)."""
        with self.doing("cmp"):
            q, neg = self._pred(p)
            if neg:
                self.emit(x_gate(q))
        return q

    def _pred(self, p: A.Pred) -> Tuple[int, bool]:
        if isinstance(p, A.BoolConst):
            return self.const_cq(p.value)
        if isinstance(p, A.Not):
            q, neg = self._pred(p.arg)
            return q, not neg
        if isinstance(p, (A.And, A.Or)):
            qa, na = self._pred(p.left)
            qb, nb = self._pred(p.right)
            # for "or" compute not(not a and not b): flip each input to its negation
            want_a = na if isinstance(p, A.And) else not na
            want_b = nb if isinstance(p, A.And) else not nb
            flips = [q for q, f in ((qa, want_a), (qb, want_b)) if f]
            for q in flips:
                self.emit(x_gate(q))
            r = self.alloc("cq", 1, "control").qubits[0]
            self.emit(x_gate(r, (qa, qb)))
            for q in flips:
                self.emit(x_gate(q))
            return r, isinstance(p, A.Or)
        return self._rel(p)

    def _rel(self, p: A.Rel) -> Tuple[int, bool]:
        left, right, op = p.left, p.right, p.op
        if op == ">":
            left, right, op = right, left, "<"
        elif op == "<=":
            left, right, op = right, left, ">="
        q, neg = self._ge(left, right)
        return q, neg ^ (op == "<")

    def _ge(self, a: A.Expr, b: A.Expr) -> Tuple[int, bool]:
        """Control qubit for ``a >= b`` over full (m+1)-bit values, possibly negated."""
        if _expr_eq(a, b):
            return self.const_cq(True)
        ia, ib = self.interval(a), self.interval(b)
        if ia[0] >= ib[1]:
            return self.const_cq(True)
        if ia[1] < ib[0]:
            return self.const_cq(False)
        top = 1 << self.m
        negate = False
        var_side = None
        if isinstance(b, A.Num) and not isinstance(a, A.Num):
            var_side, c = a, b.value & self.mask
        elif isinstance(a, A.Num) and not isinstance(b, A.Num):
            # c >= x  is  not (x >= c + 1)
            var_side, c, negate = b, (a.value & self.mask) + 1, True
        busy = self.shared_busy
        if var_side is not None and 1 <= c <= top and self.interval(var_side)[1] <= top - 1:
            with self.recording() as rec:
                x = self.operand(var_side)
                imm = self.immediate(top - c)
                scratch = self.alloc("scratch", self.w, "scratch")
                self.kernel("+", x.qubits, imm.qubits, scratch.qubits, "cmp")
                self.shared_busy = busy
            self.pred_recordings.append(rec)
            q = self.alloc("cq", 1, "control").qubits[0]
            # x + (2^m - c) reaches 2^m exactly when x >= c: the sign qubit is the answer
            self.emit(x_gate(q, (scratch.qubits[self.m],)))
            return q, negate
        if max(ia[1], ib[1]) > top - 1:
            self.diag(f"{self.src}: comparison operand may exceed {top - 1}; "
                      f"comparing full {self.w}-bit values by subtractor borrow")
        with self.recording() as rec:
            ra = self.operand(a)
            rb = self.operand(b)
            scratch = self.alloc("scratch", self.w + 1, "scratch")
            self.kernel("-", ra.qubits, rb.qubits, scratch.qubits, "cmp")
            self.shared_busy = busy
        self.pred_recordings.append(rec)
        q = self.alloc("cq", 1, "control").qubits[0]
        self.emit(x_gate(q, (scratch.qubits[self.w],)))
        # the borrow is a < b
        return q, True

    def uncompute_predicate(self, recs: List[_Recording]) -> bool:
        gates = [e for r in recs for e in r.entries if not isinstance(e, tuple)]
        if not gates:
            return False
        if self.nonperm or not all(g.is_permutation for g in gates):
            self.diag(f"{self.src}: uncompute skipped, the predicate circuit is not a 0/1 "
                      f"matrix acting on a non-negative state")
            return False
        for r in reversed(recs):
            self.invert_recording(r)
        return True

    # -- statements --
    def stmt_src(self, s) -> str:
        n = next(self.stmt_ids)
        return f"L{s.pos[0]}" if s.pos else f"S{n}"

    def block(self, block: A.Block) -> None:
        for s in block:
            self.stmt(s)

    def stmt(self, s) -> None:
        saved, saved_what = self.src, self.what
        self.src = self.stmt_src(s)
        try:
            if isinstance(s, A.Assign):
                self.assign(s.var, s.expr)
            elif isinstance(s, A.If):
                self.branch(s)
            elif isinstance(s, A.While):
                self.loop(s)
            elif isinstance(s, A.Block):
                self.block(s)
            else:
                raise SynthError(f"{type(s).__name__} cannot be compiled to a circuit")
        finally:
            self.src, self.what = saved, saved_what

    def assign(self, var: str, e: A.Expr) -> None:
        self.tally_expr(e)
        if isinstance(e, A.Var):
            self.tally["copy"] += 1
        elif isinstance(e, A.Num):
            self.tally["const"] += 1
        dest = self.serial_targets.pop(var, None)
        joined = None
        if dest is not None:
            joined = self.iv.get(dest.name)
        else:
            dest = self.alloc(var, self.w, "value")
        self.expr_into(e, dest)
        if joined is not None:
            self.iv[dest.name] = join(joined, self.iv[dest.name])
        self.set_var(var, dest)

    def branch(self, s: A.If) -> None:
        self.tally_pred(s.pred)
        self.tally["if_else"] += 1
        outer = self.cq
        src = self.src
        with self.unlifted():
            self.pred_recordings = []
            p = self.pred(s.pred)
            recs = self.pred_recordings
            scratch = [r for rec in recs for r in rec.regs if r.role == "scratch"]
            done = self.opts.uncompute and self.uncompute_predicate(recs)
            self.what = "branch"
            if outer is None:
                t = p
                e = self.alloc("cq", 1, "control").qubits[0]
                self.emit(x_gate(e, (t,)))
                self.emit(x_gate(e))
            else:
                t = self.alloc("cq", 1, "control").qubits[0]
                self.emit(x_gate(t, (outer, p)))
                e = self.alloc("cq", 1, "control").qubits[0]
                self.emit(x_gate(e, (outer,)))
                self.emit(x_gate(e, (t,)))
        self.branches.append(BranchInfo(src, t, e, scratch, bool(done)))

        before = dict(self.layout)
        else_layout = dict(before)
        if self.opts.parallel_copy:
            with self.unlifted():
                self.what = "copy"
                for v in sorted(_reads_block(s.then) & _reads_block(s.orelse)):
                    if v in before:
                        cp = self.alloc(f"{v}'", self.w, "scratch")
                        K.copy(self.emit, before[v].qubits, cp.qubits)
                        self.iv[cp.name] = self.iv.get(before[v].name, (0, self.mask))
                        else_layout[v] = cp
        assigned_t = A.assigned_vars(s.then)
        assigned_e = A.assigned_vars(s.orelse)

        self.cq = t
        self.layout = dict(before)
        saved_targets = self.serial_targets
        self.serial_targets = {}
        self.block(s.then)
        then_layout = self.layout

        self.cq = e
        self.layout = else_layout
        if self.opts.share_immediates:
            self.serial_targets = {v: then_layout[v] for v in assigned_t if v in then_layout}
        self.block(s.orelse)
        else_layout = self.layout
        self.serial_targets = saved_targets
        self.cq = outer

        merged = dict(before)
        self.what = "merge"
        with self.unlifted():
            for v in sorted(assigned_t | assigned_e):
                rt = then_layout.get(v) if v in assigned_t else None
                re = else_layout.get(v) if v in assigned_e else None
                old = before.get(v)
                if rt is not None and re is not None:
                    if rt is not re:
                        for qt, qe in zip(rt.qubits, re.qubits):
                            self.emit(Gate("CSWAP", (qt, qe), (e,)))
                    final = rt
                    iv = join(self.iv.get(rt.name), self.iv.get(re.name))
                elif rt is not None:
                    final, ctrl, iv = rt, e, self.iv.get(rt.name)
                elif re is not None:
                    final, ctrl, iv = re, t, self.iv.get(re.name)
                else:
                    continue
                if (rt is None) != (re is None):
                    if old is not None:
                        K.copy(self.emit, old.qubits, final.qubits, (ctrl,))
                        iv = join(iv, self.iv.get(old.name, (0, self.mask)))
                    else:
                        iv = join(iv, (0, 0))
                self.iv[final.name] = iv
                merged[v] = final
                if not self.history[v] or self.history[v][-1] is not final:
                    self.history[v].append(final)
        self.layout = merged

    def loop_eligible(self, s: A.While) -> bool:
        if self.cq is not None or not self.opts.counter_loops or not len(s.body):
            return False
        for st in s.body:
            if not (isinstance(st, A.Assign) and isinstance(st.expr, A.BinOp)
                    and st.expr.op in ("+", "-") and st.expr.left == A.Var(st.var)
                    and st.var not in A.expr_vars(st.expr.right)):
                return False
        return True

    def loop(self, s: A.While) -> None:
        k = self.opts.unroll
        if not self.loop_eligible(s):
            self.block(unroll_stmts(A.Block((s,)), k))
            return
        src = self.src
        updated = [st.var for st in s.body]
        for v in updated:
            self.iv[self.read(v).name] = (0, self.mask)
        width = max(self.w, k.bit_length())
        counter = self.alloc("iter", width, "counter")
        flag = self.alloc("run", 1, "control").qubits[0]
        self.loops.append(LoopInfo(src, counter, flag, k))
        self.in_loop = True
        for j in range(1, k + 1):
            self.tally_pred(s.pred)
            self.tally["if_else"] += 1
            self.src = f"{src}:iter{j}"
            # flag := [counter == j - 1] and pred, then clear the predicate's workspace
            with self.recording() as rec:
                self.pred_recordings = []
                p = self.pred(s.pred)
            with self.doing("loop"):
                K.match_pattern(self.emit, counter.qubits, j - 1, flag, (p,))
            self.invert_recording(rec)
            for st in s.body:
                self.tally_expr(st.expr)
                target = self.read(st.var)
                busy = self.shared_busy
                with self.recording() as tmp:
                    addend = self.operand(st.expr.right)
                self.cq = flag
                self.what = "add" if st.expr.op == "+" else "sub"
                if self.opts.backend == "fourier":
                    K.draper_add(self.emit, addend.qubits, target.qubits,
                                 1 if st.expr.op == "+" else -1)
                else:
                    anc = self.alloc("anc", 1, "scratch")
                    if st.expr.op == "+":
                        K.add_in(self.emit, addend.qubits, target.qubits, anc.qubits[0])
                    else:
                        K.sub_in(self.emit, addend.qubits, target.qubits, anc.qubits[0])
                    self.release(anc)
                self.cq = None
                self.shared_busy = busy
                self.invert_recording(tmp)
            with self.doing("loop"):
                K.increment(self.emit, counter.qubits, (flag,))
                K.match_pattern(self.emit, counter.qubits, j, flag)
        self.in_loop = False
        self.src = src


def synthesize(p: A.Program, dom: DomainLike = None, opts: Optional[SynthOptions] = None) -> SynthResult:
    """Compile ``p`` (loops bounded by ``opts.unroll``) into a circuit."""
    opts = opts or SynthOptions()
    bad = validate(p, "quantum", opts.width)
    if bad:
        raise SynthError("; ".join(str(v) for v in bad))
    cc = _Compiler(p, dom, opts)
    inputs: Dict[str, Register] = {}
    values: Dict[str, Optional[List[int]]] = {}
    for name in p.inputs:
        d = cc.dom.get_domain(name)
        try:
            d.check(opts.width)
        except ValueError as exc:
            raise SynthError(str(exc)) from None
        reg = cc.c.add_register(Register(name, tuple(range(cc.c.n_qubits, cc.c.n_qubits + cc.w)), "value"))
        cc.c.n_qubits += cc.w
        inputs[name] = reg
        cc.set_var(name, reg)
        cc.iv[reg.name] = d.hull(opts.width)
        if d.kind == "full":
            values[name] = None
            cc.src = "init"
            for q in reg.qubits[:opts.width]:
                cc.emit(Gate("H", (q,)))
        else:
            values[name] = d.values(opts.width)
    cc.block(p.body)
    if p.ret is not None:
        cc.src = "return"
        cc.assign(A.RETURN, p.ret)
    cc.c.check()
    return SynthResult(cc.c, dict(cc.layout), dict(cc.history), inputs, values, cc.tally, opts, p,
                       cc.branches, cc.loops, cc.diagnostics)


def optimize(result: SynthResult, opts: Optional[SynthOptions] = None, **flags) -> SynthResult:
    """Recompile ``result``'s program with the optimization flags of ``opts`` (or ``flags``)."""
    base = opts or result.options
    if flags:
        base = replace(base, **flags)
    dom = {n: (vals if vals is not None else "full") for n, vals in result.input_values.items()}
    return synthesize(result.program, dom, base)
