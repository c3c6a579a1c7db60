"""Validation, bounded loop unrolling and liveness."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Set

from . import ast as A


@dataclass(frozen=True)
class Violation:
    kind: str  # "pointer", "literal", "unbound"
    message: str
    line: Optional[int] = None
    col: Optional[int] = None

    def __str__(self) -> str:
        where = f"{self.line}:{self.col}: " if self.line is not None else ""
        return f"{where}{self.message}"


def _literals(e: A.Expr):
    for node in A.expr_nodes(e):
        if isinstance(node, A.Num):
            yield node


def _pred_exprs(p: A.Pred):
    for q in A.pred_nodes(p):
        if isinstance(q, A.Rel):
            yield q.left
            yield q.right


def validate(p: A.Program, backend: str = "quantum", width: int = 3) -> List[Violation]:
    """Return the list of violations of ``p`` for ``backend`` ("quantum" or "classical").

    Pointer statements are violations only for the quantum backend; literals that do
    not fit in ``width`` value bits and never-bound names are violations for both.
    """
    if backend not in ("quantum", "classical"):
        raise ValueError(f"unknown backend {backend!r}")
    out: List[Violation] = []
    limit = 1 << width
    known = set(p.inputs) | set(p.pointer_params) | A.assigned_vars(p.body)

    def at(node):
        return node.pos or (None, None)

    def check_expr(e):
        for lit in _literals(e):
            if lit.value >= limit:
                out.append(Violation("literal", f"literal {lit.value} exceeds width {width}", *at(lit)))
        for name in A.expr_vars(e):
            if name not in known:
                out.append(Violation("unbound", f"unbound variable {name!r}", *at(e)))

    for s in A.walk_stmts(p.body):
        if isinstance(s, A.POINTER_STMTS) and backend == "quantum":
            out.append(Violation("pointer", f"pointer statement not supported by the quantum backend: "
                                            f"{type(s).__name__}", *at(s)))
        if isinstance(s, (A.Assign, A.DerefWrite)):
            check_expr(s.expr)
        if isinstance(s, (A.DerefWrite, A.DerefRead)) and s.pointer not in known:
            out.append(Violation("unbound", f"unbound pointer {s.pointer!r}", *at(s)))
        if isinstance(s, A.AddrOf) and s.target not in known:
            out.append(Violation("unbound", f"unbound variable {s.target!r}", *at(s)))
        if isinstance(s, (A.If, A.While)):
            for e in _pred_exprs(s.pred):
                check_expr(e)
    if p.ret is not None:
        check_expr(p.ret)
    return out


def unroll_stmts(block: A.Block, k: int) -> A.Block:
    """Replace each ``while (b) S`` by ``k`` nested ``if (b) { S; ... }``."""
    if k < 0:
        raise ValueError("unroll bound must be >= 0")
    out: List[A.Stmt] = []
    for s in block:
        if isinstance(s, A.While):
            body = unroll_stmts(s.body, k)
            nested: List[A.Stmt] = []
            for _ in range(k):
                nested = [A.If(s.pred, A.Block(tuple(body.stmts) + tuple(nested)), A.Block(), s.pos)]
            out.extend(nested)
        elif isinstance(s, A.If):
            out.append(A.If(s.pred, unroll_stmts(s.then, k), unroll_stmts(s.orelse, k), s.pos))
        elif isinstance(s, A.Block):
            out.extend(unroll_stmts(s, k).stmts)
        else:
            out.append(s)
    return A.Block(tuple(out), block.pos)


def unroll(p: A.Program, k: int) -> A.Program:
    """Loop-free copy of ``p`` in which every loop runs at most ``k`` iterations."""
    return A.Program(p.name, p.params, unroll_stmts(p.body, k), p.ret, p.pos)


# -- liveness ---------------------------------------------------------------

def _uses_expr(e: A.Expr) -> Set[str]:
    return A.expr_vars(e)


def live_in(stmts: Iterable[A.Stmt], live_out: Set[str]) -> Set[str]:
    """Backward liveness over a statement sequence."""
    live = set(live_out)
    for s in reversed(list(stmts)):
        live = _live_stmt(s, live)
    return live


def _live_stmt(s: A.Stmt, live: Set[str]) -> Set[str]:
    if isinstance(s, A.Assign):
        return (live - {s.var}) | _uses_expr(s.expr)
    if isinstance(s, A.AddrOf):
        return (live - {s.var}) | {s.target}
    if isinstance(s, A.DerefRead):
        # the pointee is unknown without points-to facts: keep everything live
        return (live - {s.var}) | {s.pointer}
    if isinstance(s, A.DerefWrite):
        return live | {s.pointer} | _uses_expr(s.expr)
    if isinstance(s, A.If):
        return A.pred_vars(s.pred) | live_in(s.then, live) | live_in(s.orelse, live)
    if isinstance(s, A.While):
        # fixpoint: live = live_out ∪ uses(b) ∪ live_in(body, live)
        cur = set(live) | A.pred_vars(s.pred)
        while True:
            nxt = cur | live_in(s.body, cur)
            if nxt == cur:
                return cur
            cur = nxt
    if isinstance(s, A.Block):
        return live_in(s, live)
    raise TypeError(s)
