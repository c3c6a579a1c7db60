"""Cutting a program at a top-level statement boundary."""
from __future__ import annotations

from typing import Iterable, Optional, Set, Tuple

from ..lang import ast as A
from ..lang.check import live_in


class SplitError(ValueError):
    pass


def observables(p: A.Program) -> Set[str]:
    """Names whose final values define the program's result."""
    if p.ret is not None:
        return {A.RETURN}
    pointers = set(p.pointer_params) | {s.var for s in A.walk_stmts(p.body) if isinstance(s, A.AddrOf)}
    return (set(p.inputs) | A.assigned_vars(p.body)) - pointers


def split(p: A.Program, point: int, observe: Optional[Iterable[str]] = None
          ) -> Tuple[A.Program, A.Program]:
    """Return ``(prefix, suffix)`` with ``prefix = body[:point]`` and ``suffix = body[point:]``.

    The suffix is a standalone program whose inputs are the variables live at the cut
    (with respect to ``observe``, default: the program's observables) and which keeps
    the original return expression.
    """
    stmts = p.body.stmts
    if not 0 <= point <= len(stmts):
        raise SplitError(f"split point {point} is not a top-level statement boundary "
                         f"(body has {len(stmts)} statements)")
    observe = set(observe) if observe is not None else observables(p)
    live_out = {n for n in observe if n != A.RETURN}
    rest = stmts[point:]
    needed = live_in(rest, live_out)
    if p.ret is not None:
        needed |= live_in(rest, A.expr_vars(p.ret))
    # keep declaration order: original inputs first, then first-definition order
    order = list(p.inputs)
    for s in A.walk_stmts(p.body):
        if isinstance(s, (A.Assign, A.DerefRead)) and s.var not in order:
            order.append(s.var)
    pointer_names = set(p.pointer_params) | {s.var for s in A.walk_stmts(p.body) if isinstance(s, A.AddrOf)}
    params = tuple(A.Param(n) for n in order if n in needed and n not in pointer_names)
    prefix = A.Program(p.name + "_prefix", p.params, A.Block(stmts[:point]), None, p.pos)
    suffix = A.Program(p.name + "_suffix", params, A.Block(rest), p.ret, p.pos)
    return prefix, suffix


def index_at_line(p: A.Program, line: int) -> int:
    """Index of the first top-level statement starting at or after ``line``."""
    for i, s in enumerate(p.body.stmts):
        if s.pos is not None and s.pos[0] >= line:
            return i
    return len(p.body.stmts)
