"""Pretty-printer; ``parse(print_program(p)) == p`` for every well-formed program."""
from __future__ import annotations

from typing import List

from . import ast as A

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def print_expr(e: A.Expr) -> str:
    if isinstance(e, A.Num):
        return str(e.value)
    if isinstance(e, A.Var):
        return e.name
    p = _PREC[e.op]
    left = print_expr(e.left)
    if isinstance(e.left, A.BinOp) and _PREC[e.left.op] < p:
        left = f"({left})"
    right = print_expr(e.right)
    if isinstance(e.right, A.BinOp) and _PREC[e.right.op] <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


def _is_eq(p: A.And) -> bool:
    return (isinstance(p.left, A.Rel) and isinstance(p.right, A.Rel)
            and p.left.op == "<=" and p.right.op == ">="
            and p.left.left == p.right.left and p.left.right == p.right.right)


def print_pred(p: A.Pred, resugar: bool = True) -> str:
    def go(q) -> str:
        if isinstance(q, A.BoolConst):
            return "true" if q.value else "false"
        if isinstance(q, A.Rel):
            return f"{print_expr(q.left)} {q.op} {print_expr(q.right)}"
        if isinstance(q, A.Not):
            if resugar and q.sugar == "!=" and isinstance(q.arg, A.And) and _is_eq(q.arg):
                return f"{print_expr(q.arg.left.left)} != {print_expr(q.arg.left.right)}"
            inner = go(q.arg)
            if isinstance(q.arg, (A.And, A.Or)) and not (resugar and _sugared(q.arg)):
                inner = f"({inner})"
            return f"!{inner}"
        if isinstance(q, A.And):
            if resugar and q.sugar == "==" and _is_eq(q):
                return f"{print_expr(q.left.left)} == {print_expr(q.left.right)}"
            return f"{wrap(q.left, A.Or, False)} and {wrap(q.right, (A.Or, A.And), True)}"
        if isinstance(q, A.Or):
            return f"{wrap(q.left, (), False)} or {wrap(q.right, A.Or, True)}"
        raise TypeError(q)

    def wrap(q, weaker, right_side) -> str:
        s = go(q)
        if isinstance(q, weaker) and not (resugar and _sugared(q)):
            return f"({s})"
        # keep every relation parenthesised when desugared so "(a <= b) and (a >= b)" reads naturally
        if isinstance(q, A.Rel) and not resugar:
            return f"({s})"
        return s

    def _sugared(q) -> bool:
        return isinstance(q, A.And) and q.sugar == "==" and _is_eq(q)

    return go(p)


def _print_block(block: A.Block, indent: int, out: List[str], resugar: bool) -> None:
    pad = "    " * indent
    for s in block:
        if isinstance(s, A.Assign):
            kw = "int " if s.decl else ""
            out.append(f"{pad}{kw}{s.var} := {print_expr(s.expr)};")
        elif isinstance(s, A.AddrOf):
            out.append(f"{pad}{'int ' if s.decl else ''}{s.var} := &{s.target};")
        elif isinstance(s, A.DerefRead):
            out.append(f"{pad}{'int ' if s.decl else ''}{s.var} := *{s.pointer};")
        elif isinstance(s, A.DerefWrite):
            out.append(f"{pad}*{s.pointer} := {print_expr(s.expr)};")
        elif isinstance(s, A.If):
            out.append(f"{pad}if ({print_pred(s.pred, resugar)}) {{")
            _print_block(s.then, indent + 1, out, resugar)
            if len(s.orelse):
                out.append(f"{pad}}} else {{")
                _print_block(s.orelse, indent + 1, out, resugar)
            out.append(f"{pad}}}")
        elif isinstance(s, A.While):
            out.append(f"{pad}while ({print_pred(s.pred, resugar)}) {{")
            _print_block(s.body, indent + 1, out, resugar)
            out.append(f"{pad}}}")
        elif isinstance(s, A.Block):
            _print_block(s, indent, out, resugar)
        else:
            raise TypeError(s)


def print_stmt(s: A.Stmt, resugar: bool = True) -> str:
    out: List[str] = []
    _print_block(A.Block((s,)), 0, out, resugar)
    return "\n".join(out)


def print_program(p: A.Program, resugar: bool = True) -> str:
    params = ", ".join(("int* " if q.pointer else "int ") + q.name for q in p.params)
    out = [f"int {p.name}({params}) {{"]
    _print_block(p.body, 1, out, resugar)
    if p.ret is not None:
        out.append(f"    return {print_expr(p.ret)};")
    out.append("}")
    return "\n".join(out) + "\n"
