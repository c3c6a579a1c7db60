"""AST node types for the WHILE language and its pointer extension.

Every node records a source position ``(line, col)``; positions never take part
in equality, so two trees parsed from differently formatted text compare equal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple, Union

Pos = Optional[Tuple[int, int]]

ARITH_OPS = ("+", "-", "*", "/")
REL_OPS = ("<", "<=", ">", ">=")

# pseudo-variable holding the value of the ``return`` expression
RETURN = "return"


def _pos():
    return field(default=None, compare=False, repr=False)


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Num:
    value: int
    pos: Pos = _pos()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


Expr = Union[Var, Num, BinOp]


# -- predicates -------------------------------------------------------------

@dataclass(frozen=True)
class BoolConst:
    value: bool
    pos: Pos = _pos()


@dataclass(frozen=True)
class Not:
    arg: "Pred"
    pos: Pos = _pos()
    # "!=" when this node is the desugared form of a != b
    sugar: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    left: "Pred"
    right: "Pred"
    pos: Pos = _pos()
    # "==" when this node is the desugared form of a == b
    sugar: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    left: "Pred"
    right: "Pred"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Rel:
    op: str
    left: Expr
    right: Expr
    pos: Pos = _pos()


Pred = Union[BoolConst, Not, And, Or, Rel]


def eq(left: Expr, right: Expr, pos: Pos = None) -> And:
    """``left == right`` stored as ``(left <= right) and (left >= right)``."""
    return And(Rel("<=", left, right, pos), Rel(">=", left, right, pos), pos, sugar="==")


def ne(left: Expr, right: Expr, pos: Pos = None) -> Not:
    return Not(eq(left, right, pos), pos, sugar="!=")


# -- statements -------------------------------------------------------------

@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr
    pos: Pos = _pos()
    decl: bool = field(default=False, compare=False, repr=False)


@dataclass(frozen=True)
class AddrOf:
    """``var := &target``"""
    var: str
    target: str
    pos: Pos = _pos()
    decl: bool = field(default=False, compare=False, repr=False)


@dataclass(frozen=True)
class DerefRead:
    """``var := *pointer``"""
    var: str
    pointer: str
    pos: Pos = _pos()
    decl: bool = field(default=False, compare=False, repr=False)


@dataclass(frozen=True)
class DerefWrite:
    """``*pointer := expr``"""
    pointer: str
    expr: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class Block:
    stmts: Tuple["Stmt", ...] = ()
    pos: Pos = _pos()

    def __iter__(self) -> Iterator["Stmt"]:
        return iter(self.stmts)

    def __len__(self) -> int:
        return len(self.stmts)


@dataclass(frozen=True)
class If:
    pred: Pred
    then: Block
    orelse: Block = Block()
    pos: Pos = _pos()


@dataclass(frozen=True)
class While:
    pred: Pred
    body: Block
    pos: Pos = _pos()


Stmt = Union[Assign, AddrOf, DerefRead, DerefWrite, If, While, Block]
POINTER_STMTS = (AddrOf, DerefRead, DerefWrite)


@dataclass(frozen=True)
class Param:
    name: str
    pointer: bool = False
    pos: Pos = _pos()


@dataclass(frozen=True)
class Program:
    name: str
    params: Tuple[Param, ...]
    body: Block
    ret: Optional[Expr] = None
    pos: Pos = _pos()

    @property
    def inputs(self) -> Tuple[str, ...]:
        """Integer-valued input names, in declaration order."""
        return tuple(p.name for p in self.params if not p.pointer)

    @property
    def pointer_params(self) -> Tuple[str, ...]:
        return tuple(p.name for p in self.params if p.pointer)


# -- traversal helpers ------------------------------------------------------

def expr_vars(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, BinOp):
        return expr_vars(e.left) | expr_vars(e.right)
    return set()


def pred_vars(p: Pred) -> set:
    if isinstance(p, Rel):
        return expr_vars(p.left) | expr_vars(p.right)
    if isinstance(p, Not):
        return pred_vars(p.arg)
    if isinstance(p, (And, Or)):
        return pred_vars(p.left) | pred_vars(p.right)
    return set()


def walk_stmts(block: Block) -> Iterator[Stmt]:
    """Pre-order walk over every statement nested in ``block``."""
    for s in block:
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then)
            yield from walk_stmts(s.orelse)
        elif isinstance(s, While):
            yield from walk_stmts(s.body)
        elif isinstance(s, Block):
            yield from walk_stmts(s)


def assigned_vars(block: Block) -> set:
    out = set()
    for s in walk_stmts(block):
        if isinstance(s, (Assign, AddrOf, DerefRead)):
            out.add(s.var)
    return out


def program_vars(p: Program) -> set:
    """Every integer-valued name the program can bind (inputs + assignment targets)."""
    names = set(p.inputs) | assigned_vars(p.body)
    if p.ret is not None:
        names.add(RETURN)
    return names


def expr_nodes(e: Expr) -> Iterator[Expr]:
    yield e
    if isinstance(e, BinOp):
        yield from expr_nodes(e.left)
        yield from expr_nodes(e.right)


def pred_nodes(p: Pred) -> Iterator[Pred]:
    yield p
    if isinstance(p, Not):
        yield from pred_nodes(p.arg)
    elif isinstance(p, (And, Or)):
        yield from pred_nodes(p.left)
        yield from pred_nodes(p.right)


def count_nodes(block: Block) -> int:
    """Total number of statement, predicate and expression nodes."""
    n = 0
    for s in walk_stmts(block):
        n += 1
        if isinstance(s, (Assign, DerefWrite)):
            n += sum(1 for _ in expr_nodes(s.expr))
        elif isinstance(s, (If, While)):
            for q in pred_nodes(s.pred):
                n += 1
                if isinstance(q, Rel):
                    n += sum(1 for _ in expr_nodes(q.left)) + sum(1 for _ in expr_nodes(q.right))
    return n


def op_counts(block: Block, ret: Optional[Expr] = None) -> dict:
    """Arithmetic operator and relation node counts (``cmp`` for relations)."""
    counts = {"add": 0, "sub": 0, "mul": 0, "div": 0, "cmp": 0}
    names = {"+": "add", "-": "sub", "*": "mul", "/": "div"}

    def on_expr(e):
        for node in expr_nodes(e):
            if isinstance(node, BinOp):
                counts[names[node.op]] += 1

    for s in walk_stmts(block):
        if isinstance(s, (Assign, DerefWrite)):
            on_expr(s.expr)
        elif isinstance(s, (If, While)):
            for q in pred_nodes(s.pred):
                if isinstance(q, Rel):
                    counts["cmp"] += 1
                    on_expr(q.left)
                    on_expr(q.right)
    if ret is not None:
        on_expr(ret)
    return counts


def contains_while(block: Block) -> bool:
    return any(isinstance(s, While) for s in walk_stmts(block))
