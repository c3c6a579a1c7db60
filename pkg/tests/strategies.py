"""Hypothesis strategies producing small well-formed WHILE programs."""
from __future__ import annotations

from hypothesis import assume, strategies as st

from qex.lang import ast as A
from qex.lang.check import validate

INPUTS = ("x", "y")
LOCALS = ("a", "b")
NAMES = INPUTS + LOCALS


def exprs(m: int, depth: int = 2, ops=A.ARITH_OPS):
    leaf = st.one_of(st.sampled_from(NAMES).map(A.Var),
                     st.integers(0, (1 << m) - 1).map(A.Num))
    if depth == 0:
        return leaf
    sub = exprs(m, depth - 1, ops)
    return st.one_of(leaf, st.builds(A.BinOp, st.sampled_from(ops), sub, sub))


def preds(m: int, depth: int = 1, ops=A.ARITH_OPS):
    rel = st.builds(A.Rel, st.sampled_from(A.REL_OPS), exprs(m, 1, ops), exprs(m, 1, ops))
    if depth == 0:
        return rel
    sub = preds(m, depth - 1, ops)
    return st.one_of(rel, st.builds(A.Not, sub), st.builds(A.And, sub, sub),
                     st.builds(A.Or, sub, sub), st.builds(A.BoolConst, st.booleans()))


def blocks(m: int, depth: int = 2, size: int = 3, ops=A.ARITH_OPS, loops: bool = False):
    assign = st.builds(A.Assign, st.sampled_from(NAMES), exprs(m, 1, ops))
    if depth == 0:
        return st.lists(assign, min_size=1, max_size=size).map(lambda xs: A.Block(tuple(xs)))
    sub = blocks(m, depth - 1, size, ops, loops)
    kinds = [assign, st.builds(A.If, preds(m, 1, ops), sub, sub)]
    if loops:
        kinds.append(st.builds(A.While, preds(m, 0, ops), sub))
    return st.lists(st.one_of(*kinds), min_size=1, max_size=size).map(lambda xs: A.Block(tuple(xs)))


@st.composite
def programs(draw, m: int = 2, depth: int = 2, ops=A.ARITH_OPS, loops: bool = False):
    body = draw(blocks(m, depth, 3, ops, loops))
    ret = draw(st.one_of(st.none(), exprs(m, 1, ops)))
    p = A.Program("f", tuple(A.Param(n) for n in INPUTS), body, ret)
    assume(not validate(p, "quantum", m))
    return p


@st.composite
def counter_loops(draw, m: int = 2):
    """``while (pred) { v := v +/- e; ... }`` programs eligible for counter compilation."""
    n = draw(st.integers(1, 2))
    stmts = []
    for _ in range(n):
        v = draw(st.sampled_from(NAMES))
        rhs = draw(exprs(m, 1, ("+", "-")).filter(lambda e, v=v: v not in A.expr_vars(e)))
        stmts.append(A.Assign(v, A.BinOp(draw(st.sampled_from("+-")), A.Var(v), rhs)))
    pred = draw(preds(m, 1, ("+", "-")))
    pre = draw(st.lists(st.builds(A.Assign, st.sampled_from(LOCALS), exprs(m, 1)), max_size=2))
    body = A.Block(tuple(pre) + (A.While(pred, A.Block(tuple(stmts))),))
    p = A.Program("f", tuple(A.Param(n) for n in INPUTS), body, None)
    assume(not validate(p, "quantum", m))
    return p


# -- circuits ----------------------------------------------------------------

@st.composite
def gates(draw, n_qubits: int, unitary: bool = True):
    from qex.circuit import Gate, x_gate

    kinds = ["X", "SWAP"] + (["H", "PHASE", "U3"] if unitary else [])
    kind = draw(st.sampled_from(kinds))
    qs = draw(st.permutations(range(n_qubits)))
    nc = draw(st.integers(0, min(3, n_qubits - 2)))
    angle = st.floats(-3.2, 3.2, allow_nan=False)
    if kind == "X":
        return x_gate(qs[0], qs[1:1 + nc])
    if kind == "SWAP":
        return Gate("SWAP", (qs[0], qs[1])).lifted(qs[2:2 + nc])
    if kind == "PHASE":
        return Gate("PHASE", (qs[0],), (), (draw(angle),)).lifted(qs[1:1 + nc])
    if kind == "H":
        return Gate("H", (qs[0],))
    return Gate("U3", (qs[0],), (), (draw(angle), draw(angle), draw(angle)))


@st.composite
def circuits(draw, min_qubits: int = 2, max_qubits: int = 6, max_gates: int = 25,
             unitary: bool = True):
    from qex.circuit import Circuit

    n = draw(st.integers(min_qubits, max_qubits))
    gs = draw(st.lists(gates(n, unitary), min_size=1, max_size=max_gates))
    return Circuit(n, [], gs)
