from __future__ import annotations

import pytest
from hypothesis import given, settings

from qex.lang import (ParseError, parse, parse_expr, parse_pred, print_expr, print_pred,
                      print_program, unroll, validate)
from qex.lang import ast as A
from qex.lang.check import live_in

from strategies import exprs, preds, programs


def test_function_header_and_return():
    p = parse("int f(int x, int* a, int y) { z := x + y; return z * 2; }")
    assert p.name == "f"
    assert p.inputs == ("x", "y")
    assert p.pointer_params == ("a",)
    assert isinstance(p.ret, A.BinOp) and p.ret.op == "*"


def test_bare_statements_infer_inputs_in_read_order():
    p = parse("z := y + x; w := z;")
    assert p.inputs == ("y", "x")
    assert p.ret is None


def test_operator_precedence():
    e = parse_expr("a + b * c - d / 2")
    assert print_expr(e) == "a + b * c - d / 2"
    assert e.op == "-" and e.left.op == "+" and e.left.right.op == "*"


def test_equality_relations_desugar():
    q = parse_pred("x == 3")
    assert isinstance(q, A.And)
    assert isinstance(parse_pred("x != 3"), A.Not)


@pytest.mark.parametrize("src, line, col", [
    ("z := ;", 1, 6),
    ("int f(int x) {\n  z := x +;\n}", 2, 11),
    ("if (x < ) { }", 1, 9),
])
def test_parse_errors_carry_position(src, line, col):
    with pytest.raises(ParseError) as ei:
        parse(src)
    assert (ei.value.line, ei.value.col) == (line, col)
    assert ei.value.expected


def test_comments_are_ignored():
    p = parse("// lead\nz := x; /* block\n comment */ w := z;")
    assert len(p.body.stmts) == 2


def test_corpus_round_trip(corpus):
    for cp in corpus:
        assert parse(print_program(cp.program)) == cp.program, cp.name


@settings(max_examples=150, deadline=None)
@given(programs(m=3, depth=2, loops=True))
def test_random_program_round_trip(p):
    assert parse(print_program(p)) == p


@settings(max_examples=150, deadline=None)
@given(exprs(3, 3), preds(3, 2))
def test_expression_and_predicate_round_trip(e, q):
    assert parse_expr(print_expr(e)) == e
    assert parse_pred(print_pred(q)) == q


def test_validate_pointer_statements_only_for_quantum(list2):
    bad = validate(list2.program, "quantum", list2.width)
    assert [(v.kind, v.line, v.col) for v in bad] == [("pointer", 3, 5), ("pointer", 5, 5)]
    assert validate(list2.program, "classical", list2.width) == []


def test_validate_literal_width_for_both_backends():
    p = parse("int f(int x) { z := x + 9; return z; }")
    for backend in ("quantum", "classical"):
        (v,) = validate(p, backend, 3)
        assert v.kind == "literal"
    assert validate(p, "quantum", 4) == []


def test_validate_unbound_name():
    (v,) = validate(parse("int f(int x) { z := q; return z; }"))
    assert v.kind == "unbound" and "q" in v.message


def test_validate_rejects_unknown_backend():
    with pytest.raises(ValueError):
        validate(parse("z := x;"), "analog")


def test_unroll_builds_nested_guards():
    p = parse("int f(int n) { i := 0; while (i < n) { i := i + 1; } return i; }")
    u = unroll(p, 3)
    assert not A.contains_while(u.body)
    depth, block = 0, u.body
    while True:
        ifs = [s for s in block if isinstance(s, A.If)]
        if not ifs:
            break
        depth += 1
        block = ifs[0].then
    assert depth == 3
    assert not A.contains_while(unroll(p, 0).body)


def test_live_in_is_backward_and_kills_definitions():
    p = parse("int f(int x, int y) { a := y; a := x + 1; b := a; return b; }")
    assert live_in(p.body.stmts[1:], {"b"}) == {"x"}
    assert live_in(p.body.stmts, {"b"}) == {"x", "y"}
    assert live_in(p.body.stmts[2:], {"b"}) == {"a"}
    assert live_in((), {"a"}) == {"a"}
