from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings

from qex.classical import (CapExceeded, Domain, DomainError, InputDomain, InterpError,
                           enumerate_program, index_at_line, interpret, interval_analyze,
                           joint_inputs, split)
from qex.classical.split import observables
from qex.hybrid import min_split
from qex.lang import parse, unroll
from qex.lang import ast as A

from strategies import programs


def run(src, m=3, **inputs):
    return interpret(parse(src), inputs, m).values


def test_arithmetic_wraps_at_m_plus_one_bits():
    v = run("int f(int x, int y) { a := x + y; b := x - y; c := x * y; d := x / y; }", x=7, y=12)
    assert (v["a"], v["b"], v["c"], v["d"]) == (3, 11, 4, 0)


def test_division_by_zero_yields_zero():
    assert run("int f(int x) { return x / 0; }", x=5)[A.RETURN] == 0


def test_unassigned_variable_reads_zero():
    v = run("int f(int x) { if (x > 3) { t := 5; } return t; }", x=1)
    assert v[A.RETURN] == 0


def test_comparisons_use_full_width():
    # 9 does not fit in 3 value bits but compares as 9
    assert run("int f(int x) { a := x + 5; if (a > 7) { r := 1; } else { r := 0; } return r; }",
               x=4)[A.RETURN] == 1


def test_pointers_write_through():
    v = interpret(parse("int f(int x, int* p) { *p := x + 1; y := *p; return y; }"), {"x": 2}, 3).values
    assert v[A.RETURN] == 3


def test_step_limit_stops_runaway_loops():
    with pytest.raises(InterpError):
        interpret(parse("int f(int x) { while (x >= 0) { x := x + 1; } }"), {"x": 0}, 3, step_limit=50)


def test_fig1_distribution(fig1):
    en = enumerate_program(fig1.program, None, 3, ["z"])
    assert en.total == 64
    want = {v: Fraction(5, 64) for v in range(1, 6)} | {v: Fraction(13, 64) for v in (6, 7, 8)}
    assert en["z"].fractions() == want


def test_joint_enumeration_and_cap():
    p = parse("int f(int x, int y) { z := x + y; }")
    en = enumerate_program(p, {"x": [1, 2], "y": [3, 4]}, 3, ["x", "z"], joint=True)
    assert en.joint.fractions() == {(1, 4): Fraction(1, 4), (1, 5): Fraction(1, 4),
                                    (2, 5): Fraction(1, 4), (2, 6): Fraction(1, 4)}
    with pytest.raises(CapExceeded):
        enumerate_program(p, None, 3, ["z"], cap=63)


def test_unknown_target_is_rejected():
    with pytest.raises(InterpError):
        enumerate_program(parse("z := x;"), None, 3, ["nope"])


def test_domain_json_and_checks():
    dom = InputDomain.from_json({"x": {"interval": [2, 5]}, "y": [1, 3, 3], "z": "full"})
    assert dom["x"].values(3) == [2, 3, 4, 5]
    assert dom["y"].values(3) == [1, 3]
    assert dom.get_domain("w").values(2) == [0, 1, 2, 3]
    assert InputDomain.from_json(dom.to_json()) == dom
    with pytest.raises(DomainError):
        Domain.interval(4, 2)
    with pytest.raises(DomainError):
        Domain.of([16]).check(3)


def test_interval_analysis_fig1(fig1):
    env = interval_analyze(fig1.program, None, 3)
    assert env["z"] == (1, 8)


def test_interval_analysis_list2(list2):
    env = interval_analyze(list2.program, list2.domain, list2.width)
    assert env["y"] == (2, 9)
    assert env["z"] == (0, 3)
    assert env[A.RETURN] == (0, 27)


def test_interval_refinement_by_branch_condition():
    env = interval_analyze(parse("int f(int x) { if (x < 3) { r := x; } else { r := 0; } return r; }"))
    assert env[A.RETURN] == (0, 2)


def test_dead_branch_is_unreachable():
    env = interval_analyze(parse("int f(int x) { y := 2; if (y > 5) { r := 1; } }"))
    assert env.reachable
    dead = interval_analyze(parse("int f(int x) { y := 2; while (y >= 0) { y := 1; } }"))
    assert not dead.reachable


@settings(max_examples=120, deadline=None)
@given(programs(m=2, depth=2, loops=True))
def test_intervals_enclose_every_concrete_value(p):
    """Soundness: each reachable concrete value lies in the abstract interval."""
    p = unroll(p, 3)
    env = interval_analyze(p, None, 2)
    targets = sorted(A.program_vars(p))
    en = enumerate_program(p, None, 2, targets)
    for t in targets:
        if not en[t].counts:
            continue
        lo, hi = env[t]
        assert all(lo <= v <= hi for v in en[t].counts), (t, env[t], en[t].counts)


def test_split_list2_at_switch_comment(list2):
    point = index_at_line(list2.program, list2.split_line)
    assert point == 3
    prefix, suffix = split(list2.program, point)
    assert len(prefix.body.stmts) == 3
    assert suffix.inputs == ("x", "y", "z")
    assert not suffix.pointer_params


def test_split_at_zero_keeps_the_whole_body(list2):
    prefix, suffix = split(list2.program, 0)
    assert prefix.body.stmts == ()
    assert suffix.body == list2.program.body


def test_split_preserves_semantics(corpus):
    """Enumerating the suffix over the prefix's joint outputs equals the whole program."""
    for cp in corpus:
        p = unroll(cp.program, cp.unroll)
        targets = sorted(observables(p))
        whole = enumerate_program(p, cp.domain, cp.width, targets, joint=True).joint
        for point in range(min_split(p), len(p.body.stmts) + 1):
            prefix, suffix = split(p, point, observe=targets)
            feed = joint_inputs(prefix, cp.domain, cp.width, suffix.inputs)
            got = Counter()
            for tup, count in feed.items():
                env = interpret(suffix, dict(zip(suffix.inputs, tup)), cp.width).values
                got[tuple(env.get(t, 0) for t in targets)] += count
            assert dict(got) == dict(whole.counts), (cp.name, point)


def test_observables():
    assert observables(parse("int f(int x) { y := x; return y; }")) == {A.RETURN}
    assert observables(parse("int f(int x) { y := x; z := 1; }")) >= {"y", "z"}
