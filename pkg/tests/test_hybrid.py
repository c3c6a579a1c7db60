from __future__ import annotations

import json
from fractions import Fraction

import pytest

from qex.amplify import required_L
from qex.classical import interval_analyze
from qex.hybrid import (BoundN, HybridError, HybridPlan, bound_N, feed_forward, min_split, plan,
                        run_hybrid)
from qex.lang import parse
from qex.lang import ast as A
from qex.synth import SynthOptions, synthesize

LIST2_GT = {2, 3, 5, 6, 8, 9, 24, 27}


def opts(cp):
    return SynthOptions(width=cp.width, unroll=cp.unroll)


def test_plan_splits_after_last_pointer(list2):
    hp = plan(list2.program, list2.domain, list2.width)
    assert hp.split == 3 == min_split(list2.program)
    assert hp.prefix_backend == "enumerate"
    assert plan(list2.program, list2.domain, list2.width, split_line=list2.split_line).split == 3


def test_plan_pointer_free_program_is_pure(fig1):
    assert plan(fig1.program).split == 0


def test_plan_rejects_split_before_pointer(list2):
    with pytest.raises(HybridError):
        plan(list2.program, list2.domain, list2.width, split_at=1)


def test_plan_switches_to_intervals_over_cap(list2):
    assert plan(list2.program, list2.domain, list2.width, cap=4).prefix_backend == "interval"


def test_plan_json_round_trip(tmp_path):
    hp = HybridPlan(3, "interval", 0.2, "return == 8")
    f = tmp_path / "plan.json"
    f.write_text(json.dumps(hp.to_json()))
    assert HybridPlan.load(f) == hp
    with pytest.raises(HybridError):
        HybridPlan(0, "symbolic")


def test_enumerate_backend_is_exact(list2):
    res = run_hybrid(list2.program, list2.domain, HybridPlan(3, "enumerate"), opts(list2))
    assert res.values() == LIST2_GT
    assert (res.report.over_pct, res.report.under_pct) == (100.0, 0.0)
    assert res.N == 8


def test_interval_backend_sandwich(list2):
    res = run_hybrid(list2.program, list2.domain, HybridPlan(3, "interval"), opts(list2))
    pure = interval_analyze(list2.program, list2.domain, list2.width)[A.RETURN]
    assert pure == (0, 27)
    assert LIST2_GT < res.values() < set(range(pure[0], pure[1] + 1))
    assert res.report.under_pct == 0.0 and res.report.over_pct > 100.0


def test_sandwich_on_every_pointer_program(corpus):
    for cp in corpus:
        if not cp.uses_pointers:
            continue
        point = min_split(cp.program)
        exact = run_hybrid(cp.program, cp.domain, HybridPlan(point, "enumerate"), opts(cp))
        loose = run_hybrid(cp.program, cp.domain, HybridPlan(point, "interval"), opts(cp))
        lo, hi = interval_analyze(cp.program, cp.domain, cp.width)[A.RETURN]
        assert exact.values() == exact.report.gt
        assert exact.report.gt <= loose.values() <= set(range(lo, hi + 1)), cp.name


def test_split_at_zero_reproduces_pure_run(fig1):
    res = run_hybrid(fig1.program, None, HybridPlan(0, "enumerate"), SynthOptions(), var="z")
    pure = synthesize(fig1.program)
    assert res.distribution.fractions() == pure.distribution(pure.simulate(), "z").fractions()


def test_bound_N_list2(list2):
    b = bound_N(list2.program, list2.domain, list2.width)
    assert {k: (d.lo, d.hi) for k, d in b.domains.items()} == {"x": (0, 7), "y": (2, 9), "z": (0, 3)}
    assert b.n_refined == 256 and b.n_full == 32 ** 3
    refined, full = b.required_L(0.1)
    assert refined == required_L(0.1, 1 / 256) <= full


def test_bound_N_fixed_value():
    p = parse("int f(int x, int* a) { *a := x; y := 3; if (x > y) { r := 1; } else { r := 0; } return r; }")
    b = bound_N(p, None, 3, split_at=2)
    assert (b.domains["y"].lo, b.domains["y"].hi) == (3, 3)
    assert b.n_refined == 8 * 1 <= b.n_full


def test_bound_N_unreachable():
    p = parse("int f(int x) { y := 1; while (y > 0) { y := 1; } r := x; return r; }")
    assert not bound_N(p, None, 3, split_at=2).reachable


def test_search_on_suffix(list2):
    hp = HybridPlan(3, "enumerate", 0.1, "return == 27")
    res = run_hybrid(list2.program, list2.domain, hp, opts(list2), shots=200, seed=5)
    assert res.stats.M == 1 and res.stats.N == 8
    assert res.stats.hit_rate >= 0.98
    assert res.to_json()["search"]["L"] == required_L(0.1, 1 / 8)


def test_feed_forward_into_later_stage():
    stage1 = parse("int f(int x, int y) { z := x + y; }")
    res = synthesize(stage1, {"x": [1, 2], "y": [3, 4]})
    later = parse("int g(int x, int z) { w := z - x; }")
    out = feed_forward(res, res.simulate(), ["x", "z"], later, 3, ["w"])
    # z - x recovers y, so the later stage sees exactly {3, 4}
    assert out["w"].fractions() == {3: Fraction(1, 2), 4: Fraction(1, 2)}
