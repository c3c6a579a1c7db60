from __future__ import annotations

import re
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from qex.lang import parse, unroll
from qex.lang import ast as A
from qex.classical import enumerate_program
from qex.synth import SynthError, SynthOptions, optimize, synthesize

from strategies import counter_loops, programs

FLAG_SETS = [(), ("uncompute",), ("share",), ("parallel",), ("uncompute", "share", "parallel")]
SLOW = settings(max_examples=60, deadline=None, suppress_health_check=list(HealthCheck))


def assert_matches_oracle(p, flags=(), m=2, k=3, backend="ripple", dom=None):
    opts = SynthOptions.from_flags(flags, width=m, unroll=k, backend=backend)
    res = synthesize(p, dom, opts)
    state = res.simulate(check_norm=True)
    targets = sorted(A.program_vars(p))
    want = enumerate_program(unroll(p, k), dom, m, targets, joint=True).joint.fractions()
    assert res.joint_distribution(state, targets).fractions() == want
    counts = A.op_counts(unroll(p, k).body, p.ret)
    assert {op: res.tally.get(op, 0) for op in counts} == counts
    return res


@SLOW
@given(programs(m=2, depth=2, loops=True), st.sampled_from(FLAG_SETS),
       st.sampled_from(["ripple", "fourier"]))
def test_random_programs_match_oracle(p, flags, backend):
    assert_matches_oracle(p, flags, backend=backend)


@SLOW
@given(counter_loops(m=2), st.sampled_from(FLAG_SETS))
def test_counter_loops_match_oracle(p, flags):
    assert_matches_oracle(p, flags)


@SLOW
@given(st.one_of(programs(m=2, loops=True), counter_loops(m=2)))
def test_uncompute_and_sharing_never_add_qubits(p):
    base = synthesize(p, None, SynthOptions(width=2, unroll=3)).n_qubits
    for flags in (("uncompute",), ("share",), ("uncompute", "share")):
        assert synthesize(p, None, SynthOptions.from_flags(flags, width=2, unroll=3)).n_qubits <= base


def test_corpus_matches_oracle(quantum_corpus):
    for cp in quantum_corpus:
        for flags in ((), ("uncompute", "share", "parallel")):
            assert_matches_oracle(cp.program, flags, cp.width, cp.unroll, dom=cp.domain)


def test_fig1_layout(fig1):
    res = synthesize(fig1.program)
    assert res.n_qubits == 34
    roles = Counter(r.role for r in res.circuit.registers)
    assert roles == {"value": 4, "immediate": 3, "control": 2, "scratch": 1}
    (br,) = res.branches
    assert br.src == "L2" and not br.uncomputed
    s = res.simulate()
    assert res.distribution(s, "z").fractions() == (
        {v: Fraction(5, 64) for v in range(1, 6)} | {v: Fraction(13, 64) for v in (6, 7, 8)})


def test_fig1_final_state_kets(fig1):
    """Every support state is |z, x, y, x+3, CQ1, CQ2> with amplitude 1/8."""
    res = synthesize(fig1.program)
    s = res.simulate()
    assert len(s) == 64
    br = res.branches[0]
    regs = [res.layout["z"], res.layout["x"], res.layout["y"], br.scratch[0], (br.cq_then,), (br.cq_else,)]
    cols = [s.values(r) for r in regs]
    seen = set()
    for i, a in enumerate(s.amps):
        assert abs(a - 1 / 8) < 1e-9
        z, x, y, x3, cq1, cq2 = (int(c[i]) for c in cols)
        want = (x + 1, 1, 0) if x >= 5 else (y + 1, 0, 1)
        assert (z, cq1, cq2) == want and x3 == x + 3
        seen.add((x, y))
    assert len(seen) == 64


def test_fig1_optimized_uses_fewer_resources(fig1):
    base = synthesize(fig1.program)
    opt = optimize(base, uncompute=True, share_immediates=True)
    assert opt.n_qubits == 18 < base.n_qubits

    def imm_gates(r):
        return sum(1 for g in r.circuit.gates if g.src.endswith(":imm"))
    assert imm_gates(opt) < imm_gates(base)
    assert opt.branches[0].uncomputed
    assert opt.distribution(opt.simulate(), "z").fractions() == base.distribution(base.simulate(), "z").fractions()


def test_entanglement_joint():
    p = parse("int f(int x, int y) { z := x + y; }")
    res = synthesize(p, {"x": [1, 2], "y": [3, 4]})
    d = res.joint_distribution(res.simulate(), ["x", "z"]).fractions()
    assert d == {(1, 4): Fraction(1, 4), (1, 5): Fraction(1, 4), (2, 5): Fraction(1, 4), (2, 6): Fraction(1, 4)}
    assert (1, 6) not in d


def test_counter_loop_qubits_constant_in_bound():
    p = parse("int f(int n) { s := 0; i := 0; while (i < n) { s := s + i; i := i + 1; } return s; }")
    qubits = {synthesize(p, {"n": range(8)}, SynthOptions(unroll=k)).n_qubits for k in range(1, 9)}
    assert len(qubits) == 1
    flat = {synthesize(p, {"n": range(8)}, SynthOptions(unroll=k, counter_loops=False)).n_qubits
            for k in (2, 4)}
    assert len(flat) == 2


def test_counter_loop_records_iterations():
    p = parse("int f(int n) { i := 0; while (i < n) { i := i + 1; } return i; }")
    res = synthesize(p, {"n": range(4)}, SynthOptions(unroll=5))
    (lp,) = res.loops
    assert lp.iterations == 5 and lp.counter.role == "counter"


def test_provenance_tags(fig1):
    res = synthesize(fig1.program)
    pat = re.compile(r"^(L\d+|S\d+|init|return)(:iter\d+)?:[a-z]+$")
    assert all(pat.match(g.src) for g in res.circuit.gates)
    assert {g.src for g in res.circuit.gates if g.kind == "H"} == {"init:h"}


def test_pointer_programs_are_rejected(list2):
    with pytest.raises(SynthError, match="pointer"):
        synthesize(list2.program, list2.domain, SynthOptions(width=list2.width))


def test_qubit_budget(fig1):
    with pytest.raises(SynthError, match="budget"):
        synthesize(fig1.program, None, SynthOptions(max_qubits=20))


def test_domain_must_fit_width():
    with pytest.raises(SynthError):
        synthesize(parse("z := x;"), {"x": [40]}, SynthOptions(width=3))


def test_wide_comparison_emits_diagnostic():
    p = parse("int f(int x) { y := x + 6; if (y > 7) { r := 1; } else { r := 0; } return r; }")
    res = assert_matches_oracle(p, m=3, k=1)
    assert any("comparison" in d for d in res.diagnostics)


def test_options_from_flags():
    o = SynthOptions.from_flags(["uncompute", "share"], width=4)
    assert o.flags == ("uncompute", "share") and o.width == 4
    with pytest.raises(ValueError):
        SynthOptions.from_flags(["turbo"])
    with pytest.raises(ValueError):
        SynthOptions(width=0)


def test_sidecar_lists_registers(fig1):
    side = synthesize(fig1.program).sidecar()
    assert side["vars"]["z"]["register"] == [18, 19, 20]
    assert side["vars"]["z"]["sign"] == 21
    assert side["tally"] == {"add": 2, "cmp": 1, "if_else": 1}
