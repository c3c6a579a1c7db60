from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import dense
from qex.circuit import Circuit, Gate, Register, invert, x_gate
from qex.sim import (KERNEL, SimError, SparseState, _fallback, apply, dump, encode, init, joint,
                     marginal, run, sample)

from strategies import circuits, gates


def test_kernel_selection_is_reported():
    assert KERNEL in ("cython", "numpy")


def _random_keys(rng, n_qubits, n_states):
    words = (n_qubits + 63) // 64
    keys = rng.integers(0, np.iinfo(np.uint64).max, size=(n_states, words), dtype=np.uint64,
                        endpoint=True)
    if n_qubits % 64:
        keys[:, -1] &= np.uint64((1 << (n_qubits % 64)) - 1)
    return np.ascontiguousarray(keys)


@pytest.mark.skipif(KERNEL != "cython", reason="compiled kernel not built")
@settings(max_examples=60, deadline=None)
@given(st.sampled_from([5, 64, 70, 130]), st.data())
def test_compiled_kernel_matches_fallback(n_qubits, data):
    from qex.sim import _kernels

    gs = data.draw(st.lists(gates(n_qubits, unitary=False), min_size=0, max_size=30))
    keys = _random_keys(np.random.default_rng(data.draw(st.integers(0, 99))), n_qubits, 50)
    ops = encode(gs)
    a, b = keys.copy(), keys.copy()
    _kernels.apply_perm(a, ops)
    _fallback.apply_perm(b, ops)
    assert np.array_equal(a, b)


def test_init_uniform_and_joint():
    s = init(6, {(0, 1, 2): [1, 2, 5]}, [([(3, 4), (5,)], {(1, 0): 1, (3, 1): 3})])
    assert len(s) == 6 and s.den == 12
    assert math.isclose(s.norm(), 1.0)
    d = marginal(s, (3, 4))
    assert d.fractions() == {1: Fraction(1, 4), 3: Fraction(3, 4)}
    with pytest.raises(SimError):
        init(3, {(0, 1): [1], (1, 2): [0]})
    with pytest.raises(SimError):
        init(2, {(0, 1): [4]})


def test_hadamard_creates_and_destroys_superposition():
    s = SparseState.zero(2)
    h = Gate("H", (0,))
    s1 = apply(s, h)
    assert len(s1) == 2
    s2 = apply(s1, h)
    assert len(s2) == 1 and abs(s2.amplitude(0) - 1) < 1e-12


def test_permutations_keep_exact_denominator():
    s = init(3, {(0, 1): [0, 1, 2, 3]})
    out = run([x_gate(2, (0, 1))], s)
    assert out.den == 4
    assert marginal(out, (2,)).fractions() == {0: Fraction(3, 4), 1: Fraction(1, 4)}


@settings(max_examples=80, deadline=None)
@given(circuits(max_qubits=5))
def test_sparse_matches_dense_reference(c):
    s0 = init(c.n_qubits, {tuple(range(c.n_qubits)): [0, 1, 3]})
    got = dense.from_sparse(run(c, s0))
    want = dense.run(c, dense.from_sparse(s0))
    assert np.allclose(got, want, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(circuits(max_qubits=6))
def test_inverse_circuit_restores_state(c):
    s0 = init(c.n_qubits, {tuple(range(c.n_qubits)): [0, 2, (1 << c.n_qubits) - 1]})
    back = run(invert(c), run(c, s0))
    assert np.allclose(dense.from_sparse(back), dense.from_sparse(s0), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(circuits(max_qubits=6))
def test_norm_preserved_after_every_gate(c):
    norms = []
    run(c, SparseState.zero(c.n_qubits), check_norm=True,
        observer=lambda i, s: norms.append(s.norm()))
    assert len(norms) == len(c.gates)
    assert all(abs(n - 1) < 1e-9 for n in norms)


def test_multiword_state():
    s = init(130, {(0, 1): [1, 2]})
    out = run([x_gate(129, (0,)), Gate("SWAP", (1, 100))], s)
    assert joint(out, [(129,), (100,)]).fractions() == {(0, 1): Fraction(1, 2), (1, 0): Fraction(1, 2)}


def test_circuit_width_mismatch():
    with pytest.raises(SimError):
        run(Circuit(3), SparseState.zero(2))


def test_joint_rejects_overlap():
    with pytest.raises(SimError):
        joint(SparseState.zero(3), [(0, 1), (1, 2)])


def test_sampling_is_seeded_and_follows_distribution():
    s = init(4, {(0, 1): [0, 1, 2, 3]})
    s = run([x_gate(2, (0,))], s)
    a = sample(s, (0, 1), 2000, seed=7)
    assert a == sample(s, (0, 1), 2000, seed=7)
    assert set(a) == {0, 1, 2, 3}
    assert all(abs(c / 2000 - 0.25) < 0.05 for c in a.values())
    pairs = sample(s, [(0,), (2,)], 100, seed=1)
    assert set(pairs) <= {(0, 0), (1, 1)}
    with pytest.raises(SimError):
        sample(s, (0,), 0)


def test_sample_accepts_registers():
    s = init(2, {(0, 1): [3]})
    assert sample(s, Register("r", (0, 1)), 5, seed=0) == {3: 5}


def test_dump_is_sorted_json():
    s = run([Gate("H", (0,))], SparseState.zero(2))
    rows = json.loads(dump(s))
    assert [r["basis"] for r in rows] == ["00", "01"]
    assert math.isclose(rows[1]["re"], 1 / math.sqrt(2))


def test_distribution_json_forms():
    s = init(2, {(0, 1): [1, 2, 3]})
    assert marginal(s, (0, 1)).to_json() == {"1": {"num": 1, "den": 3}, "2": {"num": 1, "den": 3},
                                             "3": {"num": 1, "den": 3}}
    h = run([Gate("U3", (0,), (), (0.3, 0, 0))], SparseState.zero(1))
    d = marginal(h, (0,))
    assert not d.exact
    with pytest.raises(SimError):
        d.fractions()
