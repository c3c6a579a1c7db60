"""Each reversible kernel checked on every input pair at small widths."""
from __future__ import annotations

import itertools

import pytest

from qex.circuit import depth, x_gate
from qex.sim import init, joint, run
from qex.synth import arith


def build(kernel, *args, **kw):
    gates = []
    kernel(lambda g, lift=True: gates.append(g), *args, **kw)
    return gates


def regs(*widths):
    out, q = [], 0
    for w in widths:
        out.append(tuple(range(q, q + w)))
        q += w
    return out, q


def outcomes(gates, n, inputs, read):
    """Map each basis input tuple to the tuple of ``read`` register values.

    Inputs are first copied into shadow qubits so in-place kernels can be read back.
    """
    shadows, pre, top = [], [], n
    for r in inputs:
        sh = tuple(range(top, top + len(r)))
        top += len(r)
        shadows.append(sh)
        pre += [x_gate(t, (q,)) for q, t in zip(r, sh)]
    s = run(pre + list(gates), init(top, {r: vals for r, vals in inputs.items()}))
    d = joint(s, shadows + list(read))
    k = len(inputs)
    table = {}
    for key in d.probs:
        assert key[:k] not in table, "kernel is not a function of its inputs"
        table[key[:k]] = key[k:]
    return table


W = 3
ALL = list(range(1 << W))


@pytest.mark.parametrize("wide", [False, True])
def test_add_out(wide):
    (a, b, r), n = regs(W, W, W + wide)
    t = outcomes(build(arith.add_out, a, b, r), n, {a: ALL, b: ALL}, [r])
    mod = 1 << len(r)
    assert t == {(x, y): ((x + y) % mod,) for x in ALL for y in ALL}


@pytest.mark.parametrize("wide", [False, True])
def test_sub_out(wide):
    (a, b, r), n = regs(W, W, W + wide)
    t = outcomes(build(arith.sub_out, a, b, r), n, {a: ALL, b: ALL}, [r])
    mod = 1 << len(r)
    assert t == {(x, y): ((x - y) % mod,) for x in ALL for y in ALL}


def test_sub_out_top_bit_is_borrow():
    (a, b, r), n = regs(W, W, W + 1)
    t = outcomes(build(arith.sub_out, a, b, r), n, {a: ALL, b: ALL}, [r])
    assert all((v[0] >> W) == (x < y) for (x, y), v in t.items())


@pytest.mark.parametrize("ctrl", [False, True])
def test_add_in_and_sub_in(ctrl):
    (a, b, anc, c), n = regs(W, W, 1, 1)
    ctrls = c if ctrl else ()
    cvals = [0, 1] if ctrl else [0]
    for kernel, sign in ((arith.add_in, 1), (arith.sub_in, -1)):
        t = outcomes(build(kernel, a, b, anc[0], ctrls), n, {a: ALL, b: ALL, c: cvals}, [b, anc])
        for (x, y, on), (out, carry) in t.items():
            fire = on or not ctrl
            assert out == ((y + sign * x) % (1 << W) if fire else y)
            assert carry == 0


def test_mul_out():
    (a, b, r, anc), n = regs(W, W, W, 1)
    t = outcomes(build(arith.mul_out, a, b, r, anc[0]), n, {a: ALL, b: ALL}, [r, anc])
    assert t == {(x, y): ((x * y) % (1 << W), 0) for x in ALL for y in ALL}


def test_div_out_including_zero_divisor():
    (a, b, q, work, anc), n = regs(W, W, W, 2 * W, 3)
    t = outcomes(build(arith.div_out, a, b, q, work, anc), n, {a: ALL, b: ALL}, [q, anc])
    assert t == {(x, y): (x // y if y else 0, 0) for x in ALL for y in ALL}


def test_increment_and_match_pattern():
    (r, t_), n = regs(W, 1)
    t = outcomes(build(arith.increment, r), n, {r: ALL}, [r])
    assert t == {(x,): ((x + 1) % (1 << W),) for x in ALL}
    for value in (0, 5):
        t = outcomes(build(arith.match_pattern, r, value, t_[0]), n, {r: ALL}, [t_])
        assert t == {(x,): (int(x == value),) for x in ALL}


def test_copy_xors_into_destination():
    (a, b), n = regs(W, W)
    t = outcomes(build(arith.copy, a, b), n, {a: ALL, b: [0, 5]}, [b])
    assert t == {(x, y): (x ^ y,) for x in ALL for y in (0, 5)}


@pytest.mark.parametrize("sign", [1, -1])
def test_draper_add_matches_ripple(sign):
    (a, r), n = regs(W + 1, W + 1)
    vals = list(range(1 << (W + 1)))
    t = outcomes(build(arith.draper_add, a, r, sign), n, {a: vals, r: vals}, [r])
    mod = 1 << (W + 1)
    assert t == {(x, y): ((y + sign * x) % mod,) for x in vals for y in vals}


def test_fourier_out_of_place():
    (a, b, r), n = regs(W, W, W)
    t = outcomes(build(arith.fourier_add_out, a, b, r), n, {a: ALL, b: ALL}, [r])
    assert t == {(x, y): ((x + y) % 8,) for x in ALL for y in ALL}
    t = outcomes(build(arith.fourier_sub_out, a, b, r), n, {a: ALL, b: ALL}, [r])
    assert t == {(x, y): ((x - y) % 8,) for x in ALL for y in ALL}


def test_draper_gate_count_is_quadratic():
    for w in range(1, 6):
        (a, r), _ = regs(w, w)
        gates = build(arith.draper_add, a, r)
        assert len(gates) == 3 * w * (w + 1) // 2


def test_in_place_adder_rejects_mismatched_widths():
    with pytest.raises(ValueError):
        build(arith.add_in, (0, 1), (2, 3, 4), 5)


def test_ripple_adder_depth_is_linear():
    ds = []
    for w in (4, 8, 16):
        (a, b, r), _ = regs(w, w, w + 1)
        ds.append(depth(build(arith.add_out, a, b, r)))
    assert ds[2] - ds[1] == 2 * (ds[1] - ds[0])
