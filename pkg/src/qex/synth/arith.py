"""Reversible arithmetic kernels.

Registers are qubit lists, least significant bit first.  Every kernel takes an
``emit(gate, lift=True)`` callback; the compiler uses ``lift`` to decide whether a
gate picks up the enclosing branch control.  Out-of-place kernels write into a
zero-initialized result register and leave both operands unchanged.
"""
from __future__ import annotations

import math
from typing import Callable, List, Optional, Sequence

from ..circuit import Gate, x_gate

Emit = Callable[..., None]
Qs = Sequence[int]


def _cx(emit: Emit, c: int, t: int, ctrls: Qs = ()) -> None:
    emit(x_gate(t, tuple(ctrls) + (c,)))


def _ccx(emit: Emit, a: int, b: int, t: int, ctrls: Qs = ()) -> None:
    emit(x_gate(t, tuple(ctrls) + (a, b)))


def prepare_constant(emit: Emit, reg: Qs, value: int, previous: int = 0) -> None:
    """X gates turning ``previous`` into ``value`` on ``reg`` (never control-lifted)."""
    diff = value ^ previous
    for i, q in enumerate(reg):
        if (diff >> i) & 1:
            emit(x_gate(q), lift=False)


def copy(emit: Emit, src: Qs, dst: Qs, ctrls: Qs = ()) -> None:
    """``dst ^= src`` bitwise (a copy when ``dst`` is zero)."""
    for s, d in zip(src, dst):
        _cx(emit, s, d, ctrls)


# -- out-of-place ripple adder / subtractor ---------------------------------

def add_out(emit: Emit, a: Qs, b: Qs, r: Qs) -> None:
    """``r := a + b``; ``r`` may be one bit wider than the operands to keep the carry.

    Bit ``j`` of ``r`` first holds the incoming carry, so the outgoing carry
    ``maj(a_j, b_j, c_j)`` is three Toffolis into ``r[j+1]`` before ``r[j]`` absorbs
    ``a_j`` and ``b_j``.
    """
    w = len(a)
    for j in range(w):
        if j + 1 < len(r):
            _ccx(emit, a[j], b[j], r[j + 1])
            if j > 0:
                _ccx(emit, a[j], r[j], r[j + 1])
                _ccx(emit, b[j], r[j], r[j + 1])
        _cx(emit, a[j], r[j])
        _cx(emit, b[j], r[j])


def sub_out(emit: Emit, a: Qs, b: Qs, r: Qs) -> None:
    """``r := a - b`` (mod ``2**len(r)``); with a wider ``r`` the top bit is the borrow.

    The borrow out of bit ``j`` is ``maj(not a_j, b_j, borrow_j)``.
    """
    w = len(a)
    for j in range(w):
        if j + 1 < len(r):
            emit(x_gate(a[j]))
            _ccx(emit, a[j], b[j], r[j + 1])
            if j > 0:
                _ccx(emit, a[j], r[j], r[j + 1])
                _ccx(emit, b[j], r[j], r[j + 1])
            emit(x_gate(a[j]))
        _cx(emit, a[j], r[j])
        _cx(emit, b[j], r[j])


# -- in-place ripple adder (one carry ancilla) -------------------------------

def _maj(emit, c, b, a, ctrls):
    _cx(emit, a, b, ctrls)
    _cx(emit, a, c, ctrls)
    _ccx(emit, c, b, a, ctrls)


def _uma(emit, c, b, a, ctrls):
    _ccx(emit, c, b, a, ctrls)
    _cx(emit, a, c, ctrls)
    _cx(emit, c, b, ctrls)


def add_in(emit: Emit, a: Qs, b: Qs, anc: int, ctrls: Qs = ()) -> None:
    """``b := b + a`` mod ``2**len(b)`` in place; ``a`` restored, ``anc`` zero in and out.

    ``a`` may be shorter than ``b`` only if the caller zero-extends it; the two are
    zipped bit by bit.
    """
    n = len(b)
    if len(a) != n:
        raise ValueError("in-place adder needs equal-width operands")
    carries = [anc] + list(a[:-1])
    for i in range(n):
        _maj(emit, carries[i], b[i], a[i], ctrls)
    for i in reversed(range(n)):
        _uma(emit, carries[i], b[i], a[i], ctrls)


def sub_in(emit: Emit, a: Qs, b: Qs, anc: int, ctrls: Qs = ()) -> None:
    """``b := b - a`` mod ``2**len(b)`` as ``not(not b + a)``."""
    for q in b:
        emit(x_gate(q, tuple(ctrls)))
    add_in(emit, a, b, anc, ctrls)
    for q in b:
        emit(x_gate(q, tuple(ctrls)))


def increment(emit: Emit, reg: Qs, ctrls: Qs = ()) -> None:
    """``reg := reg + 1`` mod ``2**len(reg)`` as a cascade of multi-controlled X."""
    for i in reversed(range(len(reg))):
        emit(x_gate(reg[i], tuple(ctrls) + tuple(reg[:i])))


def match_pattern(emit: Emit, reg: Qs, value: int, target: int, ctrls: Qs = ()) -> None:
    """``target ^= [reg == value]`` (and all ``ctrls``) via X-conjugated controls."""
    flips = [q for i, q in enumerate(reg) if not (value >> i) & 1]
    for q in flips:
        emit(x_gate(q), lift=False)
    emit(x_gate(target, tuple(ctrls) + tuple(reg)))
    for q in flips:
        emit(x_gate(q), lift=False)


# -- multiplier and divider --------------------------------------------------

def mul_out(emit: Emit, a: Qs, b: Qs, r: Qs, anc: int) -> None:
    """``r := a * b`` mod ``2**len(r)`` by shift-and-add, each add controlled on ``b_i``."""
    w = len(r)
    for i in range(w):
        add_in(emit, a[:w - i], r[i:], anc, ctrls=(b[i],))


def div_out(emit: Emit, a: Qs, b: Qs, q: Qs, work: Qs, anc: Sequence[int]) -> None:
    """``q := a / b`` (floor), with ``a / 0 = 0``.

    Restoring division on the ``2w``-qubit ``work`` register (``a`` copied into its low
    half).  ``anc`` holds three zero qubits: carry, zero extension of ``b`` and the
    ``b != 0`` flag that controls the whole division.  ``work`` keeps the remainder
    and is left as garbage; the flag is returned to zero.
    """
    w = len(q)
    carry, ext, flag = anc
    # flag := [b != 0]
    match_pattern(emit, b, 0, flag)
    emit(x_gate(flag))
    f = (flag,)
    copy(emit, a, work[:w], f)
    divisor = list(b) + [ext]
    for i in reversed(range(w)):
        window = work[i:i + w + 1]
        sub_in(emit, divisor, window, carry, f)
        # the window's top bit is now the borrow: copy it out, then add b back if set
        _cx(emit, window[-1], q[i], f)
        add_in(emit, divisor, window, carry, f + (q[i],))
        emit(x_gate(q[i], f))
    emit(x_gate(flag))
    match_pattern(emit, b, 0, flag)


# -- Fourier-basis (Draper) kernels ------------------------------------------

def qft(emit: Emit, reg: Qs) -> None:
    """Transform without the final bit reversal; qubit ``j`` ends with phase x/2^(j+1)."""
    n = len(reg)
    for j in reversed(range(n)):
        emit(Gate("H", (reg[j],)), lift=False)
        for k in reversed(range(j)):
            emit(Gate("CPHASE", (reg[j],), (reg[k],), (math.pi / (1 << (j - k)),)), lift=False)


def iqft(emit: Emit, reg: Qs) -> None:
    gates: List[Gate] = []
    qft(lambda g, lift=True: gates.append(g), reg)
    for g in reversed(gates):
        emit(g.inverse(), lift=False)


def phase_add(emit: Emit, a: Qs, r: Qs, sign: int = 1) -> None:
    """Add (``sign=-1``: subtract) ``a`` to the Fourier-transformed ``r``."""
    for j in range(len(r)):
        for k in range(min(j + 1, len(a))):
            emit(Gate("CPHASE", (r[j],), (a[k],), (sign * math.pi / (1 << (j - k)),)))


def draper_add(emit: Emit, a: Qs, r: Qs, sign: int = 1) -> None:
    """``r := r + a`` (or ``r - a``) mod ``2**len(r)`` in place; 3n(n+1)/2 gates at n = len(r)."""
    qft(emit, r)
    phase_add(emit, a, r, sign)
    iqft(emit, r)


def fourier_add_out(emit: Emit, a: Qs, b: Qs, r: Qs) -> None:
    copy(emit, a, r)
    draper_add(emit, b, r)


def fourier_sub_out(emit: Emit, a: Qs, b: Qs, r: Qs) -> None:
    copy(emit, a, r)
    draper_add(emit, b, r, sign=-1)
