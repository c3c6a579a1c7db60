"""Dense reference simulator used to cross-check the sparse one on tiny circuits."""
from __future__ import annotations

import math

import numpy as np


def _single(g) -> np.ndarray:
    if g.kind == "H":
        r = 1 / math.sqrt(2)
        return np.array([[r, r], [r, -r]], dtype=complex)
    if g.kind in ("PHASE", "CPHASE"):
        return np.diag([1, np.exp(1j * g.params[0])])
    if g.kind in ("X", "CX", "CCX", "MCX"):
        return np.array([[0, 1], [1, 0]], dtype=complex)
    t, p, l = g.params
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -np.exp(1j * l) * s], [np.exp(1j * p) * s, np.exp(1j * (p + l)) * c]])


def apply(vec: np.ndarray, g, n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    fire = np.ones(1 << n, dtype=bool)
    for q in g.controls:
        fire &= ((idx >> q) & 1).astype(bool)
    out = vec.copy()
    if g.kind in ("SWAP", "CSWAP"):
        a, b = g.targets
        ba, bb = (idx >> a) & 1, (idx >> b) & 1
        move = fire & (ba != bb)
        partner = idx ^ (1 << a) ^ (1 << b)
        out[move] = vec[partner[move]]
        return out
    u = _single(g)
    t = g.targets[0]
    bit = (idx >> t) & 1
    partner = idx ^ (1 << t)
    new = u[bit, bit] * vec + u[bit, 1 - bit] * vec[partner]
    out[fire] = new[fire]
    return out


def run(c, vec: np.ndarray) -> np.ndarray:
    for g in c.gates:
        vec = apply(vec, g, c.n_qubits)
    return vec


def from_sparse(s) -> np.ndarray:
    vec = np.zeros(1 << s.n_qubits, dtype=complex)
    for b, a in s.to_dict().items():
        vec[b] = a
    return vec
