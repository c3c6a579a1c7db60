# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: apply a batch of permutation gates to packed basis keys in place.

``ops`` is a flat int64 program; each gate is ``code, n_controls, controls..., targets...``
with code 0 = (multi-)controlled X on one target and code 1 = (controlled) swap of two
targets.  Keys are rows of 64-bit words, qubit ``q`` living in bit ``q & 63`` of word
``q >> 6``.  Iterating state-major keeps each key row hot in cache for the whole batch.
"""
from libc.stdint cimport int64_t, uint64_t

import numpy as np


cdef void _apply_one_word(uint64_t[:, ::1] keys, const uint64_t[::1] cmask,
                          const uint64_t[::1] tmask, const int64_t[::1] code) noexcept nogil:
    """Fast path for states that fit one word: each gate is pre-decoded into masks."""
    cdef Py_ssize_t i, g, n_gates = cmask.shape[0]
    cdef uint64_t k, c, t
    for i in range(keys.shape[0]):
        k = keys[i, 0]
        for g in range(n_gates):
            c = cmask[g]
            if (k & c) != c:
                continue
            t = tmask[g]
            if code[g] == 0:
                k ^= t
            elif (k & t) != 0 and (k & t) != t:
                k ^= t
        keys[i, 0] = k


def apply_perm(uint64_t[:, ::1] keys, const int64_t[::1] ops):
    cdef Py_ssize_t n_states = keys.shape[0]
    cdef Py_ssize_t n_ops = ops.shape[0]
    cdef Py_ssize_t i, p, j, nc
    cdef int64_t code, q, t0, t1
    cdef uint64_t b0, b1, one = 1
    cdef bint fire
    if keys.shape[1] == 1:
        _decode_and_apply(keys, ops)
        return
    with nogil:
        for i in range(n_states):
            p = 0
            while p < n_ops:
                code = ops[p]
                nc = ops[p + 1]
                p += 2
                fire = True
                for j in range(nc):
                    q = ops[p + j]
                    if not ((keys[i, q >> 6] >> (q & 63)) & one):
                        fire = False
                        break
                p += nc
                t0 = ops[p]
                p += 1
                if code == 0:
                    if fire:
                        keys[i, t0 >> 6] ^= one << (t0 & 63)
                else:
                    t1 = ops[p]
                    p += 1
                    if fire:
                        b0 = (keys[i, t0 >> 6] >> (t0 & 63)) & one
                        b1 = (keys[i, t1 >> 6] >> (t1 & 63)) & one
                        if b0 != b1:
                            keys[i, t0 >> 6] ^= one << (t0 & 63)
                            keys[i, t1 >> 6] ^= one << (t1 & 63)


cdef _decode_and_apply(uint64_t[:, ::1] keys, const int64_t[::1] ops):
    cdef list cm = [], tm = [], codes = []
    cdef Py_ssize_t p = 0, n = ops.shape[0], j, nc
    cdef uint64_t c, one = 1
    cdef int64_t kind
    while p < n:
        kind = ops[p]
        codes.append(kind)
        nc = ops[p + 1]
        p += 2
        c = 0
        for j in range(nc):
            c |= one << ops[p + j]
        p += nc
        cm.append(c)
        if kind == 0:
            tm.append(one << ops[p])
            p += 1
        else:
            tm.append((one << ops[p]) | (one << ops[p + 1]))
            p += 2
    cdef uint64_t[::1] cmask = np.array(cm, dtype=np.uint64)
    cdef uint64_t[::1] tmask = np.array(tm, dtype=np.uint64)
    cdef int64_t[::1] code = np.array(codes, dtype=np.int64)
    with nogil:
        _apply_one_word(keys, cmask, tmask, code)
