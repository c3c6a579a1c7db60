"""Pure numpy twin of the compiled permutation kernel (same ``ops`` encoding)."""
from __future__ import annotations

import numpy as np

_ONE = np.uint64(1)


def _bit(keys: np.ndarray, q: int) -> np.ndarray:
    return (keys[:, q >> 6] >> np.uint64(q & 63)) & _ONE


def apply_perm(keys: np.ndarray, ops: np.ndarray) -> None:
    """Apply the encoded gate batch to ``keys`` (shape ``(S, W)``, uint64) in place."""
    ops = [int(x) for x in ops]
    p = 0
    while p < len(ops):
        code, nc = ops[p], ops[p + 1]
        p += 2
        fire = np.ones(keys.shape[0], dtype=bool)
        for q in ops[p:p + nc]:
            fire &= _bit(keys, q).astype(bool)
        p += nc
        t0 = ops[p]
        p += 1
        if code == 0:
            keys[fire, t0 >> 6] ^= _ONE << np.uint64(t0 & 63)
            continue
        t1 = ops[p]
        p += 1
        fire &= _bit(keys, t0) != _bit(keys, t1)
        keys[fire, t0 >> 6] ^= _ONE << np.uint64(t0 & 63)
        keys[fire, t1 >> 6] ^= _ONE << np.uint64(t1 & 63)
