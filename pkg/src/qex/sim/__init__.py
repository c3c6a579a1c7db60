"""Sparse statevector simulator.

The permutation-gate kernel is compiled with Cython when available; otherwise
(or when ``QEX_PURE_PYTHON=1``) the numpy implementation is used.  ``KERNEL``
names the one in use.
"""
import os

if os.environ.get("QEX_PURE_PYTHON") == "1":
    from ._fallback import apply_perm
    KERNEL = "numpy"
else:
    try:
        from ._kernels import apply_perm
        KERNEL = "cython"
    except ImportError:
        from ._fallback import apply_perm
        KERNEL = "numpy"

from .state import (Distribution, SimError, SparseState, apply, dump, encode, init, joint,
                    marginal, run, sample)

__all__ = ["KERNEL", "apply_perm", "Distribution", "SimError", "SparseState", "apply", "dump",
           "encode", "init", "joint", "marginal", "run", "sample"]
