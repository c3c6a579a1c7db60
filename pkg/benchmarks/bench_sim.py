"""Compare the compiled permutation kernel with the numpy fallback.

Two workloads: the synthesized circuit of a bundled program (after its Hadamard
layer, so every basis state of the input superposition is live) and a random
batch of multi-controlled X and controlled swap gates.  Both kernels must leave
identical keys; the script exits non-zero otherwise.

    python3 benchmarks/bench_sim.py --program fig1 --width 6 --repeat 5
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from qex.circuit import Gate, x_gate
from qex.corpus import find
from qex.sim import _fallback, encode, run
from qex.sim.state import init
from qex.synth import SynthOptions, synthesize

try:
    from qex.sim import _kernels
except ImportError:
    _kernels = None


def program_workload(name: str, width: int):
    cp = find(name)
    res = synthesize(cp.program, None, SynthOptions(width=width, unroll=cp.unroll))
    gates = res.circuit.gates
    k = 0
    while k < len(gates) and not gates[k].is_permutation:
        k += 1
    state = run(gates[:k], res.initial_state())
    perm = [g for g in gates[k:] if g.is_permutation]
    return f"{name} (width {width})", state.keys, encode(perm), len(perm)


def random_workload(n_qubits: int, n_states: int, n_gates: int, seed: int):
    rng = np.random.default_rng(seed)
    words = (n_qubits + 63) // 64
    keys = rng.integers(0, np.iinfo(np.uint64).max, size=(n_states, words), dtype=np.uint64,
                        endpoint=True)
    if n_qubits % 64:
        keys[:, -1] &= np.uint64((1 << (n_qubits % 64)) - 1)
    keys = np.unique(keys, axis=0)
    gates = []
    for _ in range(n_gates):
        q = [int(x) for x in rng.choice(n_qubits, size=4, replace=False)]
        nc = int(rng.integers(0, 3))
        if rng.random() < 0.8:
            gates.append(x_gate(q[0], q[1:1 + nc]))
        else:
            gates.append(Gate("SWAP", (q[0], q[1])).lifted(q[2:2 + nc]))
    return f"random ({n_qubits} qubits)", np.ascontiguousarray(keys), encode(gates), n_gates


def best_time(fn, keys: np.ndarray, ops: np.ndarray, repeat: int):
    best, out = float("inf"), None
    for _ in range(repeat):
        k = keys.copy()
        t0 = time.perf_counter()
        fn(k, ops)
        best = min(best, time.perf_counter() - t0)
        out = k
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--program", default="fig1")
    ap.add_argument("--width", type=int, default=6)
    ap.add_argument("--qubits", type=int, default=40)
    ap.add_argument("--states", type=int, default=20000)
    ap.add_argument("--gates", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    rows = []
    workloads = [program_workload(args.program, args.width),
                 random_workload(args.qubits, args.states, args.gates, args.seed)]
    if args.qubits <= 64:
        # a second random batch wide enough to take the multi-word path
        workloads.append(random_workload(args.qubits + 64, args.states, args.gates, args.seed))
    for label, keys, ops, n in workloads:
        t_c, k_c = best_time(_kernels.apply_perm, keys, ops, args.repeat)
        t_py, k_py = best_time(_fallback.apply_perm, keys, ops, args.repeat)
        if not np.array_equal(k_c, k_py):
            print(f"{label}: kernels disagree", file=sys.stderr)
            return 1
        rows.append({"workload": label, "states": int(keys.shape[0]), "gates": n,
                     "cython_s": round(t_c, 6), "numpy_s": round(t_py, 6),
                     "speedup": round(t_py / t_c, 1) if t_c else None})
    w = max(len(r["workload"]) for r in rows)
    print(f"{'workload':<{w}}  {'states':>7}  {'gates':>6}  {'cython s':>9}  {'numpy s':>9}  speedup")
    for r in rows:
        print(f"{r['workload']:<{w}}  {r['states']:>7}  {r['gates']:>6}  {r['cython_s']:>9.4f}  "
              f"{r['numpy_s']:>9.4f}  {r['speedup']:>6}x")
    print(json.dumps(rows), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
