"""Exact sparse statevector simulation.

A state is a pair of parallel arrays: ``keys`` (``S x W`` uint64 words, one row per
basis string in the support, qubit ``q`` at bit ``q & 63`` of word ``q >> 6``) and
``amps`` (complex128).  Rows are kept sorted so identical runs give identical
states.  Permutation gates only relabel rows and are batched into one kernel call;
H and U3 split every row in two and merge duplicates; phase gates scale in place.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..circuit import Circuit, Gate, Register
from . import apply_perm

PRUNE = 1e-12
NORM_TOL = 1e-9
_ONE = np.uint64(1)

Qubits = Union[Register, Sequence[int]]


class SimError(RuntimeError):
    pass


def _qubits(reg: Qubits) -> Tuple[int, ...]:
    return tuple(reg.qubits) if isinstance(reg, Register) else tuple(reg)


def _words(n_qubits: int) -> int:
    return max(1, (n_qubits + 63) // 64)


@dataclass
class SparseState:
    n_qubits: int
    keys: np.ndarray
    amps: np.ndarray
    # number of equally weighted input tuples the state was prepared from, when known
    den: Optional[int] = None

    @classmethod
    def zero(cls, n_qubits: int) -> "SparseState":
        return cls(n_qubits, np.zeros((1, _words(n_qubits)), dtype=np.uint64),
                   np.ones(1, dtype=np.complex128), 1)

    def copy(self) -> "SparseState":
        return SparseState(self.n_qubits, self.keys.copy(), self.amps.copy(), self.den)

    def __len__(self) -> int:
        return len(self.amps)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def basis_ints(self) -> List[int]:
        out = []
        for row in self.keys:
            v = 0
            for w, word in enumerate(row):
                v |= int(word) << (64 * w)
            out.append(v)
        return out

    def to_dict(self) -> Dict[int, complex]:
        return {b: complex(a) for b, a in zip(self.basis_ints(), self.amps)}

    def amplitude(self, basis: int) -> complex:
        return self.to_dict().get(basis, 0j)

    def bits(self, q: int) -> np.ndarray:
        return ((self.keys[:, q >> 6] >> np.uint64(q & 63)) & _ONE).astype(np.int64)

    def values(self, reg: Qubits) -> np.ndarray:
        """Integer value of ``reg`` (qubit i = bit i) in every support row."""
        out = np.zeros(len(self.amps), dtype=np.int64)
        for i, q in enumerate(_qubits(reg)):
            out |= self.bits(q) << i
        return out

    def _sort(self) -> None:
        order = np.lexsort(self.keys.T[::-1])
        self.keys = np.ascontiguousarray(self.keys[order])
        self.amps = self.amps[order]


# -- initialization ----------------------------------------------------------

def _pack(qubits: Sequence[int], values: Iterable[int], n_words: int) -> np.ndarray:
    vals = list(values)
    out = np.zeros((len(vals), n_words), dtype=np.uint64)
    for row, v in enumerate(vals):
        if v < 0 or v >> len(qubits):
            raise SimError(f"value {v} does not fit a {len(qubits)}-qubit register")
        for i, q in enumerate(qubits):
            if (v >> i) & 1:
                out[row, q >> 6] |= _ONE << np.uint64(q & 63)
    return out


def init(n_qubits: int, assignments: Optional[Mapping] = None,
         joint: Sequence[Tuple[Sequence[Qubits], Mapping[tuple, int]]] = ()) -> SparseState:
    """Product state: listed registers in uniform superposition over their value sets.

    ``assignments`` maps a register (or qubit tuple) to ``"zero"`` or an iterable of
    values.  Each ``joint`` entry ``(registers, {tuple: count})`` prepares the
    registers jointly with probability ``count / sum(counts)`` per tuple.
    """
    n_words = _words(n_qubits)
    used: Dict[int, str] = {}

    def claim(qs, label):
        for q in qs:
            if not 0 <= q < n_qubits:
                raise SimError(f"qubit {q} outside a {n_qubits}-qubit state")
            if q in used:
                raise SimError(f"registers {used[q]} and {label} overlap at qubit {q}")
            used[q] = label

    keys = np.zeros((1, n_words), dtype=np.uint64)
    weights = np.ones(1, dtype=np.int64)
    den = 1
    groups = []
    for reg, spec in (assignments or {}).items():
        qs = _qubits(reg)
        claim(qs, getattr(reg, "name", str(qs)))
        if isinstance(spec, str):
            if spec != "zero":
                raise SimError(f"unknown initial assignment {spec!r}")
            continue
        vals = sorted(set(int(v) for v in spec))
        if not vals:
            raise SimError("empty value set")
        groups.append((_pack(qs, vals, n_words), np.ones(len(vals), dtype=np.int64)))
    for regs, counts in joint:
        qss = [_qubits(r) for r in regs]
        for r, qs in zip(regs, qss):
            claim(qs, getattr(r, "name", str(qs)))
        items = sorted((tuple(k), int(c)) for k, c in counts.items() if c > 0)
        if not items:
            raise SimError("empty joint value set")
        part = np.zeros((len(items), n_words), dtype=np.uint64)
        for qs, col in zip(qss, zip(*(k for k, _ in items))):
            part |= _pack(qs, col, n_words)
        groups.append((part, np.array([c for _, c in items], dtype=np.int64)))
    for part, w in groups:
        keys = (keys[:, None, :] | part[None, :, :]).reshape(-1, n_words)
        weights = (weights[:, None] * w[None, :]).reshape(-1)
        den *= int(w.sum())
    amps = np.sqrt(weights / den).astype(np.complex128)
    s = SparseState(n_qubits, np.ascontiguousarray(keys), amps, den)
    s._sort()
    return s


# -- gate application --------------------------------------------------------

def encode(gates: Sequence[Gate]) -> np.ndarray:
    """Flat kernel program for a run of permutation gates."""
    ops: List[int] = []
    for g in gates:
        ops.append(0 if len(g.targets) == 1 else 1)
        ops.append(len(g.controls))
        ops.extend(g.controls)
        ops.extend(g.targets)
    return np.asarray(ops, dtype=np.int64)


def _control_mask(s: SparseState, controls: Sequence[int]) -> np.ndarray:
    mask = np.ones(len(s.amps), dtype=bool)
    for q in controls:
        mask &= s.bits(q).astype(bool)
    return mask


def _unitary(g: Gate) -> np.ndarray:
    if g.kind == "H":
        r = 1 / math.sqrt(2)
        return np.array([[r, r], [r, -r]], dtype=np.complex128)
    theta, phi, lam = g.params
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -np.exp(1j * lam) * s],
                     [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]], dtype=np.complex128)


def _merge(s: SparseState, keys: np.ndarray, amps: np.ndarray, prune: float) -> None:
    if keys.shape[1] == 1:
        uniq, inv = np.unique(keys[:, 0], return_inverse=True)
        uniq = uniq.reshape(-1, 1)
    else:
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    re = np.bincount(inv, weights=amps.real, minlength=len(uniq))
    im = np.bincount(inv, weights=amps.imag, minlength=len(uniq))
    merged = re + 1j * im
    keep = np.abs(merged) >= prune
    s.keys = np.ascontiguousarray(uniq[keep])
    s.amps = merged[keep]


def _apply_single(s: SparseState, g: Gate, prune: float) -> None:
    if g.kind in ("PHASE", "CPHASE"):
        mask = _control_mask(s, g.controls + g.targets)
        s.amps = s.amps.copy()
        s.amps[mask] *= np.exp(1j * g.params[0])
        return
    if g.controls:
        raise SimError(f"controlled {g.kind} is not supported")
    u = _unitary(g)
    t = g.targets[0]
    w, sh = t >> 6, np.uint64(t & 63)
    bit = s.bits(t)
    k0 = s.keys.copy()
    k0[:, w] &= ~(_ONE << sh)
    k1 = k0.copy()
    k1[:, w] |= _ONE << sh
    a0 = u[0, bit] * s.amps
    a1 = u[1, bit] * s.amps
    _merge(s, np.concatenate([k0, k1]), np.concatenate([a0, a1]), prune)
    s.den = None


def apply(s: SparseState, g: Gate, prune: float = PRUNE) -> SparseState:
    """Return a new state with ``g`` applied."""
    out = s.copy()
    if g.is_permutation:
        apply_perm(out.keys, encode([g]))
        out._sort()
    else:
        _apply_single(out, g, prune)
    return out


def run(c: Union[Circuit, Sequence[Gate]], s0: SparseState, check_norm: bool = False,
        prune: float = PRUNE, observer: Optional[Callable[[int, SparseState], None]] = None
        ) -> SparseState:
    """Apply every gate of ``c`` left to right.

    Runs of permutation gates go to the kernel in one batch unless ``observer`` is
    given, in which case gates are applied one at a time and ``observer(i, state)``
    is called after each.
    """
    gates = c.gates if isinstance(c, Circuit) else list(c)
    if isinstance(c, Circuit) and c.n_qubits != s0.n_qubits:
        raise SimError(f"circuit has {c.n_qubits} qubits, state has {s0.n_qubits}")
    s = s0.copy()
    i = 0
    while i < len(gates):
        g = gates[i]
        if g.is_permutation and observer is None:
            j = i
            while j < len(gates) and gates[j].is_permutation:
                j += 1
            apply_perm(s.keys, encode(gates[i:j]))
            i = j
        else:
            if g.is_permutation:
                apply_perm(s.keys, encode([g]))
            else:
                _apply_single(s, g, prune)
            i += 1
        if check_norm and abs(s.norm() - 1) > NORM_TOL:
            raise SimError(f"norm drifted to {s.norm():.12f} after gate {i - 1}")
        if observer is not None:
            observer(i - 1, s)
    s._sort()
    return s


# -- readout -----------------------------------------------------------------

@dataclass
class Distribution:
    """Probabilities over register values (tuples for joint readouts).

    ``den`` is set when every probability is an exact multiple of ``1/den``; then
    ``counts`` holds the numerators.
    """
    probs: Dict = field(default_factory=dict)
    den: Optional[int] = None
    counts: Optional[Dict] = None

    def support(self) -> set:
        return set(self.probs)

    def prob(self, value) -> float:
        return self.probs.get(value, 0.0)

    @property
    def exact(self) -> bool:
        return self.counts is not None

    def fractions(self) -> Dict:
        if self.counts is None:
            raise SimError("distribution has no exact rational form")
        return {v: Fraction(c, self.den) for v, c in self.counts.items()}

    def to_json(self) -> dict:
        def key(v):
            return ",".join(map(str, v)) if isinstance(v, tuple) else str(v)
        if self.counts is not None:
            return {key(v): {"num": c, "den": self.den} for v, c in self.counts.items()}
        return {key(v): p for v, p in self.probs.items()}


def _distribution(labels: List, probs: np.ndarray, den: Optional[int]) -> Distribution:
    acc: Dict = {}
    for v, p in zip(labels, probs):
        acc[v] = acc.get(v, 0.0) + float(p)
    acc = {v: p for v, p in sorted(acc.items()) if p > PRUNE}
    counts = None
    if den:
        scaled = {v: p * den for v, p in acc.items()}
        rounded = {v: round(x) for v, x in scaled.items()}
        if all(abs(scaled[v] - rounded[v]) < 1e-6 and rounded[v] > 0 for v in acc):
            counts = rounded
    return Distribution(acc, den if counts is not None else None, counts)


def marginal(s: SparseState, reg: Qubits, den: Optional[int] = None) -> Distribution:
    """Distribution of one register's value; exact when ``den`` (or the state's) fits."""
    vals = s.values(reg)
    return _distribution([int(v) for v in vals], np.abs(s.amps) ** 2, den or s.den)


def joint(s: SparseState, regs: Sequence[Qubits], den: Optional[int] = None) -> Distribution:
    """Distribution over value tuples of several disjoint registers."""
    seen: set = set()
    for r in regs:
        qs = set(_qubits(r))
        if qs & seen:
            raise SimError("joint readout over overlapping registers")
        seen |= qs
    cols = [s.values(r) for r in regs]
    labels = [tuple(int(c[i]) for c in cols) for i in range(len(s.amps))]
    return _distribution(labels, np.abs(s.amps) ** 2, den or s.den)


def sample(s: SparseState, regs: Union[Qubits, Sequence[Qubits]], shots: int,
           seed: Optional[int] = None) -> Counter:
    """``shots`` i.i.d. measurements of the given register(s); keys are values or tuples."""
    if shots < 1:
        raise SimError("shots must be at least 1")
    single = isinstance(regs, Register) or (len(regs) > 0 and isinstance(regs[0], (int, np.integer)))
    regs_list = [regs] if single else list(regs)
    probs = np.abs(s.amps) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(probs), size=shots, p=probs)
    cols = [s.values(r) for r in regs_list]
    out: Counter = Counter()
    for i in idx:
        v = tuple(int(c[i]) for c in cols)
        out[v[0] if single else v] += 1
    return Counter(dict(sorted(out.items())))


def dump(s: SparseState) -> str:
    """JSON list of ``{"basis", "re", "im"}`` sorted by basis string (qubit 0 rightmost)."""
    rows = []
    for b, a in zip(s.basis_ints(), s.amps):
        rows.append({"basis": format(b, f"0{s.n_qubits}b"), "re": float(a.real), "im": float(a.imag)})
    rows.sort(key=lambda r: r["basis"])
    return json.dumps(rows)
