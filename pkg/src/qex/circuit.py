"""Quantum circuit intermediate representation.

Qubit indices are global and dense; registers are named views onto them.  Every
gate may carry a provenance string (``"<stmt-id>:<what>"``) naming the source
statement that produced it.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

ROLES = ("value", "sign", "control", "immediate", "scratch", "counter")

# kind -> number of angle parameters
PARAMS = {"H": 0, "X": 0, "CX": 0, "CCX": 0, "MCX": 0, "SWAP": 0, "CSWAP": 0,
          "PHASE": 1, "CPHASE": 1, "U3": 3}
SELF_INVERSE = {"H", "X", "CX", "CCX", "MCX", "SWAP", "CSWAP"}
# gates whose matrix is a 0/1 permutation of the computational basis
PERMUTATION = {"X", "CX", "CCX", "MCX", "SWAP", "CSWAP"}


class CircuitError(ValueError):
    pass


def _x_kind(n_controls: int) -> str:
    return ("X", "CX", "CCX")[n_controls] if n_controls < 3 else "MCX"


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: Tuple[int, ...]
    controls: Tuple[int, ...] = ()
    params: Tuple[float, ...] = ()
    src: Optional[str] = None

    def __post_init__(self):
        if self.kind not in PARAMS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(self.params) != PARAMS[self.kind]:
            raise CircuitError(f"{self.kind} takes {PARAMS[self.kind]} parameters")
        nt = 2 if self.kind in ("SWAP", "CSWAP") else 1
        if len(self.targets) != nt:
            raise CircuitError(f"{self.kind} needs exactly {nt} target qubit(s)")
        nc = len(self.controls)
        want = {"H": 0, "X": 0, "CX": 1, "CCX": 2, "SWAP": 0, "PHASE": 0, "U3": 0}.get(self.kind)
        if want is not None and nc != want:
            raise CircuitError(f"{self.kind} takes {want} control(s), got {nc}")
        if self.kind == "MCX" and nc < 3:
            raise CircuitError("MCX needs at least 3 controls")
        if self.kind in ("CSWAP", "CPHASE") and nc < 1:
            raise CircuitError(f"{self.kind} needs at least one control")
        qs = self.qubits
        if len(set(qs)) != len(qs):
            raise CircuitError(f"{self.kind}: controls and targets must be distinct qubits")

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.controls + self.targets

    @property
    def is_permutation(self) -> bool:
        return self.kind in PERMUTATION

    def inverse(self) -> "Gate":
        if self.kind in SELF_INVERSE:
            return self
        if self.kind in ("PHASE", "CPHASE"):
            return replace(self, params=(-self.params[0],))
        theta, phi, lam = self.params
        return replace(self, params=(-theta, -lam, -phi))

    def lifted(self, extra: Sequence[int]) -> "Gate":
        """The same gate with additional control qubits."""
        if not extra:
            return self
        ctrls = tuple(extra) + self.controls
        if self.kind in ("X", "CX", "CCX", "MCX"):
            return Gate(_x_kind(len(ctrls)), self.targets, ctrls, (), self.src)
        if self.kind in ("SWAP", "CSWAP"):
            return Gate("CSWAP", self.targets, ctrls, (), self.src)
        if self.kind in ("PHASE", "CPHASE"):
            return Gate("CPHASE", self.targets, ctrls, self.params, self.src)
        raise CircuitError(f"{self.kind} cannot be control-lifted")

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.controls:
            out["controls"] = list(self.controls)
        out["targets"] = list(self.targets)
        if self.params:
            out["params"] = list(self.params)
        if self.src is not None:
            out["src"] = self.src
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "Gate":
        return cls(obj["kind"], tuple(obj["targets"]), tuple(obj.get("controls", ())),
                   tuple(float(x) for x in obj.get("params", ())), obj.get("src"))


def x_gate(target: int, controls: Sequence[int] = (), src: Optional[str] = None) -> Gate:
    """X with any number of controls (X, CX, CCX or MCX)."""
    return Gate(_x_kind(len(controls)), (target,), tuple(controls), (), src)


@dataclass
class Register:
    name: str
    qubits: Tuple[int, ...]
    role: str = "value"
    # a retired register no longer holds a live value; its qubits may be reused
    retired: bool = False

    def __post_init__(self):
        if self.role not in ROLES:
            raise CircuitError(f"unknown register role {self.role!r}")
        self.qubits = tuple(self.qubits)

    def __hash__(self) -> int:
        return hash((self.name, self.qubits))

    def __len__(self) -> int:
        return len(self.qubits)

    def __getitem__(self, i):
        return self.qubits[i]

    @property
    def sign(self) -> int:
        return self.qubits[-1]

    def to_json(self) -> dict:
        out = {"name": self.name, "role": self.role, "qubits": list(self.qubits)}
        if self.retired:
            out["retired"] = True
        return out


@dataclass
class Circuit:
    n_qubits: int = 0
    registers: List[Register] = field(default_factory=list)
    gates: List[Gate] = field(default_factory=list)

    # -- construction --
    def allocate(self, name: str, width: int, role: str = "value") -> Register:
        reg = Register(name, tuple(range(self.n_qubits, self.n_qubits + width)), role)
        self.n_qubits += width
        self.registers.append(reg)
        return reg

    def add_register(self, reg: Register) -> Register:
        self.registers.append(reg)
        return reg

    def append(self, gate: Gate) -> None:
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]) -> None:
        self.gates.extend(gates)

    def register(self, name: str) -> Register:
        for r in reversed(self.registers):
            if r.name == name:
                return r
        raise KeyError(name)

    def copy(self) -> "Circuit":
        return Circuit(self.n_qubits, [replace(r) for r in self.registers], list(self.gates))

    def __len__(self) -> int:
        return len(self.gates)

    # -- checks --
    def check(self) -> None:
        for i, g in enumerate(self.gates):
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise CircuitError(f"gate {i} ({g.kind}) uses qubit {q} >= {self.n_qubits}")
        owner: Dict[int, str] = {}
        for r in self.registers:
            if len(set(r.qubits)) != len(r.qubits):
                raise CircuitError(f"register {r.name} repeats a qubit")
            for q in r.qubits:
                if not 0 <= q < self.n_qubits:
                    raise CircuitError(f"register {r.name} uses qubit {q} >= {self.n_qubits}")
                if r.retired:
                    continue
                if q in owner:
                    raise CircuitError(f"qubit {q} shared by live registers {owner[q]} and {r.name}")
                owner[q] = r.name

    # -- serialization --
    def to_json(self) -> dict:
        return {"qubits": self.n_qubits,
                "registers": [r.to_json() for r in self.registers],
                "gates": [g.to_json() for g in self.gates]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: Mapping) -> "Circuit":
        try:
            regs = [Register(r["name"], tuple(r["qubits"]), r.get("role", "value"),
                             bool(r.get("retired", False))) for r in obj.get("registers", ())]
            gates = []
            for i, g in enumerate(obj.get("gates", ())):
                try:
                    gates.append(Gate.from_json(g))
                except (KeyError, TypeError, CircuitError) as exc:
                    raise CircuitError(f"gate {i}: {exc}") from None
            c = cls(int(obj["qubits"]), regs, gates)
        except KeyError as exc:
            raise CircuitError(f"missing field {exc}") from None
        c.check()
        return c

    @classmethod
    def loads(cls, text: str) -> "Circuit":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CircuitError(f"malformed circuit JSON at line {exc.lineno} column {exc.colno}: "
                               f"{exc.msg}") from None
        return cls.from_json(obj)


def invert(c: Circuit) -> Circuit:
    """Reverse gate order and replace each gate by its inverse."""
    return Circuit(c.n_qubits, [replace(r) for r in c.registers],
                   [g.inverse() for g in reversed(c.gates)])


def inverse_gates(gates: Sequence[Gate]) -> List[Gate]:
    return [g.inverse() for g in reversed(gates)]


def compose(a: Circuit, b: Circuit, wiring: Optional[Mapping[str, Optional[str]]] = None) -> Circuit:
    """``a`` followed by ``b``; ``wiring`` maps b's register names onto a's.

    Registers of ``b`` that are not wired (or wired to ``None``) get fresh qubits, as
    does every qubit of ``b`` outside any register.
    """
    wiring = dict(wiring or {})
    out = a.copy()
    qmap: Dict[int, int] = {}
    for r in b.registers:
        target = wiring.get(r.name)
        if target is None:
            continue
        ra = out.register(target)
        if len(ra) != len(r):
            raise CircuitError(f"wiring {r.name} -> {target}: width {len(r)} != {len(ra)}")
        for qb, qa in zip(r.qubits, ra.qubits):
            if qb in qmap and qmap[qb] != qa:
                raise CircuitError(f"qubit {qb} of {r.name} wired twice")
            qmap[qb] = qa
    for r in b.registers:
        if wiring.get(r.name) is None:
            qs = []
            for qb in r.qubits:
                if qb not in qmap:
                    qmap[qb] = out.n_qubits
                    out.n_qubits += 1
                qs.append(qmap[qb])
            out.registers.append(Register(r.name, tuple(qs), r.role, r.retired))
    for qb in range(b.n_qubits):
        if qb not in qmap:
            qmap[qb] = out.n_qubits
            out.n_qubits += 1
    for g in b.gates:
        out.gates.append(replace(g, targets=tuple(qmap[q] for q in g.targets),
                                 controls=tuple(qmap[q] for q in g.controls)))
    return out


def depth(c) -> int:
    """Greedy front-to-back layering: each gate goes one layer past its latest qubit."""
    gates = c.gates if isinstance(c, Circuit) else c
    level: Dict[int, int] = {}
    d = 0
    for g in gates:
        layer = 1 + max((level.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            level[q] = layer
        d = max(d, layer)
    return d


def gate_count(c) -> Dict[str, int]:
    """Counts per gate kind plus ``"total"``."""
    gates = c.gates if isinstance(c, Circuit) else c
    counts = Counter(g.kind for g in gates)
    out = {k: counts[k] for k in sorted(counts)}
    out["total"] = sum(counts.values())
    return out


def to_qasm(c: Circuit) -> str:
    """One-way QASM-like text: header ``qubits N;`` then one gate per line."""
    lines = [f"qubits {c.n_qubits};"]
    for g in c.gates:
        args = ",".join(f"q[{q}]" for q in g.controls + g.targets)
        name = g.kind.lower()
        if g.params:
            ps = ",".join(_fmt_angle(p) for p in g.params)
            name = f"{name}({ps})"
        if g.kind in ("MCX", "CSWAP", "CPHASE") and len(g.controls) > 1:
            name = f"{name}[{len(g.controls)}]"
        lines.append(f"{name} {args};")
    return "\n".join(lines) + "\n"


def _fmt_angle(x: float) -> str:
    if x and abs(x / math.pi - round(x / math.pi, 6)) < 1e-12:
        r = round(x / math.pi, 6)
        return f"{r:g}*pi"
    return repr(float(x))
