"""Input domains and value distributions shared by the oracle and the simulator."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    """Values one input may take: ``full`` (all of [0, 2^m - 1]), an interval or a set."""
    kind: str  # "full" | "interval" | "set"
    lo: int = 0
    hi: int = 0
    items: Tuple[int, ...] = ()

    @classmethod
    def full(cls) -> "Domain":
        return cls("full")

    @classmethod
    def interval(cls, lo: int, hi: int) -> "Domain":
        if lo > hi or lo < 0:
            raise DomainError(f"bad interval [{lo}, {hi}]")
        return cls("interval", lo, hi)

    @classmethod
    def of(cls, values: Iterable[int]) -> "Domain":
        items = tuple(sorted(set(int(v) for v in values)))
        if not items:
            raise DomainError("empty value set")
        if items[0] < 0:
            raise DomainError("negative value in set")
        return cls("set", items=items)

    def values(self, m: int) -> List[int]:
        if self.kind == "full":
            return list(range(1 << m))
        if self.kind == "interval":
            return list(range(self.lo, self.hi + 1))
        return list(self.items)

    def hull(self, m: int) -> Tuple[int, int]:
        vals = self.values(m)
        return vals[0], vals[-1]

    def check(self, m: int) -> None:
        top = (1 << (m + 1)) - 1
        if self.values(m)[-1] > top:
            raise DomainError(f"domain {self.to_json()} exceeds {m + 1}-bit range")

    def to_json(self):
        if self.kind == "full":
            return "full"
        if self.kind == "interval":
            return {"interval": [self.lo, self.hi]}
        return {"set": list(self.items)}

    @classmethod
    def from_json(cls, obj) -> "Domain":
        if obj == "full":
            return cls.full()
        if isinstance(obj, dict) and "interval" in obj:
            lo, hi = obj["interval"]
            return cls.interval(int(lo), int(hi))
        if isinstance(obj, dict) and "set" in obj:
            return cls.of(obj["set"])
        if isinstance(obj, list):
            return cls.of(obj)
        raise DomainError(f"cannot read domain from {obj!r}")


class InputDomain(dict):
    """Mapping input name -> :class:`Domain`; missing inputs default to ``full``."""

    def get_domain(self, name: str) -> Domain:
        return self.get(name, Domain.full())

    def resolved(self, inputs: Sequence[str], m: int) -> Dict[str, List[int]]:
        out = {}
        for name in inputs:
            d = self.get_domain(name)
            d.check(m)
            out[name] = d.values(m)
        return out

    def size(self, inputs: Sequence[str], m: int) -> int:
        n = 1
        for vals in self.resolved(inputs, m).values():
            n *= len(vals)
        return n

    def to_json(self) -> dict:
        return {k: v.to_json() for k, v in self.items()}

    @classmethod
    def from_json(cls, obj: Mapping) -> "InputDomain":
        return cls({k: Domain.from_json(v) for k, v in obj.items()})

    @classmethod
    def load(cls, path) -> "InputDomain":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


DomainLike = Union[InputDomain, Mapping, None]


def as_domain(dom: DomainLike) -> InputDomain:
    if dom is None:
        return InputDomain()
    if isinstance(dom, InputDomain):
        return dom
    out = InputDomain()
    for k, v in dom.items():
        if isinstance(v, Domain):
            out[k] = v
        elif isinstance(v, (list, tuple, set, frozenset, range)):
            out[k] = Domain.of(v)
        else:
            out[k] = Domain.from_json(v)
    return out


@dataclass
class ValueDistribution:
    """Exact value counts over all input tuples."""
    counts: Counter = field(default_factory=Counter)
    total: int = 0

    def support(self) -> set:
        return set(self.counts)

    def prob(self, value) -> Fraction:
        return Fraction(self.counts.get(value, 0), self.total)

    def fractions(self) -> Dict:
        return {v: Fraction(c, self.total) for v, c in sorted(self.counts.items())}

    def to_json(self) -> dict:
        return {str(v): c for v, c in sorted(self.counts.items())}
