"""Bundled program corpus and the loader for ``.wl`` directories.

Each ``name.wl`` may have a ``name.json`` manifest with any of: ``domain``
(input name -> domain), ``width``, ``unroll``, ``bounded_unroll`` (a smaller bound
used to study under-approximation), ``targets``, ``joint``, ``split_line`` and
``tags``.  Programs in the ``hybrid`` subdirectory use pointers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from ..classical.domain import InputDomain
from ..lang import ParseError, parse
from ..lang.ast import Program

CORPUS_DIR = Path(__file__).resolve().parent


class CorpusError(ValueError):
    def __init__(self, problems: List[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


@dataclass
class CorpusProgram:
    name: str
    path: Path
    source: str
    program: Program
    domain: InputDomain = field(default_factory=InputDomain)
    width: int = 3
    unroll: int = 8
    bounded_unroll: Optional[int] = None
    targets: Tuple[str, ...] = ()
    joint: bool = False
    split_line: Optional[int] = None
    tags: Tuple[str, ...] = ()

    @property
    def has_loop(self) -> bool:
        return "loop" in self.tags

    @property
    def uses_pointers(self) -> bool:
        return "pointer" in self.tags


def load_program(path: Union[str, Path]) -> CorpusProgram:
    path = Path(path)
    source = path.read_text(encoding="utf-8")
    prog = parse(source)
    meta: dict = {}
    side = path.with_suffix(".json")
    if side.exists():
        meta = json.loads(side.read_text(encoding="utf-8"))
    return CorpusProgram(
        name=path.stem, path=path, source=source, program=prog,
        domain=InputDomain.from_json(meta.get("domain", {})),
        width=int(meta.get("width", 3)), unroll=int(meta.get("unroll", 8)),
        bounded_unroll=meta.get("bounded_unroll"),
        targets=tuple(meta.get("targets", ())), joint=bool(meta.get("joint", False)),
        split_line=meta.get("split_line"), tags=tuple(meta.get("tags", ())))


def load_corpus(directory: Union[str, Path, None] = None, recursive: bool = True) -> List[CorpusProgram]:
    """Every ``.wl`` program under ``directory`` (the bundled corpus by default), sorted by name."""
    root = Path(directory) if directory is not None else CORPUS_DIR
    if not root.is_dir():
        raise CorpusError([f"{root}: not a directory"])
    files = sorted(root.rglob("*.wl") if recursive else root.glob("*.wl"))
    out: Dict[str, CorpusProgram] = {}
    problems = []
    for f in files:
        try:
            cp = load_program(f)
        except ParseError as exc:
            problems.append(f"{f}: {exc}")
            continue
        except (ValueError, KeyError) as exc:
            problems.append(f"{f}: bad manifest: {exc}")
            continue
        if cp.name in out:
            problems.append(f"{f}: duplicate program name {cp.name!r} (also {out[cp.name].path})")
            continue
        out[cp.name] = cp
    if problems:
        raise CorpusError(problems)
    return [out[k] for k in sorted(out)]


def find(name: str) -> CorpusProgram:
    """Bundled corpus program by name."""
    for cp in load_corpus():
        if cp.name == name:
            return cp
    raise KeyError(name)
