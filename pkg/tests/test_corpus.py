from __future__ import annotations

import json

import pytest

from qex.corpus import CorpusError, find, load_corpus, load_program
from qex.lang import validate


def test_bundled_corpus_size_and_order(corpus):
    names = [cp.name for cp in corpus]
    assert names == sorted(names)
    assert len([cp for cp in corpus if not cp.uses_pointers]) >= 10


def test_quantum_programs_validate_clean(quantum_corpus):
    for cp in quantum_corpus:
        assert validate(cp.program, "quantum", cp.width) == [], cp.name


def test_pointer_programs_are_classical_only(corpus):
    ptr = [cp for cp in corpus if cp.uses_pointers]
    assert {cp.name for cp in ptr} >= {"list2"}
    for cp in ptr:
        assert any(v.kind == "pointer" for v in validate(cp.program, "quantum", cp.width))
        assert validate(cp.program, "classical", cp.width) == []


def test_manifest_fields():
    cp = find("list2")
    assert cp.width == 4 and cp.split_line == 7
    assert cp.domain["x"].values(4) == list(range(8))
    loops = [c for c in load_corpus() if c.has_loop]
    assert len(loops) >= 3 and all(c.bounded_unroll for c in loops)


def test_empty_directory(tmp_path):
    assert load_corpus(tmp_path) == []


def test_duplicate_names(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    for d in ("a", "b"):
        (tmp_path / d / "p.wl").write_text("z := x;")
    with pytest.raises(CorpusError, match="duplicate"):
        load_corpus(tmp_path)


def test_parse_failures_are_listed_per_file(tmp_path):
    (tmp_path / "bad1.wl").write_text("z := ;")
    (tmp_path / "bad2.wl").write_text("if (x) {}")
    (tmp_path / "ok.wl").write_text("z := x;")
    with pytest.raises(CorpusError) as ei:
        load_corpus(tmp_path)
    assert len(ei.value.problems) == 2
    assert "bad1.wl" in ei.value.problems[0]


def test_sidecar_is_optional(tmp_path):
    f = tmp_path / "p.wl"
    f.write_text("int p(int x) { return x + 1; }")
    cp = load_program(f)
    assert cp.width == 3 and not cp.domain
    (tmp_path / "p.json").write_text(json.dumps({"width": 4, "domain": {"x": [1, 2]}}))
    cp = load_program(f)
    assert cp.width == 4 and cp.domain["x"].values(4) == [1, 2]


def test_find_unknown():
    with pytest.raises(KeyError):
        find("no_such_program")
