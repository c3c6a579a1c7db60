from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from qex.corpus import find, load_corpus  # noqa: E402


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def quantum_corpus(corpus):
    return [cp for cp in corpus if not cp.uses_pointers]


@pytest.fixture(scope="session")
def fig1():
    return find("fig1")


@pytest.fixture(scope="session")
def list2():
    return find("list2")
