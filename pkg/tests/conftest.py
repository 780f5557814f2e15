"""Shared fixtures: small lattices and finite spaces used across the suite."""

import json
from itertools import combinations

import pytest
from structlog.testing import capture_logs

from subfitlab.config import get_settings
from subfitlab.services.duality import FiniteSpace
from subfitlab.services.order import poset_from_cover_pairs, try_lattice
from subfitlab.utils.logging import setup_logging

INTRO_LABELS = ["0", "a", "b", "t", "s", "1"]
INTRO_COVERS = [(0, 1), (0, 2), (0, 3), (1, 5), (2, 5), (3, 4), (4, 5)]


def chain_covers(n):
    return [(i, i + 1) for i in range(n - 1)]


def boolean_covers(k):
    return [(m, m | (1 << i)) for m in range(1 << k) for i in range(k) if not m & (1 << i)]


def lattice(n, covers, labels=None):
    L = try_lattice(poset_from_cover_pairs(n, covers, labels))
    assert L is not None
    return L


def write_document(path, n, covers, labels=None):
    doc = {"n": n, "covers": [list(p) for p in covers]}
    if labels is not None:
        doc["labels"] = labels
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def intro_lattice():
    """0 < a, b, t; t < s; a, b, s < 1."""
    return lattice(6, INTRO_COVERS, INTRO_LABELS)


@pytest.fixture
def chain():
    return lambda n: lattice(n, chain_covers(n))


@pytest.fixture
def boolean2():
    return lattice(4, boolean_covers(2), ["0", "p", "q", "1"])


@pytest.fixture
def boolean3():
    return lattice(8, boolean_covers(3))


@pytest.fixture
def m3():
    return lattice(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)], ["0", "x", "y", "z", "1"])


@pytest.fixture
def n5():
    return lattice(5, [(0, 1), (1, 2), (0, 3), (2, 4), (3, 4)], ["0", "a", "b", "c", "1"])


@pytest.fixture
def singleton_space():
    return FiniteSpace(poset_from_cover_pairs(1, []))


@pytest.fixture
def sierpinski():
    """Two points, 0 specializing to the closed point 1."""
    return FiniteSpace(poset_from_cover_pairs(2, [(0, 1)]))


@pytest.fixture
def antichain_space():
    return lambda n: FiniteSpace(poset_from_cover_pairs(n, []))


@pytest.fixture
def v_space():
    """One bottom point below two closed points."""
    return FiniteSpace(poset_from_cover_pairs(3, [(0, 1), (0, 2)]))


@pytest.fixture
def all_subsets():
    return lambda n: [sum(1 << i for i in c) for k in range(n + 1) for c in combinations(range(n), k)]


@pytest.fixture
def debug_logs(monkeypatch):
    """Event dicts logged at debug level while the test runs."""
    monkeypatch.setattr(get_settings().logging, "log_level", "DEBUG")
    setup_logging()
    with capture_logs() as logs:
        yield logs
    monkeypatch.undo()
    setup_logging()
