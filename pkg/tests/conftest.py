"""Shared hypergraph fixtures."""

import json

import pytest

from hyperstab.hypergraph import WeightedHypergraph

H1_DATA = {
    "vertices": ["a", "b", "c", "o"],
    "edges": [
        {"vertices": ["a", "b", "o"], "weight": 1},
        {"vertices": ["o", "c"], "weight": 1},
    ],
    "terminals": ["a", "b", "c"],
}


@pytest.fixture
def h1():
    """Three terminals joined through one bulk vertex by a 3-edge and a 2-edge."""
    return WeightedHypergraph(
        vertices=("a", "b", "c", "o"),
        edges=((frozenset({"a", "b", "o"}), 1), (frozenset({"o", "c"}), 1)),
        terminals=("a", "b", "c"),
    )


@pytest.fixture
def bell_pair():
    """Two terminals sharing a single edge, no bulk vertex."""
    return WeightedHypergraph(
        vertices=("a", "b"),
        edges=((frozenset({"a", "b"}), 1),),
        terminals=("a", "b"),
    )


@pytest.fixture
def star():
    """Four terminals each tied to a center by a weight-2 edge."""
    leaves = ("t0", "t1", "t2", "t3")
    return WeightedHypergraph(
        vertices=leaves + ("x",),
        edges=tuple((frozenset({t, "x"}), 2) for t in leaves),
        terminals=leaves,
    )


@pytest.fixture
def chain():
    """Terminals a and b at the ends of a path x-y, c hanging off the 3-edge {x, y, c}."""
    return WeightedHypergraph(
        vertices=("a", "b", "c", "x", "y"),
        edges=(
            (frozenset({"a", "x"}), 1),
            (frozenset({"x", "y", "c"}), 1),
            (frozenset({"y", "b"}), 1),
        ),
        terminals=("a", "b", "c"),
    )


@pytest.fixture
def h1_file(tmp_path):
    path = tmp_path / "h1.json"
    path.write_text(json.dumps(H1_DATA, indent=2))
    return path
