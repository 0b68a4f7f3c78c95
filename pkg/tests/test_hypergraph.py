"""Tests for weighted hypergraphs, cut functions and min-cut tables."""

import json
import itertools

import numpy as np
import pytest

from hyperstab.errors import CapacityError, InputError
from hyperstab.gfp import make_rng
from hyperstab.hypergraph import (
    WeightedHypergraph,
    brute_force_mincut,
    check_symmetric_submodular,
    cut_histogram,
    cut_value,
    dump_hypergraph,
    format_subset,
    hypergraph_from_dict,
    hypergraph_to_dict,
    load_hypergraph,
    mask_from_subset,
    mincut_table,
    prune_floating_components,
    random_hypergraph,
    subset_from_mask,
)


class TestConstruction:
    def test_terminals_follow_vertex_order(self):
        h = WeightedHypergraph(("a", "b", "c"), ((frozenset("ab"), 1),), ("c", "a"))
        assert h.terminals == ("a", "c")
        assert h.non_terminals == ("b",)

    def test_duplicate_edges_merge(self):
        h = WeightedHypergraph(
            ("a", "b"), ((frozenset("ab"), 1), (frozenset("ba"), 2)), ("a",)
        )
        assert h.edges == ((frozenset("ab"), 3),)
        assert h.total_weight == 3

    @pytest.mark.parametrize(
        "vertices, edges, terminals",
        [
            (("a", "a"), (), ("a",)),
            (("a", "b"), ((frozenset("az"), 1),), ("a",)),
            (("a", "b"), ((frozenset("a"), 1),), ("a",)),
            (("a", "b"), ((frozenset("ab"), 0),), ("a",)),
            (("a", "b"), ((frozenset("ab"), 1.5),), ("a",)),
            (("a", "b"), ((frozenset("ab"), 1),), ()),
            (("a", "b"), ((frozenset("ab"), 1),), ("q",)),
        ],
    )
    def test_invalid_inputs(self, vertices, edges, terminals):
        with pytest.raises(InputError):
            WeightedHypergraph(vertices, edges, terminals)

    def test_weighted_degree(self, h1):
        assert h1.weighted_degree("o") == 2
        assert h1.weighted_degree("a") == 1

    def test_subset_rejects_unknown_ids(self, h1):
        with pytest.raises(InputError):
            h1.subset(["a", "zz"])

    def test_terminal_subsets_are_mask_indexed(self, h1):
        subsets = h1.terminal_subsets()
        assert len(subsets) == 8
        assert subsets[0] == frozenset()
        assert subsets[5] == frozenset({"a", "c"})


class TestSubsetHelpers:
    def test_mask_round_trip(self):
        order = ("a", "b", "c")
        assert mask_from_subset(order, {"a", "c"}) == 5
        assert subset_from_mask(order, 6) == frozenset({"b", "c"})

    def test_mask_rejects_outsiders(self):
        with pytest.raises(InputError):
            mask_from_subset(("a",), {"b"})

    def test_format_subset(self):
        assert format_subset([]) == "{}"
        assert format_subset({"c", "a"}) == "{a,c}"
        assert format_subset({"o", "c"}, order=("o", "c")) == "{o,c}"


class TestCuts:
    def test_cut_values(self, h1):
        assert cut_value(h1, []) == 0
        assert cut_value(h1, ["a", "c"]) == 2
        assert cut_value(h1, ["c"]) == 1
        assert cut_value(h1, ["c", "o"]) == 1
        assert cut_value(h1, ["a", "b", "c", "o"]) == 0

    def test_cut_is_complement_symmetric(self, h1):
        for size in range(5):
            for s in itertools.combinations(h1.vertices, size):
                rest = set(h1.vertices) - set(s)
                assert cut_value(h1, s) == cut_value(h1, rest)

    def test_histogram_counts_every_subset(self, h1):
        hist = cut_histogram(h1)
        assert hist.shape == (8, 3)
        assert hist.sum() == 2 ** 4
        # A = {c}: S = {c} and S = {c, o}, both of value 1
        assert hist[4].tolist() == [0, 2, 0]

    def test_histogram_capacity(self, h1):
        with pytest.raises(CapacityError):
            cut_histogram(h1, max_vertices=3)


class TestMinCutTable:
    def test_h1_table(self, h1):
        table = mincut_table(h1)
        assert (table.m([]), table.k([])) == (0, 1)
        assert (table.m(["c"]), table.k(["c"])) == (1, 2)
        assert (table.m(["a"]), table.k(["a"])) == (1, 1)
        assert (table.m(["a", "b"]), table.k(["a", "b"])) == (1, 2)
        assert (table.m(["a", "b", "c"]), table.k(["a", "b", "c"])) == (0, 1)
        assert table.is_symmetric_submodular()

    def test_rows_are_sorted_by_size(self, h1):
        rows = mincut_table(h1).rows()
        assert [sorted(a) for a, _, _ in rows[:4]] == [[], ["a"], ["b"], ["c"]]
        assert sorted(rows[-1][0]) == ["a", "b", "c"]

    def test_star(self, star):
        table = mincut_table(star)
        # one leaf: cut its own edge (2) or the other three (6)
        assert (table.m(["t0"]), table.k(["t0"])) == (2, 1)
        # two leaves: the center can go either way at cost 4
        assert (table.m(["t0", "t1"]), table.k(["t0", "t1"])) == (4, 2)

    def test_chain(self, chain):
        table = mincut_table(chain)
        # x may join a or stay with the rest at the same cost
        assert (table.m(["a"]), table.k(["a"])) == (1, 2)
        assert (table.m(["b"]), table.k(["b"])) == (1, 2)
        assert (table.m(["c"]), table.k(["c"])) == (1, 1)
        assert (table.m(["a", "b"]), table.k(["a", "b"])) == (1, 1)
        assert table.is_symmetric_submodular()

    def test_requires_pruned_input(self):
        h = WeightedHypergraph(
            ("a", "b", "x", "y"),
            ((frozenset("ab"), 1), (frozenset("xy"), 1)),
            ("a", "b"),
        )
        with pytest.raises(InputError):
            mincut_table(h)
        assert mincut_table(prune_floating_components(h)).m(["a"]) == 1

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_brute_force(self, seed):
        rng = make_rng(seed)
        n_vertices = int(rng.integers(2, 10))
        n_terminals = int(rng.integers(1, min(4, n_vertices) + 1))
        n_edges = int(rng.integers(1, 2 * n_vertices + 1))
        h = random_hypergraph(n_vertices, n_terminals, n_edges, rng, max_weight=3, max_edge_size=4)
        table = mincut_table(h)
        for subset in h.terminal_subsets():
            assert (table.m(subset), table.k(subset)) == brute_force_mincut(h, subset)
        assert check_symmetric_submodular(table.as_function(), tolerance=0) == []

    def test_brute_force_rejects_non_terminals(self, h1):
        with pytest.raises(InputError):
            brute_force_mincut(h1, ["o"])


class TestPruning:
    def test_drops_terminal_free_components(self):
        h = WeightedHypergraph(
            ("a", "b", "x", "y", "z"),
            ((frozenset("ab"), 1), (frozenset("xy"), 2)),
            ("a",),
        )
        pruned = prune_floating_components(h)
        assert pruned.vertices == ("a", "b")
        assert pruned.edges == ((frozenset("ab"), 1),)

    def test_returns_same_object_when_nothing_floats(self, h1):
        assert prune_floating_components(h1) is h1


class TestSymmetricSubmodular:
    def test_detects_asymmetry(self):
        f = {frozenset(): 0, frozenset("a"): 1, frozenset("b"): 2, frozenset("ab"): 0}
        violations = check_symmetric_submodular(f)
        assert [v.kind for v in violations] == ["symmetry"]
        assert "f({a}) != f({b})" in violations[0].describe()

    def test_detects_supermodularity(self):
        f = {frozenset(): 1, frozenset("a"): 0, frozenset("b"): 0, frozenset("ab"): 1}
        kinds = {v.kind for v in check_symmetric_submodular(f)}
        assert "submodularity" in kinds

    def test_missing_subset(self):
        with pytest.raises(InputError):
            check_symmetric_submodular({frozenset("a"): 1, frozenset("ab"): 0})

    def test_tolerance(self):
        f = {frozenset(): 0.0, frozenset("a"): 1.0, frozenset("b"): 1.0 + 1e-12, frozenset("ab"): 0.0}
        assert check_symmetric_submodular(f) == []


class TestRandomHypergraph:
    def test_is_pruned_and_reproducible(self):
        first = random_hypergraph(8, 3, 5, make_rng(4))
        second = random_hypergraph(8, 3, 5, make_rng(4))
        assert first == second
        assert prune_floating_components(first) is first
        assert first.terminals == ("v0", "v1", "v2")

    def test_rejects_bad_terminal_count(self):
        with pytest.raises(InputError):
            random_hypergraph(3, 4, 2, np.random.default_rng(0))


class TestFiles:
    def test_load(self, h1_file, h1):
        assert load_hypergraph(h1_file) == h1

    def test_dump_and_load(self, tmp_path, star):
        path = tmp_path / "star.json"
        dump_hypergraph(star, path)
        assert load_hypergraph(path) == star

    def test_dict_uses_vertex_order(self, h1):
        data = hypergraph_to_dict(h1)
        assert data["edges"][1] == {"vertices": ["c", "o"], "weight": 1}

    def test_syntax_error_has_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"vertices": ["a",\n  }')
        with pytest.raises(InputError, match=r"broken\.json:2:"):
            load_hypergraph(path)

    def test_schema_errors(self):
        with pytest.raises(InputError, match="terminals"):
            hypergraph_from_dict({"vertices": ["a", "b"], "edges": []})
        with pytest.raises(InputError, match="weight"):
            hypergraph_from_dict(
                {"vertices": ["a", "b"], "edges": [{"vertices": ["a", "b"], "weight": 0}],
                 "terminals": ["a"]}
            )
        with pytest.raises(InputError):
            hypergraph_from_dict(
                {"vertices": ["a"], "edges": [], "terminals": ["a"], "extra": 1}
            )

    def test_unknown_terminal(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"vertices": ["a", "b"], "edges": [], "terminals": ["q"]}))
        with pytest.raises(InputError, match="q"):
            load_hypergraph(path)

    def test_top_level_must_be_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[]")
        with pytest.raises(InputError):
            load_hypergraph(path)
