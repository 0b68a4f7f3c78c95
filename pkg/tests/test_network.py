"""Tests for the GHZ network layout and stabilizer projection trials."""

import itertools

import pytest

from hyperstab.errors import CapacityError, InputError, UndefinedEntropyError
from hyperstab.gfp import make_rng, trial_seed
from hyperstab.hypergraph import (
    WeightedHypergraph,
    check_symmetric_submodular,
    cut_value,
    mincut_table,
    random_hypergraph,
)
from hyperstab.network import (
    Site,
    TrialResult,
    build_layout,
    build_omega,
    omega_entropy,
    run_trial,
    sample_targets,
)


class TestLayout:
    @pytest.mark.parametrize("r, qudits", [(1, 5), (2, 10), (3, 15)])
    def test_h1_qudit_count(self, h1, r, qudits):
        assert build_layout(h1, 2, r).n_qudits == qudits

    def test_edge_major_placement(self, h1):
        layout = build_layout(h1, 2, 1)
        assert layout.sites[:3] == (Site("a", 0, 0), Site("b", 0, 0), Site("o", 0, 0))
        assert layout.sites[3:] == (Site("c", 1, 0), Site("o", 1, 0))
        assert layout.groups["o"] == (2, 4)
        assert layout.ghz_blocks() == [3, 2]

    def test_weights_multiply_copies(self, star):
        layout = build_layout(star, 3, 2)
        assert layout.n_qudits == 4 * 2 * 2 * 2
        assert len(layout.groups["x"]) == 4 * 2 * 2
        assert layout.ghz_blocks() == [2] * 16

    def test_dimensions(self, h1):
        layout = build_layout(h1, 3, 2)
        assert layout.log_bond_dimension == 2
        assert layout.log_local_dimension("o") == 4
        assert layout.log_local_dimension("a") == 2
        assert layout.log_db == 4

    def test_qudits_of(self, h1):
        layout = build_layout(h1, 2, 1)
        assert layout.qudits_of(["c", "a"]) == [0, 3]

    @pytest.mark.parametrize("r", [0, -1, True])
    def test_rejects_bad_bond_exponent(self, h1, r):
        with pytest.raises(InputError):
            build_layout(h1, 2, r)

    def test_capacity_bounds(self, h1, star):
        with pytest.raises(CapacityError):
            build_layout(h1, 2, 2, max_qudits=9)
        with pytest.raises(CapacityError):
            build_layout(star, 2, 1, max_terminals=3)

    def test_requires_pruned_input(self):
        h = WeightedHypergraph(
            ("a", "b", "x", "y"), ((frozenset("ab"), 1), (frozenset("xy"), 1)), ("a",)
        )
        with pytest.raises(InputError):
            build_layout(h, 2, 1)


class TestOmega:
    @pytest.mark.parametrize("name", ["h1", "star", "chain"])
    @pytest.mark.parametrize("p, r", [(2, 1), (2, 2), (3, 1), (3, 3), (5, 2)])
    def test_entropy_is_r_times_cut(self, request, name, p, r):
        h = request.getfixturevalue(name)
        layout, omega = build_omega(h, p, r)
        assert omega.is_valid()
        for size in range(len(h.vertices) + 1):
            for s in itertools.combinations(h.vertices, size):
                assert omega_entropy(layout, omega, s) == r * cut_value(h, s)

    def test_random_hypergraphs(self):
        for seed in range(3):
            h = random_hypergraph(6, 2, 5, make_rng(seed))
            layout, omega = build_omega(h, 3, 1)
            for v in h.vertices:
                assert omega_entropy(layout, omega, [v]) == cut_value(h, [v])


class TestTargets:
    def test_one_target_per_bulk_vertex(self, h1):
        layout = build_layout(h1, 2, 2)
        targets = sample_targets(layout, 17)
        assert [x for x, _ in targets] == ["o"]
        assert targets[0][1].n == 4

    def test_targets_depend_only_on_seed(self, h1):
        layout = build_layout(h1, 3, 1)
        first = sample_targets(layout, 5)
        second = sample_targets(layout, 5)
        assert all(a[1] == b[1] for a, b in zip(first, second))


class TestTrials:
    def test_trial_is_reproducible(self, h1):
        layout, omega = build_omega(h1, 2, 2)
        assert run_trial(layout, omega, 42) == run_trial(layout, omega, 42)

    def test_entropies_respect_rank_bound(self, h1):
        layout, omega = build_omega(h1, 2, 1)
        table = mincut_table(h1)
        for i in range(50):
            result = run_trial(layout, omega, trial_seed(0, 1, i))
            if not result.nonzero:
                continue
            assert result.entropy([]) == 0
            for subset in h1.terminal_subsets():
                assert 0 <= result.entropy(subset) <= table.m(subset)
            assert check_symmetric_submodular(result.entropy_map(), tolerance=0) == []
            assert result.trace() == 2.0 ** -result.free_count

    def test_no_bulk_vertices_is_deterministic(self, bell_pair):
        layout, omega = build_omega(bell_pair, 3, 2)
        result = run_trial(layout, omega, 0)
        assert result.nonzero
        assert result.free_count == 0
        assert result.entropy(["a"]) == 2
        assert result.normalized_entropy(["a"]) == 1.0

    def test_large_bond_concentrates(self, star):
        layout, omega = build_omega(star, 2, 4)
        table = mincut_table(star)
        result = run_trial(layout, omega, trial_seed(1, 4, 0))
        assert result.nonzero
        assert result.max_deviation(table) <= 1.0

    def test_layout_mismatch(self, h1, star):
        layout, _ = build_omega(h1, 2, 1)
        _, other = build_omega(star, 2, 1)
        with pytest.raises(InputError):
            run_trial(layout, other, 0)


class TestTrialResult:
    def test_zero_outcome_has_no_entropy(self):
        result = TrialResult(
            seed=3, nonzero=False, free_count=1, prime=2, bond_exponent=1, terminals=("a",)
        )
        assert result.trace() == 0.0
        with pytest.raises(UndefinedEntropyError):
            result.entropy(["a"])
        with pytest.raises(UndefinedEntropyError):
            result.entropy_map()

    def test_max_deviation(self, h1):
        table = mincut_table(h1)
        # full rank everywhere: the min-cut value scaled by r = 2
        entropies = tuple(2 * m for m in table.values)
        result = TrialResult(
            seed=0, nonzero=True, free_count=0, prime=2, bond_exponent=2,
            terminals=h1.terminals, entropies=entropies,
        )
        assert result.max_deviation(table) == 0.0
        assert result.entropy(["c"]) == 2
