"""Tests for GF(p) linear algebra and symplectic sampling."""

from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from hyperstab.errors import InputError
from hyperstab.gfp import (
    PrimeModulus,
    count_lagrangians,
    count_stabilizer_states,
    inverse_mod,
    make_rng,
    random_lagrangian,
    random_symplectic,
    rank,
    symplectic_product,
    trial_seed,
)


def _form_matrix(m):
    j = np.zeros((2 * m, 2 * m), dtype=np.int64)
    j[:m, m:] = np.eye(m, dtype=np.int64)
    j[m:, :m] = -np.eye(m, dtype=np.int64)
    return j


class TestPrimeModulus:
    @pytest.mark.parametrize("p", [2, 3, 5, 7, 251])
    def test_accepts_primes(self, p):
        assert int(PrimeModulus(p)) == p

    @pytest.mark.parametrize("p", [0, 1, 4, 9, 257, True, 2.5])
    def test_rejects_non_primes(self, p):
        with pytest.raises(InputError):
            PrimeModulus(p)

    def test_phase_order(self):
        assert PrimeModulus(2).phase_order == 4
        assert PrimeModulus(5).phase_order == 5


class TestArithmetic:
    def test_inverse_mod(self):
        assert inverse_mod(3, 7) == 5
        assert (inverse_mod(4, 11) * 4) % 11 == 1

    def test_inverse_of_zero_raises(self):
        with pytest.raises(InputError):
            inverse_mod(14, 7)

    def test_rank(self):
        assert rank(np.eye(3, dtype=np.int64), 2) == 3
        assert rank(np.array([[1, 1], [2, 2]]), 3) == 1
        # dependent over GF(2) only
        mat = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
        assert rank(mat, 2) == 2
        assert rank(mat, 3) == 3

    def test_rank_leaves_input_untouched(self):
        mat = np.array([[2, 4], [1, 2]], dtype=np.int64)
        rank(mat, 5)
        assert mat.tolist() == [[2, 4], [1, 2]]

    def test_rank_of_empty_matrix(self):
        assert rank(np.zeros((0, 4), dtype=np.int64), 2) == 0

    def test_symplectic_product(self):
        # X and Z on one qubit anticommute, X and X commute
        assert symplectic_product([1, 0], [0, 1], 2) == 1
        assert symplectic_product([1, 0], [1, 0], 2) == 0
        assert symplectic_product([0, 1], [1, 0], 3) == 2

    def test_symplectic_product_length_mismatch(self):
        with pytest.raises(InputError):
            symplectic_product([1, 0], [1, 0, 0, 0], 2)


class TestSampling:
    @pytest.mark.parametrize("m, p", [(1, 2), (2, 2), (3, 3), (4, 5)])
    def test_random_symplectic_preserves_form(self, m, p):
        rng = make_rng(7)
        j = _form_matrix(m)
        for _ in range(5):
            s = random_symplectic(m, p, rng)
            assert ((s.T @ j @ s - j) % p == 0).all()

    @pytest.mark.parametrize("p", [2, 3, 5])
    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_random_lagrangian_is_isotropic_and_full_rank(self, m, p):
        j = _form_matrix(m)
        for seed in range(1000):
            rows = random_lagrangian(m, p, make_rng(seed))
            assert rows.shape == (m, 2 * m)
            assert rank(rows, p) == m
            assert ((rows @ j @ rows.T) % p == 0).all()

    def test_qubit_lines_are_uniform(self):
        rng = make_rng(5)
        counts = Counter()
        for _ in range(1500):
            (row,) = random_lagrangian(1, 2, rng)
            counts[tuple(int(a) for a in row)] += 1
        assert set(counts) == {(1, 0), (0, 1), (1, 1)}
        assert chisquare(list(counts.values())).pvalue > 1e-3

    def test_counts(self):
        assert count_lagrangians(1, 2) == 3
        assert count_lagrangians(2, 2) == 15
        assert count_stabilizer_states(1, 2) == 6
        assert count_stabilizer_states(2, 2) == 60
        assert count_stabilizer_states(1, 3) == 12

    def test_lagrangians_are_uniform(self):
        rng = make_rng(2024)
        samples = 3000
        counts = Counter()
        for _ in range(samples):
            u, v = random_lagrangian(2, 2, rng)
            span = frozenset(tuple(int(a) for a in vec) for vec in (u, v, (u + v) % 2))
            counts[span] += 1
        assert len(counts) == count_lagrangians(2, 2)
        assert chisquare(list(counts.values())).pvalue > 1e-3

    def test_qutrit_lines_are_uniform(self):
        rng = make_rng(11)
        counts = Counter()
        for _ in range(2000):
            (row,) = random_lagrangian(1, 3, rng)
            scale = inverse_mod(int(row[0]) if row[0] else int(row[1]), 3)
            counts[tuple(int(a) for a in (row * scale) % 3)] += 1
        assert len(counts) == count_lagrangians(1, 3)
        assert chisquare(list(counts.values())).pvalue > 1e-3


class TestSeeds:
    def test_trial_seed_is_deterministic(self):
        assert trial_seed(0, 1, 5) == trial_seed(0, 1, 5)

    def test_trial_seed_depends_on_every_key(self):
        seeds = {trial_seed(0, 1, 0), trial_seed(0, 1, 1), trial_seed(0, 2, 0), trial_seed(1, 1, 0)}
        assert len(seeds) == 4

    def test_trial_seed_fits_in_63_bits(self):
        assert 0 <= trial_seed(123, 4, 999) < 2**63

    def test_make_rng_reproducible(self):
        assert make_rng(5).integers(0, 100, 10).tolist() == make_rng(5).integers(0, 100, 10).tolist()
