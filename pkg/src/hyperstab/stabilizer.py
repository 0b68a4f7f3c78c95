"""Qudit stabilizer states as phased check matrices.

A tableau on ``n`` qudits stores ``n`` generators ``tau^s W(x|z)`` (see
``hyperstab.kernels`` for the phase convention). Entropies are returned as
exact integers in units of ``log p``.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from hyperstab.errors import InputError, InvariantViolation
from hyperstab.gfp import PrimeModulus, as_prime, random_lagrangian, rank
from hyperstab.kernels import echelonize, measure

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StabilizerTableau:
    """Pure stabilizer state on ``n`` qudits.

    Attributes:
        prime: Field prime of the qudits.
        generators: ``n x 2n`` int64 matrix, rows are (x|z) symplectic vectors.
        phases: Length-``n`` phase exponents modulo ``prime.phase_order``.
    """

    prime: PrimeModulus
    generators: np.ndarray
    phases: np.ndarray

    def __post_init__(self) -> None:
        gens = np.ascontiguousarray(self.generators, dtype=np.int64)
        phases = np.ascontiguousarray(self.phases, dtype=np.int64)
        if gens.ndim != 2 or gens.shape[1] != 2 * gens.shape[0]:
            raise InputError(f"generator matrix must be n x 2n, got shape {gens.shape}")
        if phases.shape != (gens.shape[0],):
            raise InputError(
                f"need one phase per generator, got {phases.shape} for {gens.shape[0]} rows"
            )
        object.__setattr__(self, "generators", gens % self.p)
        object.__setattr__(self, "phases", phases % self.prime.phase_order)

    @classmethod
    def empty(cls, p: "int | PrimeModulus") -> "StabilizerTableau":
        """Zero-qudit tableau, the identity of ``tensor``."""
        return cls(as_prime(p), np.zeros((0, 0), dtype=np.int64), np.zeros(0, dtype=np.int64))

    @property
    def n(self) -> int:
        return int(self.generators.shape[0])

    @property
    def p(self) -> int:
        return int(self.prime.p)

    @property
    def x(self) -> np.ndarray:
        return self.generators[:, : self.n]

    @property
    def z(self) -> np.ndarray:
        return self.generators[:, self.n :]

    def copy(self) -> "StabilizerTableau":
        return StabilizerTableau(self.prime, self.generators.copy(), self.phases.copy())

    def is_valid(self) -> bool:
        """Check the abelian, full-rank and Hermitian-phase invariants."""
        n, p = self.n, self.p
        if n == 0:
            return True
        x, z = self.x, self.z
        comm = (x @ z.T - z @ x.T) % p
        if comm.any():
            return False
        if rank(self.generators, p) != n:
            return False
        if p == 2 and (self.phases % 2).any():
            return False
        return True

    def embedded_row(self, row: int, sites: Sequence[int], n_total: int) -> np.ndarray:
        """Symplectic vector of generator ``row`` placed on ``sites`` of ``n_total`` qudits."""
        vec = np.zeros(2 * n_total, dtype=np.int64)
        idx = np.asarray(sites, dtype=np.int64)
        vec[idx] = self.x[row]
        vec[n_total + idx] = self.z[row]
        return vec

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StabilizerTableau):
            return NotImplemented
        return (
            self.p == other.p
            and np.array_equal(self.generators, other.generators)
            and np.array_equal(self.phases, other.phases)
        )

    def __repr__(self) -> str:
        return f"StabilizerTableau(n={self.n}, p={self.p})"


@dataclass(frozen=True)
class ProjectionOutcome:
    """Result of projecting some sites onto a stabilizer state.

    Attributes:
        state: Tableau on the remaining sites, or None for the zero vector.
        free_count: Number of postselected outcomes that were uniformly random;
            the squared norm of the projected vector is ``p^-free_count``.
    """

    state: Optional[StabilizerTableau]
    free_count: int

    @property
    def is_zero(self) -> bool:
        return self.state is None

    def trace(self) -> float:
        """``tr[Psi]`` of the unnormalized projected state."""
        if self.state is None:
            return 0.0
        return float(self.state.p) ** (-self.free_count)


def ghz_tableau(parties: int, p: "int | PrimeModulus") -> StabilizerTableau:
    """Stabilizer tableau of ``(1/sqrt p) sum_i |i>^k``.

    Generators are ``X^{(x)k}`` and ``Z_j Z_{j+1}^-1`` for ``j = 1..k-1``.
    """
    prime = as_prime(p)
    k = parties
    if k < 1:
        raise InputError(f"GHZ state needs at least one party, got {k}")
    gens = np.zeros((k, 2 * k), dtype=np.int64)
    gens[0, :k] = 1
    for j in range(k - 1):
        gens[j + 1, k + j] = 1
        gens[j + 1, k + j + 1] = prime.p - 1
    return StabilizerTableau(prime, gens, np.zeros(k, dtype=np.int64))


def tensor(a: StabilizerTableau, b: StabilizerTableau) -> StabilizerTableau:
    """Tableau of ``a (x) b`` with a's qudits first."""
    if a.p != b.p:
        raise InputError(f"cannot tensor tableaux over different primes ({a.p} and {b.p})")
    na, nb = a.n, b.n
    n = na + nb
    gens = np.zeros((n, 2 * n), dtype=np.int64)
    gens[:na, :na] = a.x
    gens[:na, n : n + na] = a.z
    gens[na:, na:n] = b.x
    gens[na:, n + na :] = b.z
    return StabilizerTableau(a.prime, gens, np.concatenate([a.phases, b.phases]))


def tensor_all(parts: Iterable[StabilizerTableau], p: "int | PrimeModulus") -> StabilizerTableau:
    """Tensor product of many tableaux in order, assembled in one allocation."""
    prime = as_prime(p)
    parts = list(parts)
    for part in parts:
        if part.p != prime.p:
            raise InputError(f"cannot tensor tableaux over different primes ({part.p} and {prime.p})")
    n = sum(part.n for part in parts)
    gens = np.zeros((n, 2 * n), dtype=np.int64)
    phases = np.zeros(n, dtype=np.int64)
    offset = 0
    for part in parts:
        k = part.n
        gens[offset : offset + k, offset : offset + k] = part.x
        gens[offset : offset + k, n + offset : n + offset + k] = part.z
        phases[offset : offset + k] = part.phases
        offset += k
    return StabilizerTableau(prime, gens, phases)


def _check_sites(sites: Iterable[int], n: int) -> np.ndarray:
    idx = np.asarray(sorted(set(int(s) for s in sites)), dtype=np.int64)
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        raise InputError(f"site index out of range for {n} qudits: {idx.tolist()}")
    return idx


def reduced_entropy(t: StabilizerTableau, sites: Iterable[int]) -> int:
    """Entropy of the reduced state on ``sites`` in units of ``log p``.

    ``|A| - n + rank(G restricted to the complement of A)``; equal to every
    Renyi entropy because stabilizer reduced states have flat spectra.
    """
    n = t.n
    inside = _check_sites(sites, n)
    outside = np.setdiff1d(np.arange(n, dtype=np.int64), inside)
    if outside.size == 0:
        return 0
    cols = np.concatenate([outside, n + outside])
    return int(inside.size - n + rank(t.generators[:, cols], t.p))


def project_onto_stabilizer(
    state: StabilizerTableau, sites: Sequence[int], target: StabilizerTableau
) -> ProjectionOutcome:
    """Apply ``<target|`` on ``sites`` of ``state`` and trace those sites out.

    Each generator of ``target`` is measured in row order with the trivial
    outcome postselected. Random outcomes add one to ``free_count``; a
    deterministic outcome in conflict with the target phase yields the zero
    vector.
    """
    if state.p != target.p:
        raise InputError(f"prime mismatch: state over {state.p}, target over {target.p}")
    site_list = [int(s) for s in sites]
    if len(site_list) != target.n:
        raise InputError(f"target has {target.n} qudits but {len(site_list)} sites were given")
    if len(set(site_list)) != len(site_list):
        raise InputError(f"duplicate sites in projection: {site_list}")
    _check_sites(site_list, state.n)

    n, p, order = state.n, state.p, state.prime.phase_order
    gens = state.generators.copy()
    phases = state.phases.copy()
    free = 0
    for row in range(target.n):
        u = target.embedded_row(row, site_list, n)
        status = measure(gens, phases, u, int(target.phases[row]), p, order)
        if status == -2:
            raise InvariantViolation("state tableau is not maximal: measured Pauli outside its span")
        if status == -1:
            logger.debug(f"projection annihilated the state at target generator {row}")
            return ProjectionOutcome(state=None, free_count=free)
        free += int(status)

    # The projected sites now factor out; eliminate on their columns so the
    # trailing rows act trivially there and generate the remaining state.
    idx = np.asarray(site_list, dtype=np.int64)
    pivots = echelonize(gens, phases, np.concatenate([idx, n + idx]), p, order)
    if pivots != len(site_list):
        raise InvariantViolation(
            f"projected sites did not factor out: {pivots} pivots for {len(site_list)} sites"
        )
    keep = np.setdiff1d(np.arange(n, dtype=np.int64), idx)
    rest = gens[pivots:][:, np.concatenate([keep, n + keep])]
    return ProjectionOutcome(
        state=StabilizerTableau(state.prime, rest, phases[pivots:]), free_count=free
    )


def sample_random_stabilizer(
    m: int, p: "int | PrimeModulus", rng: np.random.Generator
) -> StabilizerTableau:
    """Uniformly random pure stabilizer state on ``m`` qudits.

    The Lagrangian comes from ``random_lagrangian``; each generator's eigenvalue
    is uniform over its ``p`` admissible values.
    """
    prime = as_prime(p)
    gens = random_lagrangian(m, prime, rng)
    phases = rng.integers(0, prime.p, size=m, dtype=np.int64)
    if prime.p == 2:
        # qubit generators are Hermitian, eigenvalue signs are tau^0 and tau^2
        phases = 2 * phases
    return StabilizerTableau(prime, gens, phases)
