"""Linear algebra over GF(p) and uniform sampling of symplectic structures.

Classes:
    PrimeModulus: Validated stabilizer field prime.

Functions:
    rank: Rank of an integer matrix over GF(p).
    symplectic_product: Commutation form of two (x|z) vectors.
    random_symplectic: Uniformly random symplectic matrix (transvection method).
    random_lagrangian: Uniformly random maximal isotropic subspace.
    trial_seed / make_rng: Counter-style per-trial random streams.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from sympy import isprime

from hyperstab.errors import InputError
from hyperstab.kernels import gf_rank, inverse_mod as _inverse_mod

logger = logging.getLogger(__name__)

# Largest prime for which residues stay comfortably inside int64 products.
MAX_PRIME = 251


@dataclass(frozen=True)
class PrimeModulus:
    """Prime field order of the qudits.

    Attributes:
        p: Prime integer with ``2 <= p <= MAX_PRIME``.
    """

    p: int

    def __post_init__(self) -> None:
        """Validate primality."""
        if isinstance(self.p, bool) or not isinstance(self.p, (int, np.integer)):
            raise InputError(f"prime must be an integer, got {self.p!r}")
        if not 2 <= int(self.p) <= MAX_PRIME or not isprime(int(self.p)):
            raise InputError(f"prime must be a prime in [2, {MAX_PRIME}], got {self.p}")

    @property
    def phase_order(self) -> int:
        """Order of the phase root tau: 4 for qubits, p otherwise."""
        return 4 if self.p == 2 else self.p

    def __int__(self) -> int:
        return int(self.p)


def as_prime(p: "int | PrimeModulus") -> PrimeModulus:
    """Coerce an int or PrimeModulus into a validated PrimeModulus."""
    return p if isinstance(p, PrimeModulus) else PrimeModulus(int(p))


def inverse_mod(a: int, p: "int | PrimeModulus") -> int:
    """Multiplicative inverse of a nonzero residue.

    Raises:
        InputError: If ``a`` is divisible by ``p``.
    """
    modulus = int(as_prime(p))
    if a % modulus == 0:
        raise InputError(f"{a} has no inverse modulo {modulus}")
    return int(_inverse_mod(int(a), modulus))


def rank(matrix: np.ndarray, p: "int | PrimeModulus") -> int:
    """Rank over GF(p) by Gaussian elimination; the input is not modified.

    Examples:
        >>> rank(np.eye(3, dtype=np.int64), 2)
        3
        >>> rank(np.array([[1, 1], [2, 2]]), 3)
        1
    """
    mat = np.asarray(matrix, dtype=np.int64)
    if mat.ndim != 2:
        raise InputError(f"rank expects a 2-D matrix, got shape {mat.shape}")
    if mat.size == 0:
        return 0
    return int(gf_rank(np.ascontiguousarray(mat), int(as_prime(p))))


def symplectic_product(u: Sequence[int], v: Sequence[int], p: "int | PrimeModulus") -> int:
    """Return ``<u_x, v_z> - <u_z, v_x> mod p`` for (x|z)-split vectors.

    Two generalized Pauli operators commute up to phase iff the result is 0.

    Raises:
        InputError: If the vectors differ in length or have odd length.
    """
    modulus = int(as_prime(p))
    a = np.asarray(u, dtype=np.int64)
    b = np.asarray(v, dtype=np.int64)
    if a.shape != b.shape or a.ndim != 1 or a.shape[0] % 2:
        raise InputError(
            f"symplectic vectors must have equal even length, got {a.shape} and {b.shape}"
        )
    m = a.shape[0] // 2
    return int((a[:m] @ b[m:] - a[m:] @ b[:m]) % modulus)


def _form(u: np.ndarray, v: np.ndarray, p: int) -> int:
    m = u.shape[0] // 2
    return int((u[:m] @ v[m:] - u[m:] @ v[:m]) % p)


def _local_form(a: Tuple[int, int], b: Tuple[int, int], p: int) -> int:
    return (a[0] * b[1] - a[1] * b[0]) % p


Transvection = Tuple[np.ndarray, int]


def _apply_transvection(h: np.ndarray, c: int, mat: np.ndarray, p: int) -> np.ndarray:
    """Apply ``v -> v + c <v, h> h`` to every column of ``mat``."""
    m = h.shape[0] // 2
    # <v, h> for each column v
    coeff = (h[m:] @ mat[:m] - h[:m] @ mat[m:]) % p
    return (mat + c * np.outer(h, coeff)) % p


def _transvection_to(a: np.ndarray, b: np.ndarray, p: int) -> Transvection:
    """Single transvection taking ``a`` to ``b`` when ``<a, b> != 0``."""
    return (b - a) % p, inverse_mod(_form(a, b, p), p)


def _bridge_vector(x: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    """A vector ``z`` with ``<x, z> != 0`` and ``<z, y> != 0`` (x, y nonzero)."""
    m = x.shape[0] // 2
    z = np.zeros_like(x)
    candidates = [(i, j) for i in range(p) for j in range(p) if (i, j) != (0, 0)]
    x_sites = [k for k in range(m) if x[k] or x[m + k]]
    y_sites = [k for k in range(m) if y[k] or y[m + k]]
    shared = [k for k in x_sites if k in y_sites]
    if shared:
        k = shared[0]
        xs, ys = (int(x[k]), int(x[m + k])), (int(y[k]), int(y[m + k]))
        for cand in candidates:
            if _local_form(xs, cand, p) and _local_form(cand, ys, p):
                z[k], z[m + k] = cand
                return z
    j, k = x_sites[0], y_sites[0]
    xs, ys = (int(x[j]), int(x[m + j])), (int(y[k]), int(y[m + k]))
    zj = next(c for c in candidates if _local_form(xs, c, p))
    zk = next(c for c in candidates if _local_form(c, ys, p))
    z[j], z[m + j] = zj
    z[k], z[m + k] = zk
    return z


def _transvections_between(x: np.ndarray, y: np.ndarray, p: int) -> List[Transvection]:
    """At most two transvections whose composition maps nonzero ``x`` to ``y``."""
    if np.array_equal(x, y):
        return []
    if _form(x, y, p):
        return [_transvection_to(x, y, p)]
    z = _bridge_vector(x, y, p)
    return [_transvection_to(x, z, p), _transvection_to(z, y, p)]


def _uniform_nonzero(rng: np.random.Generator, dim: int, p: int) -> np.ndarray:
    while True:
        v = rng.integers(0, p, size=dim, dtype=np.int64)
        if v.any():
            return v


def _pair_transvections(
    k: int, m: int, f: np.ndarray, g: np.ndarray, p: int
) -> List[Transvection]:
    """Transvections sending ``(X_k, Z_k)`` to ``(f, g)`` where ``<f, g> = 1``."""
    e_x = np.zeros(2 * m, dtype=np.int64)
    e_x[k] = 1
    e_z = np.zeros(2 * m, dtype=np.int64)
    e_z[m + k] = 1
    steps = _transvections_between(e_x, f, p)
    y = e_z.reshape(-1, 1)
    for h, c in steps:
        y = _apply_transvection(h, c, y, p)
    y = y[:, 0]
    # remaining transvections must fix f, so their vectors are orthogonal to f
    if np.array_equal(y, g):
        return steps
    if _form(y, g, p):
        return steps + [_transvection_to(y, g, p)]
    z = (y + f) % p
    return steps + [_transvection_to(y, z, p), _transvection_to(z, g, p)]


def random_symplectic(m: int, p: "int | PrimeModulus", rng: np.random.Generator) -> np.ndarray:
    """Uniformly random symplectic matrix on GF(p)^(2m), columns are images.

    Site by site, a uniformly random symplectic pair ``(f, g)`` is drawn in the
    span of the not yet fixed sites and the basis pair ``(X_k, Z_k)`` is sent
    to it by a composition of transvections. The product of these maps is
    uniform over Sp(2m, p).
    """
    modulus = int(as_prime(p))
    if m < 0:
        raise InputError(f"qudit count must be nonnegative, got {m}")
    dim = 2 * m
    stages: List[List[Transvection]] = []
    for k in range(m):
        span = np.zeros(dim, dtype=np.int64)
        free = np.array(list(range(k, m)) + list(range(m + k, dim)), dtype=np.int64)
        f = span.copy()
        f[free] = _uniform_nonzero(rng, free.shape[0], modulus)
        while True:
            g = span.copy()
            g[free] = rng.integers(0, modulus, size=free.shape[0], dtype=np.int64)
            s = _form(f, g, modulus)
            if s:
                g = (g * inverse_mod(s, modulus)) % modulus
                break
        stages.append(_pair_transvections(k, m, f, g, modulus))

    mat = np.eye(dim, dtype=np.int64)
    for steps in reversed(stages):
        for h, c in steps:
            mat = _apply_transvection(h, c, mat, modulus)
    return mat


def random_lagrangian(m: int, p: "int | PrimeModulus", rng: np.random.Generator) -> np.ndarray:
    """Basis (m x 2m) of a uniformly random Lagrangian subspace of GF(p)^(2m).

    The rows are the images of the all-Z basis under a uniform symplectic map;
    they are pairwise symplectically orthogonal and have rank m.
    """
    if m < 1:
        raise InputError(f"random_lagrangian needs m >= 1, got {m}")
    sym = random_symplectic(m, p, rng)
    return np.ascontiguousarray(sym[:, m:].T)


def count_lagrangians(m: int, p: "int | PrimeModulus") -> int:
    """Number of Lagrangian subspaces of GF(p)^(2m): prod_{i=1..m} (p^i + 1)."""
    modulus = int(as_prime(p))
    total = 1
    for i in range(1, m + 1):
        total *= modulus**i + 1
    return total


def count_stabilizer_states(m: int, p: "int | PrimeModulus") -> int:
    """Number of pure stabilizer states on m qudits: p^m prod_{i=1..m} (p^i + 1)."""
    modulus = int(as_prime(p))
    return modulus**m * count_lagrangians(m, modulus)


def trial_seed(master_seed: int, *key: int) -> int:
    """Derive a 63-bit seed for the stream identified by ``(master_seed, *key)``."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def make_rng(seed: int) -> np.random.Generator:
    """Random generator owned by a single trial."""
    return np.random.default_rng(int(seed))
