"""Dense state-vector oracle for cross-checking the stabilizer engine.

Amplitudes are stored as complex tensors of shape ``(p,) * n`` with qudit 0
as the most significant index. Everything here is exponential in ``n`` and is
meant for instances with at most ``2**20`` amplitudes.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from hyperstab.errors import CapacityError, InputError, InvariantViolation, UndefinedEntropyError
from hyperstab.gfp import make_rng
from hyperstab.hypergraph import subset_from_mask
from hyperstab.network import NetworkLayout, TrialResult, sample_targets
from hyperstab.stabilizer import StabilizerTableau

logger = logging.getLogger(__name__)

DEFAULT_MAX_DIMENSION = 2**20
EIGENVALUE_CUTOFF = 1e-10
ZERO_NORM = 1e-12
RENYI_ORDERS = (0, 1, 2)


@dataclass(frozen=True, eq=False)
class DenseState:
    """Possibly unnormalized state vector of ``n`` qudits.

    Attributes:
        p: Local dimension.
        amplitudes: Complex tensor of shape ``(p,) * n``.
        labels: Optional per-qudit labels (original qudit ids of a layout).
    """

    p: int
    amplitudes: np.ndarray
    labels: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if any(dim != self.p for dim in amps.shape):
            raise InputError(f"amplitude tensor must have shape (p,)*n, got {amps.shape}")
        if self.labels is not None and len(self.labels) != amps.ndim:
            raise InputError(f"{len(self.labels)} labels for {amps.ndim} qudits")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return int(self.amplitudes.ndim)

    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_zero(self) -> bool:
        return self.norm_squared() < ZERO_NORM


def _require_dimension(p: int, n: int, max_dimension: int) -> None:
    if p**n > max_dimension:
        raise CapacityError(
            f"dense state on {n} qudits of dimension {p} has {p**n} amplitudes, "
            f"bound is {max_dimension}"
        )


def _tau(p: int) -> complex:
    """Square root of ``omega`` with order ``p`` (odd p) or 4 (p = 2)."""
    if p == 2:
        return 1j
    return complex(np.exp(2j * np.pi * ((p + 1) // 2) / p))


def _apply_pauli(amps: np.ndarray, x: np.ndarray, z: np.ndarray, phase: int, p: int) -> np.ndarray:
    """Apply ``tau^phase W(x, z) = tau^(phase + x.z) X^x Z^z`` to a tensor."""
    n = amps.ndim
    exponent = np.zeros((1,) * n, dtype=np.int64)
    for i in range(n):
        if z[i]:
            shape = [1] * n
            shape[i] = p
            exponent = exponent + (int(z[i]) * np.arange(p)).reshape(shape)
    out = amps * np.exp(2j * np.pi * (exponent % p) / p)
    for i in range(n):
        if x[i]:
            out = np.roll(out, int(x[i]), axis=i)
    order = 4 if p == 2 else p
    return out * _tau(p) ** ((int(phase) + int(x @ z)) % order)


def tableau_to_vector(
    t: StabilizerTableau, max_dimension: int = DEFAULT_MAX_DIMENSION
) -> DenseState:
    """Unit vector stabilized by every generator of ``t``.

    Projects a fixed random vector with ``(1/p) sum_j g^j`` for each
    generator ``g``; the global phase makes the first significant amplitude
    real and positive.

    Raises:
        CapacityError: If ``p^n`` exceeds ``max_dimension``.
        InvariantViolation: If no nonzero vector survives (inconsistent phases).
    """
    p, n = t.p, t.n
    _require_dimension(p, n, max_dimension)
    rng = np.random.default_rng(0)
    shape = (p,) * n
    amps = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    for row in range(n):
        x, z, s = t.x[row], t.z[row], int(t.phases[row])
        total = amps.copy()
        power = amps
        for _ in range(p - 1):
            power = _apply_pauli(power, x, z, s, p)
            total = total + power
        amps = total / p
    norm = np.sqrt(np.vdot(amps, amps).real)
    if norm < 1e-9:
        raise InvariantViolation(f"{t!r} stabilizes no nonzero vector")
    amps = amps / norm
    flat = amps.reshape(-1)
    lead = int(np.flatnonzero(np.abs(flat) > 1e-9)[0])
    amps = amps * (abs(flat[lead]) / flat[lead])
    return DenseState(p, amps)


def dense_project(state: DenseState, sites: Sequence[int], target: DenseState) -> DenseState:
    """Contract ``<target|`` against ``sites``; the result lives on the other qudits."""
    sites = [int(s) for s in sites]
    if target.p != state.p:
        raise InputError(f"prime mismatch: state over {state.p}, target over {target.p}")
    if len(sites) != target.n or len(set(sites)) != len(sites):
        raise InputError(f"target has {target.n} qudits but sites are {sites}")
    if any(s < 0 or s >= state.n for s in sites):
        raise InputError(f"site index out of range for {state.n} qudits: {sites}")
    amps = np.tensordot(target.amplitudes.conj(), state.amplitudes, axes=(list(range(target.n)), sites))
    labels = None
    if state.labels is not None:
        dropped = set(sites)
        labels = tuple(label for i, label in enumerate(state.labels) if i not in dropped)
    return DenseState(state.p, amps, labels)


def reduced_spectrum(state: DenseState, sites: Iterable[int]) -> np.ndarray:
    """Eigenvalues of the normalized reduced density matrix on ``sites`` above the cutoff."""
    if state.is_zero():
        raise UndefinedEntropyError("entropy of the zero vector is undefined")
    inside = sorted(set(int(s) for s in sites))
    if any(s < 0 or s >= state.n for s in inside):
        raise InputError(f"site index out of range for {state.n} qudits: {inside}")
    outside = [i for i in range(state.n) if i not in set(inside)]
    amps = state.amplitudes / np.sqrt(state.norm_squared())
    matrix = np.transpose(amps, inside + outside).reshape(state.p ** len(inside), -1)
    eigenvalues = np.linalg.svd(matrix, compute_uv=False) ** 2
    return eigenvalues[eigenvalues > EIGENVALUE_CUTOFF]


def dense_entropy(state: DenseState, sites: Iterable[int], order: int = 1) -> float:
    """Renyi entropy of order 0 (log-rank), 1 (von Neumann) or 2, in units of ``log p``.

    Raises:
        UndefinedEntropyError: If ``state`` is the zero vector.
    """
    if order not in RENYI_ORDERS:
        raise InputError(f"entropy order must be one of {RENYI_ORDERS}, got {order}")
    spectrum = reduced_spectrum(state, sites)
    log_p = np.log(state.p)
    if order == 0:
        value = np.log(spectrum.size) / log_p
    elif order == 1:
        value = float(-np.sum(spectrum * np.log(spectrum)) / log_p)
    else:
        value = float(-np.log(np.sum(spectrum**2)) / log_p)
    return max(float(value), 0.0)


def renyi_chain_holds(state: DenseState, sites: Iterable[int], tolerance: float = 1e-9) -> bool:
    """``S_2 <= S <= S_0`` on ``sites``."""
    sites = list(sites)
    s0, s1, s2 = (dense_entropy(state, sites, order) for order in (0, 1, 2))
    return s2 <= s1 + tolerance and s1 <= s0 + tolerance


def ghz_vector(parties: int, p: int) -> np.ndarray:
    """``(1/sqrt p) sum_i |i>^k`` as a tensor."""
    amps = np.zeros((p,) * parties, dtype=np.complex128)
    for i in range(p):
        amps[(i,) * parties] = 1.0
    return amps / np.sqrt(p)


def dense_omega(layout: NetworkLayout, max_dimension: int = DEFAULT_MAX_DIMENSION) -> DenseState:
    """``Omega`` built from dense GHZ vectors in the layout's qudit order."""
    p = layout.p
    _require_dimension(p, layout.n_qudits, max_dimension)
    vec = np.ones(1, dtype=np.complex128)
    for k in layout.ghz_blocks():
        vec = np.kron(vec, ghz_vector(k, p).reshape(-1))
    return DenseState(p, vec.reshape((p,) * layout.n_qudits), tuple(range(layout.n_qudits)))


@dataclass(frozen=True)
class DenseTrialResult:
    """Dense counterpart of ``TrialResult``.

    Attributes:
        seed: Seed of the trial's random stream.
        nonzero: False when the projected vector vanishes.
        trace: Squared norm of the projected vector.
        terminals: Terminal ids; entropy tuples are indexed by bitmask.
        entropies: Renyi order to per-subset entropies (units of ``log p``).
    """

    seed: int
    nonzero: bool
    trace: float
    terminals: Tuple[str, ...]
    entropies: Dict[int, Tuple[float, ...]] = field(default_factory=dict)
    chain_holds: bool = True


def _project_network(
    layout: NetworkLayout,
    targets: List[Tuple[str, DenseState]],
    max_dimension: int,
) -> DenseState:
    state = dense_omega(layout, max_dimension)
    for x, phi in targets:
        group = set(layout.groups[x])
        assert state.labels is not None
        sites = [i for i, label in enumerate(state.labels) if label in group]
        state = dense_project(state, sites, phi)
    return state


def _dense_trial(
    layout: NetworkLayout, seed: int, state: DenseState
) -> DenseTrialResult:
    terminals = layout.hypergraph.terminals
    trace = state.norm_squared()
    if trace < ZERO_NORM:
        return DenseTrialResult(seed=seed, nonzero=False, trace=0.0, terminals=terminals)
    assert state.labels is not None
    position = {label: i for i, label in enumerate(state.labels)}
    entropies: Dict[int, List[float]] = {order: [] for order in RENYI_ORDERS}
    chain = True
    for mask in range(1 << len(terminals)):
        sites = [position[q] for t in subset_from_mask(terminals, mask) for q in layout.groups[t]]
        for order in RENYI_ORDERS:
            entropies[order].append(dense_entropy(state, sites, order))
        chain = chain and renyi_chain_holds(state, sites)
    return DenseTrialResult(
        seed=seed,
        nonzero=True,
        trace=trace,
        terminals=terminals,
        entropies={order: tuple(values) for order, values in entropies.items()},
        chain_holds=chain,
    )


def replay_trial(
    layout: NetworkLayout, seed: int, max_dimension: int = DEFAULT_MAX_DIMENSION
) -> DenseTrialResult:
    """Dense replay of ``run_trial`` with the same random stabilizer targets."""
    targets = [
        (x, tableau_to_vector(phi, max_dimension)) for x, phi in sample_targets(layout, seed)
    ]
    return _dense_trial(layout, seed, _project_network(layout, targets, max_dimension))


def haar_trial(
    layout: NetworkLayout, seed: int, max_dimension: int = DEFAULT_MAX_DIMENSION
) -> DenseTrialResult:
    """Projection trial with Haar-random targets instead of stabilizer states."""
    rng = make_rng(seed)
    p = layout.p
    targets = []
    for x in layout.hypergraph.non_terminals:
        size = len(layout.groups[x])
        if size:
            shape = (p,) * size
            vec = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            targets.append((x, DenseState(p, vec / np.sqrt(np.vdot(vec, vec).real))))
    return _dense_trial(layout, seed, _project_network(layout, targets, max_dimension))


@dataclass(frozen=True)
class TrialComparison:
    """Disagreements between a stabilizer trial and its dense replay."""

    seed: int
    mismatches: Tuple[str, ...] = ()

    @property
    def agrees(self) -> bool:
        return not self.mismatches


def compare_trial(
    stab: TrialResult, dense: DenseTrialResult, tolerance: float = 1e-9
) -> TrialComparison:
    """Check nonzero flag, trace and entropies of all orders against each other."""
    problems: List[str] = []
    if stab.nonzero != dense.nonzero:
        problems.append(f"nonzero flag: stabilizer {stab.nonzero}, dense {dense.nonzero}")
    elif stab.nonzero:
        if abs(stab.trace() - dense.trace) > tolerance:
            problems.append(f"trace: stabilizer {stab.trace():.12g}, dense {dense.trace:.12g}")
        assert stab.entropies is not None
        for order, values in sorted(dense.entropies.items()):
            for mask, (exact, approx) in enumerate(zip(stab.entropies, values)):
                if abs(exact - approx) > tolerance:
                    problems.append(
                        f"S_{order} of {sorted(subset_from_mask(stab.terminals, mask))}: "
                        f"stabilizer {exact}, dense {approx:.12g}"
                    )
        if not dense.chain_holds:
            problems.append("Renyi chain S_2 <= S <= S_0 violated")
    return TrialComparison(seed=stab.seed, mismatches=tuple(problems))
