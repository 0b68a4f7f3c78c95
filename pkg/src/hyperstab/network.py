"""GHZ tensor network states on hypergraphs and random projection trials.

Every edge ``e`` of weight ``w(e)`` contributes ``w(e) * r`` GHZ states on
``|e|`` qudits, one qudit per incident vertex, which realizes a GHZ state of
local dimension ``D = p^r`` with multiplicity ``w(e)``. A trial projects the
qudits of each non-terminal vertex onto a random stabilizer state and
records the entropies of the terminal subsystems.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from hyperstab.errors import CapacityError, InputError, InvariantViolation, UndefinedEntropyError
from hyperstab.gfp import PrimeModulus, as_prime, make_rng
from hyperstab.hypergraph import (
    MinCutTable,
    WeightedHypergraph,
    mask_from_subset,
    prune_floating_components,
    subset_from_mask,
)
from hyperstab.stabilizer import (
    StabilizerTableau,
    ghz_tableau,
    project_onto_stabilizer,
    reduced_entropy,
    sample_random_stabilizer,
    tensor_all,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_QUDITS = 4096
DEFAULT_MAX_TERMINALS = 8


@dataclass(frozen=True)
class Site:
    """Placement of one qudit: the vertex holding it, its edge and copy index."""

    vertex: str
    edge: int
    copy: int


@dataclass(frozen=True, eq=False)
class NetworkLayout:
    """Qudit placement of the GHZ network for a hypergraph.

    Qudits are numbered edge-major: for each edge, for each of its
    ``w(e) * r`` copies, one qudit per vertex of the edge in vertex order.

    Attributes:
        hypergraph: The (pruned) hypergraph.
        prime: Qudit field prime.
        bond_exponent: ``r`` with ``D = p^r``.
        sites: ``sites[q]`` describes qudit ``q``.
        groups: Vertex id to its qudit indices, ascending.
    """

    hypergraph: WeightedHypergraph
    prime: PrimeModulus
    bond_exponent: int
    sites: Tuple[Site, ...]
    groups: Dict[str, Tuple[int, ...]] = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.prime.p

    @property
    def n_qudits(self) -> int:
        return len(self.sites)

    @property
    def log_bond_dimension(self) -> int:
        """``log_p D = r``."""
        return self.bond_exponent

    def log_local_dimension(self, vertex: str) -> int:
        """``log_p D_x = r * sum_{e containing x} w(e)``."""
        return self.bond_exponent * self.hypergraph.weighted_degree(vertex)

    @property
    def log_db(self) -> int:
        """``log_p D_b``, the summed local dimensions of the non-terminals."""
        return sum(self.log_local_dimension(x) for x in self.hypergraph.non_terminals)

    def qudits_of(self, vertices: Iterable[str]) -> List[int]:
        """Union of the qudit groups of ``vertices``, ascending."""
        chosen = self.hypergraph.subset(vertices)
        return sorted(q for v in chosen for q in self.groups[v])

    def ghz_blocks(self) -> List[int]:
        """Sizes of the consecutive GHZ blocks in qudit order."""
        sizes: List[int] = []
        for e, w in self.hypergraph.edges:
            sizes.extend([len(e)] * (w * self.bond_exponent))
        return sizes


def build_layout(
    h: WeightedHypergraph,
    p: "int | PrimeModulus",
    r: int,
    max_qudits: int = DEFAULT_MAX_QUDITS,
    max_terminals: int = DEFAULT_MAX_TERMINALS,
) -> NetworkLayout:
    """Place the qudits of the GHZ network without building the tableau.

    Raises:
        InputError: If ``r < 1`` or ``h`` has components without terminals.
        CapacityError: If the qudit or terminal count exceeds its bound.
    """
    prime = as_prime(p)
    if isinstance(r, bool) or int(r) != r or r < 1:
        raise InputError(f"bond exponent must be an integer >= 1, got {r}")
    r = int(r)
    if len(prune_floating_components(h).vertices) != len(h.vertices):
        raise InputError("hypergraph has components without terminals; prune it first")
    if len(h.terminals) > max_terminals:
        raise CapacityError(
            f"{len(h.terminals)} terminals exceed the bound of {max_terminals}"
        )
    total = r * sum(w * len(e) for e, w in h.edges)
    if total > max_qudits:
        raise CapacityError(f"network needs {total} qudits, bound is {max_qudits}")

    rank = h.index
    sites: List[Site] = []
    for idx, (e, w) in enumerate(h.edges):
        members = sorted(e, key=rank.__getitem__)
        for j in range(w * r):
            sites.extend(Site(v, idx, j) for v in members)

    groups: Dict[str, List[int]] = {v: [] for v in h.vertices}
    for q, site in enumerate(sites):
        groups[site.vertex].append(q)
    logger.debug(f"Layout: {total} qudits over p={prime.p}, r={r}, {len(h.edges)} edges")
    return NetworkLayout(
        hypergraph=h,
        prime=prime,
        bond_exponent=r,
        sites=tuple(sites),
        groups={v: tuple(qs) for v, qs in groups.items()},
    )


def build_omega(
    h: WeightedHypergraph,
    p: "int | PrimeModulus",
    r: int,
    max_qudits: int = DEFAULT_MAX_QUDITS,
    max_terminals: int = DEFAULT_MAX_TERMINALS,
) -> Tuple[NetworkLayout, StabilizerTableau]:
    """Layout and stabilizer tableau of the GHZ network state ``Omega``."""
    layout = build_layout(h, p, r, max_qudits=max_qudits, max_terminals=max_terminals)
    blocks = [ghz_tableau(k, layout.prime) for k in layout.ghz_blocks()]
    omega = tensor_all(blocks, layout.prime)
    return layout, omega


def omega_entropy(layout: NetworkLayout, omega: StabilizerTableau, subset: Iterable[str]) -> int:
    """Entropy of ``Omega`` on the qudits of ``subset``, in units of ``log p``.

    Equals ``r * c(S)``.
    """
    return reduced_entropy(omega, layout.qudits_of(subset))


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one random projection trial.

    Attributes:
        seed: Seed of the trial's random stream.
        nonzero: False when some projection annihilated the state.
        free_count: ``f`` with ``tr[Psi] = p^-f`` for nonzero outcomes.
        prime: Qudit field prime.
        bond_exponent: ``r`` of the network.
        terminals: Terminal ids; ``entropies`` is indexed by bitmask over them.
        entropies: Entropy of each terminal subset in units of ``log p``,
            None for zero outcomes.
    """

    seed: int
    nonzero: bool
    free_count: int
    prime: int
    bond_exponent: int
    terminals: Tuple[str, ...]
    entropies: Optional[Tuple[int, ...]] = None

    def trace(self) -> float:
        """``tr[Psi]``."""
        return float(self.prime) ** (-self.free_count) if self.nonzero else 0.0

    def entropy(self, members: Iterable[str]) -> int:
        if self.entropies is None:
            raise UndefinedEntropyError(f"trial with seed {self.seed} projected to zero")
        return self.entropies[mask_from_subset(self.terminals, members)]

    def entropy_map(self) -> Dict[FrozenSet[str], int]:
        if self.entropies is None:
            raise UndefinedEntropyError(f"trial with seed {self.seed} projected to zero")
        return {
            subset_from_mask(self.terminals, mask): value
            for mask, value in enumerate(self.entropies)
        }

    def normalized_entropy(self, members: Iterable[str]) -> float:
        """Entropy in units of ``log D``, comparable to ``m(A)``."""
        return self.entropy(members) / self.bond_exponent

    def max_deviation(self, mincuts: MinCutTable) -> float:
        """``max_A |entropy(A) / r - m(A)|``."""
        if self.entropies is None:
            raise UndefinedEntropyError(f"trial with seed {self.seed} projected to zero")
        return max(
            abs(e / self.bond_exponent - m) for e, m in zip(self.entropies, mincuts.values)
        )


def sample_targets(
    layout: NetworkLayout, seed: int
) -> List[Tuple[str, StabilizerTableau]]:
    """Random stabilizer states ``phi_x`` for the non-terminals, in vertex order.

    Vertices without qudits are skipped. Both simulation engines draw their
    targets through this function, so a seed fixes the same states for each.
    """
    rng = make_rng(seed)
    targets = []
    for x in layout.hypergraph.non_terminals:
        size = len(layout.groups[x])
        if size:
            targets.append((x, sample_random_stabilizer(size, layout.prime, rng)))
    return targets


def run_trial(layout: NetworkLayout, omega: StabilizerTableau, seed: int) -> TrialResult:
    """Project every non-terminal vertex of ``Omega`` onto a random stabilizer state."""
    if omega.n != layout.n_qudits or omega.p != layout.p:
        raise InputError(
            f"tableau on {omega.n} qudits over p={omega.p} does not match the layout "
            f"({layout.n_qudits} qudits, p={layout.p})"
        )
    terminals = layout.hypergraph.terminals
    # qudit ids of the current tableau columns, ascending
    alive = list(range(layout.n_qudits))
    state = omega
    free = 0
    for x, phi in sample_targets(layout, seed):
        group = set(layout.groups[x])
        position = {q: i for i, q in enumerate(alive)}
        outcome = project_onto_stabilizer(state, [position[q] for q in layout.groups[x]], phi)
        free += outcome.free_count
        if outcome.state is None:
            return TrialResult(
                seed=seed,
                nonzero=False,
                free_count=free,
                prime=layout.p,
                bond_exponent=layout.bond_exponent,
                terminals=terminals,
            )
        state = outcome.state
        alive = [q for q in alive if q not in group]

    position = {q: i for i, q in enumerate(alive)}
    terminal_sites = {t: [position[q] for q in layout.groups[t]] for t in terminals}
    if len(alive) != sum(len(s) for s in terminal_sites.values()):
        raise InvariantViolation("non-terminal qudits left after projection")
    entropies = []
    for mask in range(1 << len(terminals)):
        sites = [s for t in subset_from_mask(terminals, mask) for s in terminal_sites[t]]
        entropies.append(reduced_entropy(state, sites))
    return TrialResult(
        seed=seed,
        nonzero=True,
        free_count=free,
        prime=layout.p,
        bond_exponent=layout.bond_exponent,
        terminals=terminals,
        entropies=tuple(entropies),
    )
