"""Weighted hypergraphs, cut and min-cut functions.

This module provides:
- WeightedHypergraph: vertices, integer-weighted hyperedges and terminals
- cut_value: weight of the hyperedges split by a vertex subset
- mincut_table: min-cut value m(A) and minimizer count k(A) for every A of T
- prune_floating_components: drop components that never touch a terminal
- check_symmetric_submodular: property check for set functions on 2^T
- load_hypergraph / dump_hypergraph: the JSON file format
"""

import itertools
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from hyperstab.errors import CapacityError, InputError
from hyperstab.kernels import cut_histogram as _cut_histogram

logger = logging.getLogger(__name__)

DEFAULT_MAX_VERTICES = 24

Subset = FrozenSet[str]
Edge = Tuple[FrozenSet[str], int]


class EdgeSpec(BaseModel):
    """One hyperedge entry of a hypergraph file."""

    model_config = ConfigDict(extra="forbid")

    vertices: List[str] = Field(min_length=2)
    weight: int = Field(default=1, ge=1)


class HypergraphFile(BaseModel):
    """Schema of the hypergraph JSON file."""

    model_config = ConfigDict(extra="forbid")

    vertices: List[str]
    edges: List[EdgeSpec] = Field(default_factory=list)
    terminals: List[str] = Field(min_length=1)


@dataclass(frozen=True)
class WeightedHypergraph:
    """Hypergraph ``G = (V, E)`` with weights ``w: E -> N`` and terminals ``T``.

    Identical edges are merged on construction (their weights add up), so two
    hypergraphs with the same cut function compare equal.

    Attributes:
        vertices: Vertex ids in input order.
        edges: ``(vertex set, weight)`` pairs in first-appearance order.
        terminals: Terminal ids, ordered as in ``vertices``.
    """

    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    terminals: Tuple[str, ...]

    def __post_init__(self) -> None:
        vertices = tuple(str(v) for v in self.vertices)
        if len(set(vertices)) != len(vertices):
            raise InputError(f"duplicate vertex ids in {list(vertices)}")
        known = set(vertices)

        merged: Dict[FrozenSet[str], int] = {}
        for members, weight in self.edges:
            edge = frozenset(str(v) for v in members)
            unknown = sorted(edge - known)
            if unknown:
                raise InputError(f"edge {sorted(edge)} uses unknown vertex ids {unknown}")
            if len(edge) < 2:
                raise InputError(f"edge {sorted(edge)} must contain at least two vertices")
            if isinstance(weight, bool) or int(weight) != weight or weight < 1:
                raise InputError(f"edge {sorted(edge)} needs an integer weight >= 1, got {weight}")
            merged[edge] = merged.get(edge, 0) + int(weight)

        terminal_set = set(str(t) for t in self.terminals)
        if not terminal_set:
            raise InputError("terminal set must be nonempty")
        unknown_terminals = sorted(terminal_set - known)
        if unknown_terminals:
            raise InputError(f"unknown terminal ids {unknown_terminals}")

        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", tuple(merged.items()))
        object.__setattr__(self, "terminals", tuple(v for v in vertices if v in terminal_set))

    @property
    def index(self) -> Dict[str, int]:
        """Vertex id to position in ``vertices``."""
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def non_terminals(self) -> Tuple[str, ...]:
        terminal_set = set(self.terminals)
        return tuple(v for v in self.vertices if v not in terminal_set)

    @property
    def total_weight(self) -> int:
        return sum(w for _, w in self.edges)

    def weighted_degree(self, vertex: str) -> int:
        """Sum of ``w(e)`` over edges containing ``vertex``."""
        return sum(w for e, w in self.edges if vertex in e)

    def subset(self, members: Iterable[str]) -> Subset:
        """Validate vertex ids and return them as a frozenset."""
        chosen = frozenset(str(v) for v in members)
        unknown = sorted(chosen - set(self.vertices))
        if unknown:
            raise InputError(f"unknown vertex ids {unknown}")
        return chosen

    def terminal_subsets(self) -> List[Subset]:
        """All subsets of T, indexed by bitmask over ``terminals``."""
        return [subset_from_mask(self.terminals, mask) for mask in range(1 << len(self.terminals))]


def subset_from_mask(order: Sequence[str], mask: int) -> Subset:
    return frozenset(v for i, v in enumerate(order) if (mask >> i) & 1)


def mask_from_subset(order: Sequence[str], members: Iterable[str]) -> int:
    position = {v: i for i, v in enumerate(order)}
    mask = 0
    for v in members:
        if v not in position:
            raise InputError(f"{v!r} is not one of {list(order)}")
        mask |= 1 << position[v]
    return mask


def format_subset(members: Iterable[str], order: Optional[Sequence[str]] = None) -> str:
    """Render a subset as ``{a,b}`` in vertex order (or sorted without an order)."""
    items = list(members)
    if order is not None:
        rank = {v: i for i, v in enumerate(order)}
        items.sort(key=lambda v: rank.get(v, len(rank)))
    else:
        items.sort()
    return "{" + ",".join(items) + "}"


def cut_value(h: WeightedHypergraph, subset: Iterable[str]) -> int:
    """``c(S)``: total weight of edges with vertices both in ``S`` and ``V \\ S``."""
    s = h.subset(subset)
    return sum(w for e, w in h.edges if (e & s) and (e - s))


@dataclass(frozen=True)
class MinCutTable:
    """Min-cut function ``m`` and minimizer counts ``k`` on all subsets of T.

    Entries are indexed by bitmask over ``terminals``.
    """

    terminals: Tuple[str, ...]
    values: Tuple[int, ...]
    counts: Tuple[int, ...]

    def m(self, members: Iterable[str]) -> int:
        return self.values[mask_from_subset(self.terminals, members)]

    def k(self, members: Iterable[str]) -> int:
        return self.counts[mask_from_subset(self.terminals, members)]

    def subsets(self) -> List[Subset]:
        return [subset_from_mask(self.terminals, mask) for mask in range(len(self.values))]

    def as_function(self) -> Dict[Subset, int]:
        return dict(zip(self.subsets(), self.values))

    def rows(self) -> List[Tuple[Subset, int, int]]:
        """``(A, m(A), k(A))`` sorted by |A| then lexicographically."""
        position = {v: i for i, v in enumerate(self.terminals)}
        entries = list(zip(self.subsets(), self.values, self.counts))
        entries.sort(key=lambda row: (len(row[0]), sorted(position[v] for v in row[0])))
        return entries

    def is_symmetric_submodular(self) -> bool:
        return not check_symmetric_submodular(self.as_function(), tolerance=0)


def _require_enumerable(h: WeightedHypergraph, max_vertices: int) -> None:
    if len(h.vertices) > max_vertices:
        raise CapacityError(
            f"{len(h.vertices)} vertices exceed the enumeration bound of {max_vertices}"
        )


def cut_histogram(
    h: WeightedHypergraph, max_vertices: int = DEFAULT_MAX_VERTICES
) -> np.ndarray:
    """Histogram of ``c(S)`` per terminal part ``S & T`` from one sweep over 2^|V|.

    Returns an int64 array ``hist[mask, c]`` with masks over ``h.terminals``.
    """
    _require_enumerable(h, max_vertices)
    index = h.index
    edge_masks = np.array(
        [sum(1 << index[v] for v in e) for e, _ in h.edges], dtype=np.int64
    ).reshape(-1)
    weights = np.array([w for _, w in h.edges], dtype=np.int64).reshape(-1)
    terminal_bits = np.array([index[t] for t in h.terminals], dtype=np.int64)
    logger.debug(
        f"Sweeping 2^{len(h.vertices)} cuts ({len(h.edges)} edges, {len(h.terminals)} terminals)"
    )
    return _cut_histogram(edge_masks, weights, terminal_bits, len(h.vertices), h.total_weight)


def mincut_table(h: WeightedHypergraph, max_vertices: int = DEFAULT_MAX_VERTICES) -> MinCutTable:
    """Min-cut table ``m(A) = min_{S & T = A} c(S)`` with minimizer counts.

    Raises:
        InputError: If ``h`` has components without terminals (prune first).
        CapacityError: If ``|V|`` exceeds ``max_vertices``.
    """
    if len(prune_floating_components(h).vertices) != len(h.vertices):
        raise InputError("hypergraph has components without terminals; prune it first")
    hist = cut_histogram(h, max_vertices)
    values: List[int] = []
    counts: List[int] = []
    for row in hist:
        best = int(np.flatnonzero(row)[0])
        values.append(best)
        counts.append(int(row[best]))
    return MinCutTable(h.terminals, tuple(values), tuple(counts))


def brute_force_mincut(h: WeightedHypergraph, members: Iterable[str]) -> Tuple[int, int]:
    """``(m(A), k(A))`` by minimizing over the completions ``S \\ T`` directly."""
    a = h.subset(members)
    if not a <= set(h.terminals):
        raise InputError(f"{format_subset(a)} is not a subset of the terminals")
    free = h.non_terminals
    best: Optional[int] = None
    count = 0
    for size in range(len(free) + 1):
        for extra in itertools.combinations(free, size):
            value = cut_value(h, a | set(extra))
            if best is None or value < best:
                best, count = value, 1
            elif value == best:
                count += 1
    assert best is not None
    return best, count


def prune_floating_components(h: WeightedHypergraph) -> WeightedHypergraph:
    """Remove connected components that contain no terminal."""
    parent = {v: v for v in h.vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e, _ in h.edges:
        members = sorted(e)
        root = find(members[0])
        for v in members[1:]:
            other = find(v)
            if other != root:
                parent[other] = root

    anchored = {find(t) for t in h.terminals}
    kept = tuple(v for v in h.vertices if find(v) in anchored)
    if len(kept) == len(h.vertices):
        return h
    dropped = [v for v in h.vertices if v not in set(kept)]
    logger.debug(f"Pruned floating vertices {dropped}")
    kept_set = set(kept)
    return WeightedHypergraph(
        vertices=kept,
        edges=tuple((e, w) for e, w in h.edges if e <= kept_set),
        terminals=h.terminals,
    )


@dataclass(frozen=True)
class Violation:
    """A failed symmetry or submodularity check of a set function."""

    kind: str  # "symmetry" or "submodularity"
    a: Subset
    b: Subset
    excess: float

    def describe(self, order: Optional[Sequence[str]] = None) -> str:
        if self.kind == "symmetry":
            return (
                f"f({format_subset(self.a, order)}) != f({format_subset(self.b, order)}) "
                f"by {self.excess:g}"
            )
        return (
            f"f({format_subset(self.a, order)}) + f({format_subset(self.b, order)}) "
            f"< f(union) + f(intersection) by {self.excess:g}"
        )


def check_symmetric_submodular(
    f: Mapping[Subset, float], tolerance: float = 1e-9
) -> List[Violation]:
    """All symmetry and submodularity violations of a set function on 2^T.

    ``T`` is the union of the keys. Every subset of ``T`` must be present.

    Raises:
        InputError: If a subset of ``T`` has no value.
    """
    table = {frozenset(k): v for k, v in f.items()}
    ground = sorted(frozenset().union(*table.keys()) if table else frozenset())
    subsets = [subset_from_mask(ground, mask) for mask in range(1 << len(ground))]
    missing = [s for s in subsets if s not in table]
    if missing:
        raise InputError(
            f"set function is missing {len(missing)} subsets, e.g. {format_subset(missing[0])}"
        )
    full = frozenset(ground)
    violations: List[Violation] = []
    full_mask = len(subsets) - 1
    for mask, a in enumerate(subsets):
        # each complementary pair once
        if mask > full_mask ^ mask:
            continue
        gap = abs(table[a] - table[full - a])
        if gap > tolerance:
            violations.append(Violation("symmetry", a, full - a, gap))
    for a, b in itertools.combinations(subsets, 2):
        excess = table[a | b] + table[a & b] - table[a] - table[b]
        if excess > tolerance:
            violations.append(Violation("submodularity", a, b, excess))
    return violations


def random_hypergraph(
    n_vertices: int,
    n_terminals: int,
    n_edges: int,
    rng: np.random.Generator,
    max_weight: int = 3,
    max_edge_size: int = 3,
) -> WeightedHypergraph:
    """Small random instance for tests; terminals are the first ``n_terminals`` vertices.

    Floating components are pruned before returning.
    """
    if not 1 <= n_terminals <= n_vertices:
        raise InputError(f"need 1 <= terminals <= vertices, got {n_terminals}, {n_vertices}")
    vertices = [f"v{i}" for i in range(n_vertices)]
    edges: List[Edge] = []
    if n_vertices >= 2:
        for _ in range(n_edges):
            size = int(rng.integers(2, min(max_edge_size, n_vertices) + 1))
            members = rng.choice(n_vertices, size=size, replace=False)
            weight = int(rng.integers(1, max_weight + 1))
            edges.append((frozenset(vertices[int(i)] for i in members), weight))
    h = WeightedHypergraph(tuple(vertices), tuple(edges), tuple(vertices[:n_terminals]))
    return prune_floating_components(h)


def hypergraph_from_dict(data: Mapping[str, object]) -> WeightedHypergraph:
    """Build a hypergraph from the parsed JSON object."""
    try:
        parsed = HypergraphFile.model_validate(data)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or '<root>'}: {err['msg']}"
            for err in e.errors()
        )
        raise InputError(f"invalid hypergraph: {details}") from e
    return WeightedHypergraph(
        vertices=tuple(parsed.vertices),
        edges=tuple((frozenset(edge.vertices), edge.weight) for edge in parsed.edges),
        terminals=tuple(parsed.terminals),
    )


def load_hypergraph(path: Union[str, Path]) -> WeightedHypergraph:
    """Read a hypergraph file.

    Raises:
        InputError: On unreadable files, JSON syntax errors (with line and
            column) and schema violations.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise InputError(f"{path}: top-level value must be an object")
    return hypergraph_from_dict(data)


def hypergraph_to_dict(h: WeightedHypergraph) -> Dict[str, object]:
    """JSON-ready representation; subsets are vertex-ordered id lists."""
    rank = h.index
    return {
        "vertices": list(h.vertices),
        "edges": [
            {"vertices": sorted(e, key=rank.__getitem__), "weight": w} for e, w in h.edges
        ],
        "terminals": list(h.terminals),
    }


def dump_hypergraph(h: WeightedHypergraph, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(hypergraph_to_dict(h), indent=2) + "\n", encoding="utf-8")
