"""Monte Carlo experiments on random stabilizer tensor networks.

This module runs projection trials for a list of bond exponents and
aggregates them into:
- MomentReport: first and second moments against their exact values
- ConcentrationReport: nonzero probability, entropy gaps and success
  fractions as functions of the bond dimension
- EntropyVectorCheck: symmetry/submodularity and rank bound of every
  measured entropy vector

Trials are keyed by ``(master seed, r, trial index)`` and results are
aggregated in trial-index order, so reports do not depend on the number of
worker processes.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from hyperstab.errors import InputError
from hyperstab.gfp import as_prime, trial_seed
from hyperstab.hypergraph import (
    DEFAULT_MAX_VERTICES,
    MinCutTable,
    WeightedHypergraph,
    check_symmetric_submodular,
    cut_histogram,
    mask_from_subset,
    mincut_table,
    subset_from_mask,
)
from hyperstab.network import (
    DEFAULT_MAX_QUDITS,
    DEFAULT_MAX_TERMINALS,
    NetworkLayout,
    TrialResult,
    build_omega,
    run_trial,
)
from hyperstab.stabilizer import StabilizerTableau

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int], None]


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of a Monte Carlo run.

    Attributes:
        hypergraph: The (pruned) hypergraph.
        prime: Qudit field prime.
        bond_exponents: Strictly ascending list of ``r`` values.
        trials: Trials per bond exponent.
        seed: Master seed.
        delta: Tolerance of the success criterion.
        jobs: Worker processes (None or 1 runs in-process).
        source: Where the hypergraph came from, echoed in reports.
    """

    hypergraph: WeightedHypergraph
    prime: int = 2
    bond_exponents: Tuple[int, ...] = (1,)
    trials: int = 1000
    seed: int = 0
    delta: float = 0.3
    jobs: Optional[int] = None
    source: Optional[str] = None
    max_vertices: int = DEFAULT_MAX_VERTICES
    max_qudits: int = DEFAULT_MAX_QUDITS
    max_terminals: int = DEFAULT_MAX_TERMINALS

    def __post_init__(self) -> None:
        as_prime(self.prime)
        exponents = tuple(self.bond_exponents)
        if not exponents:
            raise InputError("at least one bond exponent is required")
        if any(int(r) != r or r < 1 for r in exponents):
            raise InputError(f"bond exponents must be integers >= 1, got {list(exponents)}")
        if any(b <= a for a, b in zip(exponents, exponents[1:])):
            raise InputError(f"bond exponents must be strictly ascending, got {list(exponents)}")
        if self.trials < 1:
            raise InputError(f"trials must be >= 1, got {self.trials}")
        if not self.delta > 0:
            raise InputError(f"delta must be positive, got {self.delta}")
        if self.seed < 0:
            raise InputError(f"seed must be nonnegative, got {self.seed}")
        if self.jobs is not None and self.jobs < 1:
            raise InputError(f"jobs must be >= 1, got {self.jobs}")
        object.__setattr__(self, "bond_exponents", tuple(int(r) for r in exponents))

    def to_dict(self) -> Dict[str, Any]:
        """Echo for reports. The worker count is not part of it."""
        return {
            "source": self.source,
            "prime": self.prime,
            "bond_exponents": list(self.bond_exponents),
            "trials": self.trials,
            "seed": self.seed,
            "delta": self.delta,
        }


def _subset_list(members: Iterable[str]) -> List[str]:
    return sorted(members)


def _mean_se(values: np.ndarray) -> Tuple[float, float]:
    if values.size == 0:
        return math.nan, math.nan
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def _z_score(mean: float, exact: float, se: float) -> float:
    if se > 0:
        return (mean - exact) / se
    if math.isclose(mean, exact, rel_tol=1e-12, abs_tol=1e-12):
        return 0.0
    return math.copysign(math.inf, mean - exact)


def _exact_second_moments(
    h: WeightedHypergraph, p: int, r: int, hist: np.ndarray
) -> List[Fraction]:
    bond = p**r
    prefactor = Fraction(1)
    for x in h.non_terminals:
        local = p ** (r * h.weighted_degree(x))
        prefactor /= local * (local + 1)
    moments = []
    for row in hist:
        total = sum(
            (Fraction(int(count), bond**c) for c, count in enumerate(row) if count), Fraction(0)
        )
        moments.append(prefactor * total)
    return moments


def exact_second_moment(
    h: WeightedHypergraph,
    p: int,
    r: int,
    members: Iterable[str],
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> Fraction:
    """``E[tr Psi_A^2]`` over uniformly random stabilizer projections, exactly.

    ``prod_{x not in T} 1 / (D_x (D_x + 1)) * sum_{S & T = A} D^-c(S)`` with
    ``D = p^r``.

    Raises:
        CapacityError: If ``|V|`` exceeds ``max_vertices``.
    """
    as_prime(p)
    if r < 1:
        raise InputError(f"bond exponent must be >= 1, got {r}")
    mask = mask_from_subset(h.terminals, h.subset(members))
    hist = cut_histogram(h, max_vertices)
    return _exact_second_moments(h, p, r, hist[mask : mask + 1])[0]


_WORKER_NETWORK: Optional[Tuple[NetworkLayout, StabilizerTableau]] = None


def _init_worker(layout: NetworkLayout, omega: StabilizerTableau) -> None:
    global _WORKER_NETWORK
    _WORKER_NETWORK = (layout, omega)


def _worker_trial(seed: int) -> TrialResult:
    assert _WORKER_NETWORK is not None
    layout, omega = _WORKER_NETWORK
    return run_trial(layout, omega, seed)


def run_trials(
    layout: NetworkLayout,
    omega: StabilizerTableau,
    seeds: Sequence[int],
    jobs: Optional[int] = 1,
    progress: Optional[ProgressCallback] = None,
) -> List[TrialResult]:
    """Run one trial per seed; results come back in seed order."""
    seeds = [int(s) for s in seeds]
    results: List[TrialResult] = []
    workers = min(jobs or 1, len(seeds))
    if workers <= 1:
        for seed in seeds:
            results.append(run_trial(layout, omega, seed))
            if progress:
                progress(1)
        return results

    chunksize = max(1, len(seeds) // (workers * 8))
    logger.debug(f"Running {len(seeds)} trials on {workers} workers (chunksize {chunksize})")
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(layout, omega)
    ) as pool:
        for result in pool.map(_worker_trial, seeds, chunksize=chunksize):
            results.append(result)
            if progress:
                progress(1)
    return results


def trial_seeds(master_seed: int, r: int, trials: int) -> List[int]:
    """Seeds of the trials run at bond exponent ``r``."""
    return [trial_seed(master_seed, r, i) for i in range(trials)]


@dataclass(frozen=True)
class MomentRow:
    """Second moment statistics of ``D_b^2 tr[Psi_A^2]`` for one subset ``A``."""

    subset: Tuple[str, ...]
    m: int
    k: int
    mean: float
    se: float
    exact: float
    exact_fraction: Fraction
    z: float
    ratio_mean: float
    ratio_exact: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "A": list(self.subset),
            "m": self.m,
            "kA": self.k,
            "mean": self.mean,
            "se": self.se,
            "exact": self.exact,
            "exact_fraction": str(self.exact_fraction),
            "z": self.z,
            "ratio_mean": self.ratio_mean,
            "ratio_exact": self.ratio_exact,
        }


@dataclass(frozen=True)
class MomentReport:
    """Moment statistics at one bond exponent.

    ``trace_*`` refer to ``D_b tr[Psi]`` whose exact mean is 1. The rows scale
    ``tr[Psi_A^2]`` by ``D_b^2``; ``ratio_*`` further multiply by
    ``D^m(A)``, which tends to ``k_A`` as ``D`` grows.
    """

    bond_exponent: int
    prime: int
    trials: int
    zero_count: int
    log_db: int
    trace_mean: float
    trace_se: float
    trace_z: float
    rows: Tuple[MomentRow, ...]

    def row(self, members: Iterable[str]) -> MomentRow:
        wanted = tuple(sorted(members))
        for row in self.rows:
            if row.subset == wanted:
                return row
        raise InputError(f"no moment row for {list(wanted)}")

    def max_abs_z(self) -> float:
        return max([abs(self.trace_z)] + [abs(row.z) for row in self.rows])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.bond_exponent,
            "prime": self.prime,
            "trials": self.trials,
            "zero_count": self.zero_count,
            "log_db": self.log_db,
            "trace": {"mean": self.trace_mean, "exact": 1.0, "se": self.trace_se, "z": self.trace_z},
            "rows": [row.to_dict() for row in self.rows],
        }


def summarize_moments(
    layout: NetworkLayout,
    mincuts: MinCutTable,
    exact: Sequence[Fraction],
    trials: Sequence[TrialResult],
) -> MomentReport:
    """Aggregate trials into moment estimates; zero outcomes count as 0."""
    p, r = layout.p, layout.bond_exponent
    log_db = layout.log_db
    free = np.array([t.free_count for t in trials], dtype=np.float64)
    nonzero = np.array([t.nonzero for t in trials], dtype=bool)
    trace = np.where(nonzero, np.power(float(p), log_db - free), 0.0)
    trace_mean, trace_se = _mean_se(trace)

    rows: List[MomentRow] = []
    scale = Fraction(p) ** (2 * log_db)
    for mask, subset in enumerate(mincuts.subsets()):
        entropy = np.array(
            [t.entropies[mask] if t.entropies is not None else 0 for t in trials],
            dtype=np.float64,
        )
        purity = np.where(nonzero, np.power(float(p), 2 * log_db - 2 * free - entropy), 0.0)
        mean, se = _mean_se(purity)
        exact_scaled = float(exact[mask] * scale)
        bond_power = float(p) ** (r * mincuts.values[mask])
        rows.append(
            MomentRow(
                subset=tuple(_subset_list(subset)),
                m=mincuts.values[mask],
                k=mincuts.counts[mask],
                mean=mean,
                se=se,
                exact=exact_scaled,
                exact_fraction=exact[mask],
                z=_z_score(mean, exact_scaled, se),
                ratio_mean=mean * bond_power,
                ratio_exact=exact_scaled * bond_power,
            )
        )
    position = {v: i for i, v in enumerate(mincuts.terminals)}
    rows.sort(key=lambda row: (len(row.subset), sorted(position[v] for v in row.subset)))
    return MomentReport(
        bond_exponent=r,
        prime=p,
        trials=len(trials),
        zero_count=int((~nonzero).sum()),
        log_db=log_db,
        trace_mean=trace_mean,
        trace_se=trace_se,
        trace_z=_z_score(trace_mean, 1.0, trace_se),
        rows=tuple(rows),
    )


@dataclass(frozen=True)
class GapRow:
    """Conditional entropy gap ``r m(A) - S(Psi_A)`` in units of ``log p``."""

    subset: Tuple[str, ...]
    m: int
    k: int
    mean_gap: float
    se: float
    bound: float
    samples: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "A": list(self.subset),
            "m": self.m,
            "kA": self.k,
            "mean_gap": self.mean_gap,
            "se": self.se,
            "log_kA": self.bound,
            "samples": self.samples,
        }


@dataclass(frozen=True)
class ConcentrationRow:
    """Concentration statistics at one bond exponent."""

    bond_exponent: int
    trials: int
    nonzero_count: int
    p_nonzero: float
    p_nonzero_se: float
    success_fraction: float
    success_se: float
    trace_event_fraction: float
    mean_max_deviation: Optional[float]
    gaps: Tuple[GapRow, ...]
    seeds: Tuple[int, ...] = field(repr=False, default=())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.bond_exponent,
            "trials": self.trials,
            "nonzero": self.nonzero_count,
            "p_nonzero": self.p_nonzero,
            "p_nonzero_se": self.p_nonzero_se,
            "success_fraction": self.success_fraction,
            "se": self.success_se,
            "trace_event_fraction": self.trace_event_fraction,
            "mean_max_deviation": self.mean_max_deviation,
            "gaps": [gap.to_dict() for gap in self.gaps],
            "seeds": list(self.seeds),
        }


def _fraction_se(fraction: float, n: int) -> float:
    return math.sqrt(fraction * (1.0 - fraction) / n) if n else math.nan


def summarize_concentration(
    layout: NetworkLayout,
    mincuts: MinCutTable,
    trials: Sequence[TrialResult],
    delta: float,
) -> ConcentrationRow:
    """Aggregate trials into the concentration statistics for one ``r``.

    Zero outcomes count against ``p_nonzero`` and the success fraction and
    are left out of the conditional gap and deviation means.
    """
    p, r = layout.p, layout.bond_exponent
    n = len(trials)
    kept = [t for t in trials if t.nonzero]
    m = np.array(mincuts.values, dtype=np.float64)

    if kept:
        entropies = np.array([t.entropies for t in kept], dtype=np.float64)
        deviation = np.max(np.abs(entropies / r - m), axis=1)
        successes = int(np.count_nonzero(deviation <= delta))
        mean_max_deviation: Optional[float] = float(np.mean(deviation))
    else:
        entropies = np.zeros((0, m.size))
        successes = 0
        mean_max_deviation = None

    # |D_b tr[Psi] - 1| <= D^(-1/4)
    trace = np.array(
        [float(p) ** (layout.log_db - t.free_count) if t.nonzero else 0.0 for t in trials]
    )
    trace_event = int(np.count_nonzero(np.abs(trace - 1.0) <= float(p) ** (-r / 4)))

    gaps: List[GapRow] = []
    for mask, subset in enumerate(mincuts.subsets()):
        gap = r * m[mask] - entropies[:, mask]
        mean, se = _mean_se(gap)
        gaps.append(
            GapRow(
                subset=tuple(_subset_list(subset)),
                m=mincuts.values[mask],
                k=mincuts.counts[mask],
                mean_gap=mean,
                se=se,
                bound=math.log(mincuts.counts[mask], p),
                samples=len(kept),
            )
        )
    position = {v: i for i, v in enumerate(mincuts.terminals)}
    gaps.sort(key=lambda row: (len(row.subset), sorted(position[v] for v in row.subset)))

    p_nonzero = len(kept) / n
    success = successes / n
    return ConcentrationRow(
        bond_exponent=r,
        trials=n,
        nonzero_count=len(kept),
        p_nonzero=p_nonzero,
        p_nonzero_se=_fraction_se(p_nonzero, n),
        success_fraction=success,
        success_se=_fraction_se(success, n),
        trace_event_fraction=trace_event / n,
        mean_max_deviation=mean_max_deviation,
        gaps=tuple(gaps),
        seeds=tuple(t.seed for t in trials),
    )


@dataclass(frozen=True)
class ConcentrationReport:
    """Concentration rows for every bond exponent of a run."""

    prime: int
    delta: float
    rows: Tuple[ConcentrationRow, ...]

    def row(self, r: int) -> ConcentrationRow:
        for row in self.rows:
            if row.bond_exponent == r:
                return row
        raise InputError(f"no concentration row for r={r}")

    def is_nondecreasing(self, attribute: str = "success_fraction", sigmas: float = 2.0) -> bool:
        """Whether a fraction grows with ``r`` up to ``sigmas`` combined standard errors."""
        se_attribute = {"success_fraction": "success_se", "p_nonzero": "p_nonzero_se"}[attribute]
        for lo, hi in zip(self.rows, self.rows[1:]):
            slack = sigmas * math.hypot(getattr(lo, se_attribute), getattr(hi, se_attribute))
            if getattr(hi, attribute) < getattr(lo, attribute) - slack:
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "prime": self.prime,
            "delta": self.delta,
            "rows": [row.to_dict() for row in self.rows],
        }


@dataclass(frozen=True)
class EntropyVectorCheck:
    """Summary of the entropy-vector checks over a set of trials.

    Attributes:
        checked: Number of nonzero trials inspected.
        violations: Symmetry/submodularity violations summed over trials.
        rank_bound_violations: Subsets with ``entropy(A) > r m(A)``.
        failing_seeds: Seeds of trials with any violation, in trial order.
    """

    checked: int
    violations: int
    rank_bound_violations: int = 0
    failing_seeds: Tuple[int, ...] = ()

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.rank_bound_violations == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "checked": self.checked,
            "violations": self.violations,
            "rank_bound_violations": self.rank_bound_violations,
            "failing_seeds": list(self.failing_seeds),
        }


def verify_entropy_vector(
    trials: Sequence[TrialResult], mincuts: Optional[MinCutTable] = None
) -> EntropyVectorCheck:
    """Check every nonzero trial's entropy vector exactly.

    With ``mincuts`` given, also counts subsets breaking ``entropy(A) <= r m(A)``.

    Raises:
        InputError: If no trial is nonzero.
    """
    kept = [t for t in trials if t.nonzero]
    if not kept:
        raise InputError("no nonzero trial to verify")
    violations = 0
    rank_violations = 0
    failing: List[int] = []
    for t in kept:
        found = len(check_symmetric_submodular(t.entropy_map(), tolerance=0))
        bound = 0
        if mincuts is not None:
            assert t.entropies is not None
            bound = sum(
                1 for e, m in zip(t.entropies, mincuts.values) if e > t.bond_exponent * m
            )
        if found or bound:
            failing.append(t.seed)
        violations += found
        rank_violations += bound
    if failing:
        logger.debug(f"{len(failing)} trials with entropy-vector violations, first seed {failing[0]}")
    return EntropyVectorCheck(
        checked=len(kept),
        violations=violations,
        rank_bound_violations=rank_violations,
        failing_seeds=tuple(failing),
    )


@dataclass(frozen=True)
class ExperimentReport:
    """Everything a simulation run produces, ready for serialization."""

    config: ExperimentConfig
    mincuts: MinCutTable
    moments: Tuple[MomentReport, ...]
    concentration: ConcentrationReport
    verification: EntropyVectorCheck
    mincut_check_passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": "1.0",
            "config": self.config.to_dict(),
            "terminals": list(self.mincuts.terminals),
            "mincuts": [
                {"A": _subset_list(subset), "m": m, "kA": k}
                for subset, m, k in self.mincuts.rows()
            ],
            "mincut_symmetric_submodular": self.mincut_check_passed,
            "moments": [report.to_dict() for report in self.moments],
            "concentration": self.concentration.to_dict(),
            "verification": self.verification.to_dict(),
        }


def _simulate(
    config: ExperimentConfig, progress: Optional[ProgressCallback] = None
) -> Tuple[MinCutTable, List[Tuple[NetworkLayout, List[Fraction], List[TrialResult]]]]:
    h = config.hypergraph
    mincuts = mincut_table(h, config.max_vertices)
    hist = cut_histogram(h, config.max_vertices)
    batches = []
    for r in config.bond_exponents:
        layout, omega = build_omega(
            h, config.prime, r, max_qudits=config.max_qudits, max_terminals=config.max_terminals
        )
        start = time.time()
        trials = run_trials(
            layout, omega, trial_seeds(config.seed, r, config.trials), config.jobs, progress
        )
        zeros = sum(1 for t in trials if not t.nonzero)
        logger.debug(
            f"r={r}: {len(trials)} trials on {layout.n_qudits} qudits in "
            f"{time.time() - start:.2f}s, {zeros} zero outcomes"
        )
        exact = _exact_second_moments(h, layout.p, r, hist)
        batches.append((layout, exact, trials))
    return mincuts, batches


def estimate_moments(
    config: ExperimentConfig, progress: Optional[ProgressCallback] = None
) -> Tuple[MomentReport, ...]:
    """One MomentReport per bond exponent of ``config``."""
    mincuts, batches = _simulate(config, progress)
    return tuple(
        summarize_moments(layout, mincuts, exact, trials) for layout, exact, trials in batches
    )


def concentration_experiment(
    config: ExperimentConfig, progress: Optional[ProgressCallback] = None
) -> ConcentrationReport:
    mincuts, batches = _simulate(config, progress)
    return ConcentrationReport(
        prime=config.prime,
        delta=config.delta,
        rows=tuple(
            summarize_concentration(layout, mincuts, trials, config.delta)
            for layout, _, trials in batches
        ),
    )


def run_experiment(
    config: ExperimentConfig, progress: Optional[ProgressCallback] = None
) -> ExperimentReport:
    """Moments, concentration and entropy-vector checks from one set of trials."""
    mincuts, batches = _simulate(config, progress)
    moments = tuple(
        summarize_moments(layout, mincuts, exact, trials) for layout, exact, trials in batches
    )
    concentration = ConcentrationReport(
        prime=config.prime,
        delta=config.delta,
        rows=tuple(
            summarize_concentration(layout, mincuts, trials, config.delta)
            for layout, _, trials in batches
        ),
    )
    all_trials = [t for _, _, trials in batches for t in trials]
    if any(t.nonzero for t in all_trials):
        verification = verify_entropy_vector(all_trials, mincuts)
    else:
        verification = EntropyVectorCheck(checked=0, violations=0)
    return ExperimentReport(
        config=config,
        mincuts=mincuts,
        moments=moments,
        concentration=concentration,
        verification=verification,
        mincut_check_passed=mincuts.is_symmetric_submodular(),
    )
