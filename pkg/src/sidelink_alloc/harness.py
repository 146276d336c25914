"""Monte Carlo trials comparing allocators on generated cluster instances."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .baselines import solve_greedy, solve_random
from .instance import ProblemInstance
from .matching import (
    DEFAULT_ORACLE_CAP,
    OracleCapError,
    aggregate_max,
    brute_force_constrained,
    feasible_count,
    smooth_aggregate,
    solve_constrained,
    solve_unconstrained,
)
from .scenario import (
    STREAM_GREEDY_ORDER,
    STREAM_RANDOM,
    ScenarioConfig,
    generate_instance,
    stream,
)

ALGORITHMS = ("graph", "exhaustive", "greedy", "random", "unconstrained")
ALIASES = {"exhaustive-oracle": "exhaustive", "graph-based": "graph"}
DEFAULT_ALGORITHMS = ("graph", "greedy", "random", "unconstrained")
DEFAULT_CDF_GRID = np.linspace(1.0, 10.0, 30)
GREEDY_ORDERS = ("natural", "shuffled")


def normalize_algorithms(names: Sequence[str]) -> tuple[str, ...]:
    out = []
    for name in names:
        name = ALIASES.get(name.strip(), name.strip())
        if name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
        if name not in out:
            out.append(name)
    if not out:
        raise ValueError("at least one algorithm is required")
    return tuple(out)


@dataclass
class TrialResult:
    trial_index: int
    bandwidth_hz: float
    rates: dict[str, np.ndarray] = field(default_factory=dict)  # bits/s per vehicle
    values: dict[str, float] = field(default_factory=dict)
    smooth_gap: float | None = None  # max of smooth_aggregate - aggregate_max, bits/s

    def spectral_efficiency(self, algorithm: str) -> np.ndarray:
        return self.rates[algorithm] / self.bandwidth_hz


@dataclass(frozen=True)
class MetricsSummary:
    """Across-trial averages of per-trial max/min/mean/std of vehicle rates."""

    highest: float
    worst: float
    mean: float
    std: float

    def scaled(self, factor: float) -> "MetricsSummary":
        return MetricsSummary(self.highest * factor, self.worst * factor, self.mean * factor, self.std * factor)


@dataclass(frozen=True)
class CdfSeries:
    grid: np.ndarray
    cdf: np.ndarray


@dataclass(frozen=True)
class SweepRow:
    num_vehicles: int
    algorithm: str
    mean_worst_rate: float  # bits/s
    worst_per_trial: np.ndarray


def _run_algorithm(name, instance: ProblemInstance, config: ScenarioConfig, trial_index: int, greedy_order: str):
    if name == "graph":
        return solve_constrained(instance)
    if name == "exhaustive":
        return brute_force_constrained(instance, cap=np.inf)
    if name == "unconstrained":
        return solve_unconstrained(instance)
    if name == "greedy":
        order = None
        if greedy_order == "shuffled":
            order = stream(config.seed, trial_index, STREAM_GREEDY_ORDER).permutation(instance.num_vehicles)
        return solve_greedy(instance, order)
    if name == "random":
        return solve_random(instance, stream(config.seed, trial_index, STREAM_RANDOM))
    raise ValueError(f"unknown algorithm {name!r}")


def run_trial(
    config: ScenarioConfig,
    algorithms: Sequence[str],
    trial_index: int,
    greedy_order: str = "natural",
    beta: float | None = None,
) -> TrialResult:
    instance = generate_instance(config, trial_index)
    result = TrialResult(trial_index=trial_index, bandwidth_hz=config.data_bandwidth_hz)
    rows = np.arange(instance.num_vehicles)
    for name in algorithms:
        assignment, value = _run_algorithm(name, instance, config, trial_index, greedy_order)
        result.rates[name] = instance.weights[rows, assignment.as_array()]
        result.values[name] = value
    if beta is not None:
        gap = smooth_aggregate(instance, beta) - aggregate_max(instance).d
        result.smooth_gap = float(gap.max())
    return result


def _run_chunk(args):
    config, algorithms, indices, greedy_order, beta = args
    return [run_trial(config, algorithms, t, greedy_order, beta) for t in indices]


def resolve_workers(workers) -> int:
    if workers in (None, "auto"):
        return os.cpu_count() or 1
    workers = int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1 or 'auto'")
    return workers


def run_trials(
    config: ScenarioConfig,
    algorithms: Sequence[str] = DEFAULT_ALGORITHMS,
    num_trials: int = 1000,
    master_seed: int | None = None,
    *,
    workers=1,
    greedy_order: str = "natural",
    oracle_cap: int = DEFAULT_ORACLE_CAP,
    beta: float | None = None,
) -> list[TrialResult]:
    """Run ``num_trials`` independent trials; trial t always sees instance t.

    ``master_seed`` overrides ``config.seed``.  Output is identical for any
    worker count since each trial derives its own streams.
    """
    if num_trials < 1:
        raise ValueError("num_trials must be >= 1")
    algorithms = normalize_algorithms(algorithms)
    if greedy_order not in GREEDY_ORDERS:
        raise ValueError(f"greedy_order must be one of {GREEDY_ORDERS}")
    if master_seed is not None:
        config = config.replace(seed=master_seed)
    config.validate()
    if "exhaustive" in algorithms:
        count = feasible_count(config.num_vehicles, config.num_subframes, config.slots_per_subframe)
        if count > oracle_cap:
            raise OracleCapError(
                f"instance too large for oracle: {count} feasible assignments exceed cap {oracle_cap}"
            )

    workers = min(resolve_workers(workers), num_trials)
    if workers == 1:
        return _run_chunk((config, algorithms, range(num_trials), greedy_order, beta))
    chunks = [range(w, num_trials, workers) for w in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, [(config, algorithms, c, greedy_order, beta) for c in chunks]))
    results = [r for part in parts for r in part]
    results.sort(key=lambda r: r.trial_index)
    return results


def per_trial_stats(results: Sequence[TrialResult], algorithm: str) -> np.ndarray:
    """Array of shape (trials, 4): max, min, mean, population std of vehicle rates."""
    if not results:
        raise ValueError("no trial results")
    algorithm = ALIASES.get(algorithm, algorithm)
    rates = np.stack([r.rates[algorithm] for r in results])
    return np.column_stack([rates.max(axis=1), rates.min(axis=1), rates.mean(axis=1), rates.std(axis=1)])


def summarize(results: Sequence[TrialResult], algorithm: str) -> MetricsSummary:
    """Fig.-4 style summary in bits/s (``.scaled(1/B)`` for bits/s/Hz)."""
    stats = per_trial_stats(results, algorithm).mean(axis=0)
    return MetricsSummary(*(float(x) for x in stats))


def sweep_density(
    config: ScenarioConfig,
    vehicle_counts: Sequence[int],
    num_trials: int,
    master_seed: int | None = None,
    algorithms: Sequence[str] = DEFAULT_ALGORITHMS,
    **kwargs,
) -> list[SweepRow]:
    """Mean worst-vehicle rate per (vehicle count, algorithm)."""
    algorithms = normalize_algorithms(algorithms)
    for n in vehicle_counts:
        if not 1 <= n <= config.num_subframes:
            raise ValueError(f"vehicle count {n} outside [1, {config.num_subframes}]")
    rows = []
    for n in vehicle_counts:
        results = run_trials(config.replace(num_vehicles=n), algorithms, num_trials, master_seed, **kwargs)
        for name in algorithms:
            worst = per_trial_stats(results, name)[:, 1]
            rows.append(SweepRow(n, name, float(worst.mean()), worst))
    return rows


def empirical_cdf(results: Sequence[TrialResult], algorithm: str, grid=None) -> CdfSeries:
    """Fraction of pooled per-vehicle spectral efficiencies at or below each grid point."""
    grid = DEFAULT_CDF_GRID if grid is None else np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    algorithm = ALIASES.get(algorithm, algorithm)
    if not results:
        raise ValueError("no samples to pool")
    pool = np.sort(np.concatenate([r.spectral_efficiency(algorithm) for r in results]))
    if pool.size == 0:
        raise ValueError("no samples to pool")
    counts = np.searchsorted(pool, grid, side="right")
    return CdfSeries(grid=grid.copy(), cdf=counts / pool.size)


def bootstrap_mean_ci(samples, level: float = 0.95, num_resamples: int = 2000, seed: int = 0):
    """Percentile bootstrap interval for the mean of ``samples``."""
    samples = np.asarray(samples, dtype=np.float64)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, samples.size, size=(num_resamples, samples.size))
    means = samples[idx].mean(axis=1)
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(means, [tail, 1.0 - tail])
    return float(lo), float(hi)
