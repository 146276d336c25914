"""Command-line entry point.

Exit codes: 0 success, 1 self-test failure, 2 config/parse error,
3 infeasible instance, 4 oracle cap exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import harness
from .instance import InfeasibleError, InstanceFormatError, read_instance
from .matching import DEFAULT_ORACLE_CAP, OracleCapError, brute_force_constrained, check_feasible, solve_constrained
from .scenario import ScenarioConfig
from .selftest import print_report, run_selftest

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_ORACLE_CAP = 0, 1, 2, 3, 4
DEFAULT_VEHICLE_COUNTS = tuple(range(10, 101, 10))
QUICK_TRIALS = 50


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    trials: int = 1000
    algorithms: tuple[str, ...] = harness.DEFAULT_ALGORITHMS
    out_dir: str = "results"
    workers: int | str = 1
    beta: float | None = None
    oracle_cap: int = DEFAULT_ORACLE_CAP
    greedy_order: str = "natural"
    vehicle_counts: tuple[int, ...] = DEFAULT_VEHICLE_COUNTS

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        self.algorithms = harness.normalize_algorithms(self.algorithms)
        harness.resolve_workers(self.workers)
        if self.beta is not None and not (np.isfinite(self.beta) and self.beta > 0):
            raise ConfigError("beta must be positive and finite")
        if self.greedy_order not in harness.GREEDY_ORDERS:
            raise ConfigError(f"greedy_order must be one of {harness.GREEDY_ORDERS}")
        if self.oracle_cap < 1:
            raise ConfigError("oracle_cap must be >= 1")


RUN_KEYS = {f.name for f in fields(RunConfig)} - {"scenario"}


def load_config(path: str | Path | None) -> RunConfig:
    """Read a TOML file with optional ``[scenario]`` and ``[run]`` tables."""
    if path is None:
        return RunConfig()
    try:
        data = tomllib.loads(Path(path).read_text())
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    unknown = set(data) - {"scenario", "run"}
    if unknown:
        raise ConfigError(f"unknown config section(s): {', '.join(sorted(unknown))}")
    scenario = dict(data.get("scenario", {}))
    run = dict(data.get("run", {}))
    for section, allowed, given in (("scenario", ScenarioConfig.field_names(), scenario), ("run", RUN_KEYS, run)):
        bad = set(given) - allowed
        if bad:
            raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(bad))}")
    try:
        cfg = RunConfig(scenario=ScenarioConfig(**scenario), **run)
        for name in ("algorithms", "vehicle_counts"):
            setattr(cfg, name, tuple(getattr(cfg, name)))
        cfg.validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def apply_flags(cfg: RunConfig, args) -> RunConfig:
    overrides = {
        "seed": args.seed,
        "num_vehicles": args.vehicles,
        "num_subframes": args.subframes,
        "slots_per_subframe": args.slots,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    try:
        if overrides:
            cfg.scenario = cfg.scenario.replace(**overrides)
        if args.trials is not None:
            cfg.trials = args.trials
        if getattr(args, "quick", False):
            cfg.trials = min(cfg.trials, QUICK_TRIALS)
        if args.algorithms is not None:
            cfg.algorithms = tuple(a for a in args.algorithms.split(",") if a.strip())
        if args.out_dir is not None:
            cfg.out_dir = args.out_dir
        if args.workers is not None:
            cfg.workers = args.workers
        if args.beta is not None:
            cfg.beta = args.beta
        if getattr(args, "vehicle_counts", None) is not None:
            cfg.vehicle_counts = tuple(int(x) for x in args.vehicle_counts.split(","))
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def fmt(x: float) -> str:
    return f"{x:.6g}"


def write_csv(path: Path, header: str, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [header] + [",".join(row) for row in rows]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _trials(cfg: RunConfig, scenario: ScenarioConfig | None = None):
    return harness.run_trials(
        scenario or cfg.scenario,
        cfg.algorithms,
        cfg.trials,
        workers=cfg.workers,
        greedy_order=cfg.greedy_order,
        oracle_cap=cfg.oracle_cap,
        beta=cfg.beta,
    )


def fig4_rows(results, algorithms, bandwidth_hz: float):
    rows = []
    for name in algorithms:
        summary = harness.summarize(results, name)
        for unit, factor in (("Mbit/s", 1e-6), ("bit/s/Hz", 1.0 / bandwidth_hz)):
            s = summary.scaled(factor)
            rows.append([name, fmt(s.highest), fmt(s.worst), fmt(s.mean), fmt(s.std), unit])
    return rows


def cmd_simulate(cfg: RunConfig) -> Path:
    results = _trials(cfg)
    out = Path(cfg.out_dir) / "fig4.csv"
    write_csv(out, "algorithm,highest,worst,mean,std,unit", fig4_rows(results, cfg.algorithms, cfg.scenario.data_bandwidth_hz))
    if cfg.beta is not None:
        bound = math.log(cfg.scenario.slots_per_subframe) / cfg.beta
        write_csv(
            Path(cfg.out_dir) / "smooth_audit.csv",
            "trial,max_gap_bits_s,bound_bits_s,within_bound",
            [[str(r.trial_index), fmt(r.smooth_gap), fmt(bound), str(int(0 <= r.smooth_gap <= bound))] for r in results],
        )
    return out


def cmd_sweep(cfg: RunConfig) -> Path:
    for n in cfg.vehicle_counts:
        if not 1 <= n <= cfg.scenario.num_subframes:
            raise ConfigError(f"vehicle count {n} outside [1, {cfg.scenario.num_subframes}]")
    rows = []
    for n in cfg.vehicle_counts:
        results = _trials(cfg, cfg.scenario.replace(num_vehicles=n))
        for name in cfg.algorithms:
            worst = harness.summarize(results, name).worst
            rows.append([str(n), name, fmt(worst * 1e-6)])
    out = Path(cfg.out_dir) / "fig5.csv"
    write_csv(out, "num_vehicles,algorithm,mean_worst_rate", rows)
    return out


def cmd_cdf(cfg: RunConfig) -> Path:
    results = _trials(cfg)
    rows = []
    for name in cfg.algorithms:
        series = harness.empirical_cdf(results, name)
        rows.extend([fmt(g), name, fmt(c)] for g, c in zip(series.grid, series.cdf))
    out = Path(cfg.out_dir) / "fig6.csv"
    write_csv(out, "rate_bits_s_hz,algorithm,cdf", rows)
    return out


def cmd_solve(path: str, oracle: bool, oracle_cap: int, out=None) -> int:
    out = out or sys.stdout
    instance = read_instance(path)
    assignment, value = solve_constrained(instance)
    violations = check_feasible(instance, assignment)
    rates = instance.weights[np.arange(instance.num_vehicles), assignment.as_array()]
    print(f"vehicles: {instance.num_vehicles}", file=out)
    print(f"subframes: {instance.num_subframes}", file=out)
    print(f"slots_per_subframe: {instance.slots_per_subframe}", file=out)
    print("mapping: " + " ".join(f"{i}->{j}" for i, j in enumerate(assignment.mapping)), file=out)
    print("rates: " + " ".join(fmt(r) for r in rates), file=out)
    print(f"value: {fmt(value)}", file=out)
    print("feasible: " + ("yes" if not violations else "no (" + "; ".join(v.kind for v in violations) + ")"), file=out)
    if oracle:
        _, best = brute_force_constrained(instance, cap=oracle_cap)
        print(f"oracle_value: {fmt(best)}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sidelink-alloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one instance file")
    solve.add_argument("instance", help="matrix file: 'N S K' header then N rows of S*K weights")
    solve.add_argument("--oracle", action="store_true", help="cross-check with exhaustive search")
    solve.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP)

    for name, help_text in (
        ("simulate", "Fig. 4 style rate statistics -> fig4.csv"),
        ("sweep", "worst-vehicle rate vs. vehicle count -> fig5.csv"),
        ("cdf", "pooled rate CDF -> fig6.csv"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="TOML file with [scenario] and [run] tables")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--vehicles", type=int)
        p.add_argument("--subframes", type=int)
        p.add_argument("--slots", type=int)
        p.add_argument("--algorithms", help="comma-separated subset of " + ",".join(harness.ALGORITHMS))
        p.add_argument("--out-dir")
        p.add_argument("--workers", help="worker processes or 'auto'")
        p.add_argument("--beta", type=float, help="also audit the smooth-max aggregation at this beta")
        p.add_argument("--quick", action="store_true", help=f"cap trials at {QUICK_TRIALS}")
        if name == "sweep":
            p.add_argument("--vehicle-counts", help="comma-separated, default 10,20,...,100")

    st = sub.add_parser("selftest", help="run the matching property suites")
    st.add_argument("--quick", action="store_true", help="100 instances instead of 1000")
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--inject-fault", action="store_true", help="corrupt one solver weight to exercise failure reporting")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(args.instance, args.oracle, args.oracle_cap)
        if args.command == "selftest":
            start = time.perf_counter()
            report = run_selftest(100 if args.quick else 1000, seed=args.seed, inject_fault=args.inject_fault)
            print_report(report)
            print(f"elapsed: {time.perf_counter() - start:.2f} s")
            return EXIT_OK if report.ok else EXIT_SELFTEST
        cfg = apply_flags(load_config(args.config), args)
        command = {"simulate": cmd_simulate, "sweep": cmd_sweep, "cdf": cmd_cdf}[args.command]
        print(command(cfg))
        return EXIT_OK
    except (ConfigError, InstanceFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INFEASIBLE
    except OracleCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE_CAP


if __name__ == "__main__":
    sys.exit(main())
