"""Property suites for the matching core, runnable without pytest."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .baselines import solve_greedy, solve_random
from .instance import TOL, MacroAssignment, ProblemInstance, format_instance
from .kuhn_munkres import solve_assignment
from .matching import (
    aggregate_max,
    brute_force_constrained,
    check_feasible,
    expand,
    objective,
    smooth_aggregate,
    solve_constrained,
    solve_unconstrained,
)

BETAS = (1.0, 10.0, 100.0, 1e4)


def random_small_instance(rng: np.random.Generator, max_n: int = 6, max_s: int = 6, max_k: int = 3) -> ProblemInstance:
    n = int(rng.integers(1, max_n + 1))
    s = int(rng.integers(n, max_s + 1))
    k = int(rng.integers(1, max_k + 1))
    return ProblemInstance(rng.uniform(0.0, 10.0, size=(n, s * k)), s, k)


def _faulty_solve(instance: ProblemInstance):
    # the solver sees w[0, 0] negated while the oracle sees the real matrix
    agg = aggregate_max(instance)
    d = agg.d.copy()
    d[0, 0] = -instance.weights[0, : instance.slots_per_subframe].max()
    alpha, value = solve_assignment(d)
    return expand(MacroAssignment(tuple(alpha)), agg), value


@dataclass
class SuiteReport:
    name: str
    total: int = 0
    passed: int = 0
    failure: str | None = None

    def record(self, ok: bool, dump) -> None:
        self.total += 1
        if ok:
            self.passed += 1
        elif self.failure is None:
            self.failure = dump()

    @property
    def ok(self) -> bool:
        return self.passed == self.total


@dataclass
class SelfTestReport:
    suites: list[SuiteReport] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.suites)


def run_selftest(num_instances: int = 1000, seed: int = 0, inject_fault: bool = False) -> SelfTestReport:
    rng = np.random.default_rng(seed)
    solve = _faulty_solve if inject_fault else solve_constrained
    oracle = SuiteReport("oracle equivalence")
    feasible = SuiteReport("feasibility")
    dominance = SuiteReport("dominance chain")
    expansion = SuiteReport("expansion consistency")
    bound = SuiteReport("smooth-max bound")

    for _ in range(num_instances):
        inst = random_small_instance(rng)
        dump = lambda inst=inst: format_instance(inst)
        assignment, value = solve(inst)
        _, best = brute_force_constrained(inst)
        oracle.record(abs(value - best) <= TOL, lambda v=value, b=best, d=dump: f"solver {v!r} != oracle {b!r}\n{d()}")

        greedy = solve_greedy(inst)
        rand = solve_random(inst, rng)
        outputs = (assignment, greedy[0], rand[0])
        feasible.record(all(not check_feasible(inst, a) for a in outputs), dump)

        _, unconstrained = solve_unconstrained(inst)
        dominance.record(
            unconstrained >= value - TOL and value >= greedy[1] - TOL and value >= rand[1] - TOL,
            lambda v=value, u=unconstrained, g=greedy[1], r=rand[1], d=dump: (
                f"unconstrained {u!r}, graph {v!r}, greedy {g!r}, random {r!r}\n{d()}"
            ),
        )

        agg = aggregate_max(inst)
        y = rng.permutation(inst.num_subframes)[: inst.num_vehicles]
        expected = float(agg.d[np.arange(inst.num_vehicles), y].sum())
        got = objective(inst, expand(MacroAssignment(tuple(y)), agg))
        expansion.record(abs(got - expected) <= TOL, dump)

        for beta in BETAS:
            gap = smooth_aggregate(inst, beta) - agg.d
            limit = math.log(inst.slots_per_subframe) / beta
            bound.record(
                bool(np.all(gap >= 0) and np.all(gap <= limit)),
                lambda b=beta, d=dump: f"beta={b}\n{d()}",
            )

    return SelfTestReport([oracle, feasible, dominance, expansion, bound])


def print_report(report: SelfTestReport, out=None) -> None:
    out = out or sys.stdout
    for suite in report.suites:
        print(f"{suite.name}: {suite.passed}/{suite.total}", file=out)
    for suite in report.suites:
        if suite.failure is not None:
            print(f"FAILED {suite.name}; counterexample:", file=out)
            print(suite.failure.rstrip(), file=out)
