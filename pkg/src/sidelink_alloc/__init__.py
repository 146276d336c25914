"""Conflict-free sidelink resource allocation by constrained bipartite matching."""

from .baselines import solve_greedy, solve_random
from .harness import (
    CdfSeries,
    MetricsSummary,
    TrialResult,
    empirical_cdf,
    run_trials,
    summarize,
    sweep_density,
)
from .instance import (
    AggregatedWeights,
    Assignment,
    InfeasibleError,
    MacroAssignment,
    ProblemInstance,
    SmoothMaxConfig,
    parse_instance,
    read_instance,
    write_instance,
)
from .kuhn_munkres import solve_assignment
from .matching import (
    OracleCapError,
    aggregate_max,
    brute_force_constrained,
    check_feasible,
    expand,
    objective,
    smooth_aggregate,
    solve_constrained,
    solve_unconstrained,
)
from .scenario import ScenarioConfig, generate_instance, rate_from_sinr

__version__ = "0.1.0"
