"""Subframe-constrained matching via macro-vertex aggregation.

Each subframe's K slots collapse into one macro-vertex whose weight for a
vehicle is that vehicle's best slot in the subframe.  An ordinary assignment
of vehicles to macro-vertices then solves the constrained problem, and the
winning slot is recovered per vehicle afterwards.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .instance import (
    TOL,
    AggregatedWeights,
    Assignment,
    InfeasibleError,
    MacroAssignment,
    ProblemInstance,
    SmoothMaxConfig,
    Violation,
    as_assignment,
)
from .kuhn_munkres import solve_assignment

DEFAULT_ORACLE_CAP = 10**7


class OracleCapError(RuntimeError):
    """Exhaustive enumeration was requested on an instance that is too large."""


def aggregate_max(instance: ProblemInstance) -> AggregatedWeights:
    blocks = instance.blocks()
    # argmax returns the first maximum, so ties go to the lowest slot
    slot = blocks.argmax(axis=2)
    d = np.take_along_axis(blocks, slot[..., None], axis=2)[..., 0]
    return AggregatedWeights(d=d, argmax_slot=slot, slots_per_subframe=instance.slots_per_subframe)


def smooth_aggregate(instance: ProblemInstance, config: SmoothMaxConfig | float) -> np.ndarray:
    """Log-sum-exp over each subframe's slots, sharpened by ``beta``.

    ``(1/beta) * log(sum_k exp(beta * w_k))`` per (vehicle, subframe).  Tends
    to :func:`aggregate_max` as beta grows, from above, by at most
    ``log(K)/beta``.
    """
    if not isinstance(config, SmoothMaxConfig):
        config = SmoothMaxConfig(float(config))
    beta = config.beta
    blocks = instance.blocks()
    peak = blocks.max(axis=2)
    bound = math.log(instance.slots_per_subframe) / beta
    # exponents are <= 0 after the shift, so exp never overflows
    scaled = beta * (blocks - peak[..., None])
    excess = np.log(np.exp(scaled).sum(axis=2)) / beta
    # the exact excess lies in [0, log K / beta]; undo rounding past the upper end
    out = peak + np.clip(excess, 0.0, bound)
    over = (out - peak) > bound
    out[over] = np.nextafter(out[over], -np.inf)
    return out


def expand(macro: MacroAssignment, agg: AggregatedWeights) -> Assignment:
    """Map a vehicle-to-subframe matching back to concrete resources."""
    alpha = np.asarray(macro.mapping, dtype=np.int64)
    n, s = agg.d.shape
    if alpha.shape != (n,):
        raise ValueError(f"macro assignment has {alpha.size} entries for {n} vehicles")
    if np.any(alpha < 0) or np.any(alpha >= s):
        raise ValueError(f"subframe index out of range [0, {s})")
    slots = agg.argmax_slot[np.arange(n), alpha]
    return Assignment(tuple(alpha * agg.slots_per_subframe + slots))


def check_feasible(instance: ProblemInstance, assignment) -> list[Violation]:
    """Structural check of the one-vehicle-per-subframe constraints.

    Returns an empty list when the assignment is feasible.
    """
    mapping = list(as_assignment(assignment).mapping)
    violations = []
    if len(mapping) != instance.num_vehicles:
        violations.append(
            Violation("wrong length", f"{len(mapping)} entries for {instance.num_vehicles} vehicles")
        )
    in_range = []
    for i, j in enumerate(mapping):
        if 0 <= j < instance.num_resources:
            in_range.append((i, j))
        else:
            violations.append(Violation("out-of-range index", f"vehicle {i} -> resource {j}"))

    seen_resource: dict[int, int] = {}
    seen_subframe: dict[int, int] = {}
    for i, j in in_range:
        if j in seen_resource:
            violations.append(
                Violation("duplicate resource", f"vehicles {seen_resource[j]} and {i} -> resource {j}")
            )
        else:
            seen_resource[j] = i
        alpha = j // instance.slots_per_subframe
        if alpha in seen_subframe:
            violations.append(
                Violation("subframe conflict", f"vehicles {seen_subframe[alpha]} and {i} share subframe {alpha}")
            )
        else:
            seen_subframe[alpha] = i
    return violations


def objective(instance: ProblemInstance, assignment) -> float:
    assignment = as_assignment(assignment)
    violations = check_feasible(instance, assignment)
    if violations:
        raise InfeasibleError("; ".join(f"{v.kind}: {v.detail}" for v in violations))
    idx = assignment.as_array()
    return float(instance.weights[np.arange(instance.num_vehicles), idx].sum())


def solve_constrained(instance: ProblemInstance) -> tuple[Assignment, float]:
    """Maximum-weight assignment with at most one vehicle per subframe."""
    if instance.num_vehicles > instance.num_subframes:
        raise InfeasibleError("infeasible: more vehicles than subframes")
    agg = aggregate_max(instance)
    alpha, value = solve_assignment(agg.d, maximize=True)
    assignment = expand(MacroAssignment(tuple(alpha)), agg)
    return assignment, value


def solve_unconstrained(instance: ProblemInstance) -> tuple[Assignment, float]:
    """Best one-resource-per-vehicle matching, ignoring subframe conflicts."""
    if instance.num_vehicles > instance.num_resources:
        raise InfeasibleError("infeasible: more vehicles than resources")
    cols, value = solve_assignment(instance.weights, maximize=True)
    return Assignment(tuple(cols)), value


def feasible_count(num_vehicles: int, num_subframes: int, slots_per_subframe: int) -> int:
    if num_vehicles > num_subframes:
        return 0
    return math.perm(num_subframes, num_vehicles) * slots_per_subframe**num_vehicles


def enumerate_feasible(instance: ProblemInstance):
    """Yield every conflict-free assignment in lexicographic order of mapping."""
    n, s, k = instance.num_vehicles, instance.num_subframes, instance.slots_per_subframe

    def extend(prefix, used):
        if len(prefix) == n:
            yield Assignment(tuple(prefix))
            return
        for j in range(s * k):
            if j // k not in used:
                yield from extend(prefix + [j], used | {j // k})

    yield from extend([], frozenset())


def brute_force_constrained(
    instance: ProblemInstance, cap: int = DEFAULT_ORACLE_CAP
) -> tuple[Assignment, float]:
    """Exhaustive search over all conflict-free assignments.

    Makes no use of per-subframe maxima: for every ordered choice of
    subframes it scores every combination of slots.  Among optima (within
    1e-9) the lexicographically smallest mapping is returned.
    """
    n, s, k = instance.num_vehicles, instance.num_subframes, instance.slots_per_subframe
    if n > s:
        raise InfeasibleError("infeasible: more vehicles than subframes")
    total = feasible_count(n, s, k)
    if total > cap:
        raise OracleCapError(
            f"instance too large for oracle: {total} feasible assignments exceed cap {cap}"
        )
    w = instance.weights
    rows = np.arange(n)
    slot_grid = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int64).reshape(-1, n)

    perms = np.array(list(itertools.permutations(range(s), n)), dtype=np.int64).reshape(-1, n)
    per_perm_best = np.empty(len(perms))
    for p, subframes in enumerate(perms):
        cols = subframes * k + slot_grid
        per_perm_best[p] = w[rows, cols].sum(axis=1).max()
    best = per_perm_best.max()

    winner = None
    for p in np.nonzero(per_perm_best >= best - TOL)[0]:
        cols = perms[p] * k + slot_grid
        totals = w[rows, cols].sum(axis=1)
        for c in np.nonzero(totals >= best - TOL)[0]:
            candidate = tuple(int(j) for j in cols[c])
            if winner is None or candidate < winner:
                winner = candidate
    assignment = Assignment(winner)
    return assignment, float(w[rows, assignment.as_array()].sum())
