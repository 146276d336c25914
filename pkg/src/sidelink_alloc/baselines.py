"""Reference allocators that respect the subframe constraint without optimizing."""

from __future__ import annotations

import numpy as np

from .instance import Assignment, InfeasibleError, ProblemInstance


def solve_greedy(instance: ProblemInstance, order=None) -> tuple[Assignment, float]:
    """First-come first-served allocation.

    Vehicles are served in ``order`` (default: index order).  Each takes its
    best resource among subframes nobody has claimed yet, lowest index on
    ties, and its subframe is then closed to everyone else.
    """
    n, s, k = instance.num_vehicles, instance.num_subframes, instance.slots_per_subframe
    if n > s:
        raise InfeasibleError("infeasible: more vehicles than subframes")
    order = np.arange(n) if order is None else np.asarray(order, dtype=np.int64)
    if sorted(order.tolist()) != list(range(n)):
        raise ValueError("order must be a permutation of the vehicle indices")

    open_cols = np.ones(s * k, dtype=bool)
    mapping = np.empty(n, dtype=np.int64)
    for i in order:
        row = np.where(open_cols, instance.weights[i], -np.inf)
        j = int(np.argmax(row))
        mapping[i] = j
        alpha = j // k
        open_cols[alpha * k:(alpha + 1) * k] = False
    value = float(instance.weights[np.arange(n), mapping].sum())
    return Assignment(tuple(mapping)), value


def solve_random(instance: ProblemInstance, rng: np.random.Generator) -> tuple[Assignment, float]:
    """Uniform draw from the feasible assignments.

    An ordered sample of distinct subframes followed by an independent
    uniform slot per vehicle; each of the S!/(S-N)! * K^N feasible
    assignments is equally likely.
    """
    n, s, k = instance.num_vehicles, instance.num_subframes, instance.slots_per_subframe
    if n > s:
        raise InfeasibleError("infeasible: more vehicles than subframes")
    subframes = rng.permutation(s)[:n]
    slots = rng.integers(0, k, size=n)
    mapping = subframes * k + slots
    value = float(instance.weights[np.arange(n), mapping].sum())
    return Assignment(tuple(mapping)), value
