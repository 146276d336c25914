"""Kuhn-Munkres (Hungarian) solver for rectangular maximum-weight assignment.

Shortest-augmenting-path formulation with row/column potentials.  Rows are
inserted one at a time; each insertion runs a Dijkstra-like search over the
reduced costs, vectorized across columns.  For R rows and C columns the cost
is O(R^2 C), which for R <= C is the O(n^3) bound of the square algorithm.
"""

from __future__ import annotations

import numpy as np


def _min_cost_rows(cost: np.ndarray) -> np.ndarray:
    n, m = cost.shape
    # index 0 is a sentinel column/row; real rows and columns are 1-based
    u = np.zeros(n + 1)
    u[1:] = cost.min(axis=1)
    v = np.zeros(m + 1)
    owner = np.zeros(m + 1, dtype=np.int64)
    way = np.zeros(m + 1, dtype=np.int64)

    # row reduction leaves a zero in every row; match greedily along those
    # tight edges so that only the leftover rows need an augmenting search
    unmatched = []
    taken = np.zeros(m, dtype=bool)
    for i in range(1, n + 1):
        tight = np.flatnonzero((cost[i - 1] == u[i]) & ~taken)
        if tight.size:
            taken[tight[0]] = True
            owner[tight[0] + 1] = i
        else:
            unmatched.append(i)

    for i in unmatched:
        owner[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = owner[j0]
            reduced = cost[i0 - 1] - u[i0] - v[1:]
            free = ~used[1:]
            better = free & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0
            candidates = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]
            u[owner[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1

    cols = np.empty(n, dtype=np.int64)
    matched = np.nonzero(owner[1:])[0]
    cols[owner[1:][matched] - 1] = matched
    return cols


def solve_assignment(weights, maximize: bool = True) -> tuple[np.ndarray, float]:
    """Optimal injective row-to-column assignment.

    Parameters
    ----------
    weights : array_like, shape (R, C)
        Finite weights with ``R <= C``.
    maximize : bool
        Maximize the total (default) or minimize it.

    Returns
    -------
    cols : ndarray of int, shape (R,)
        ``cols[r]`` is the column matched to row ``r``.
    value : float
        Sum of the selected entries.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 2:
        raise ValueError("weights must be a 2-D matrix")
    rows, ncols = w.shape
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if rows > ncols:
        raise ValueError(f"infeasible: {rows} rows cannot be matched into {ncols} columns")
    if rows == 0:
        return np.empty(0, dtype=np.int64), 0.0
    # shifting by a constant keeps costs non-negative without changing the argmin
    cost = (w.max() - w) if maximize else (w - w.min())
    cols = _min_cost_rows(cost)
    return cols, float(w[np.arange(rows), cols].sum())
