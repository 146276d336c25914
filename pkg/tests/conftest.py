import itertools

import numpy as np
import pytest

from sidelink_alloc import ProblemInstance

ACCEPTANCE_LOG = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LOG] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LOG, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    log = request.config.stash[ACCEPTANCE_LOG]

    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        log.append(line)
        print(line)
        return ok

    return record


@pytest.fixture
def example_instance():
    return ProblemInstance.from_rows([[5, 1, 2, 9], [3, 3, 4, 0]], num_subframes=2, slots_per_subframe=2)


def all_feasible_by_hand(weights, s, k):
    """Every (mapping, value) with distinct subframes; test-side oracle."""
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    out = []
    for mapping in itertools.product(range(s * k), repeat=n):
        subframes = [j // k for j in mapping]
        if len(set(subframes)) == n:
            out.append((mapping, float(sum(w[i, j] for i, j in enumerate(mapping)))))
    return out


def all_injective_by_hand(weights):
    w = np.asarray(weights, dtype=float)
    n, m = w.shape
    return [
        (mapping, float(sum(w[i, j] for i, j in enumerate(mapping))))
        for mapping in itertools.permutations(range(m), n)
    ]
