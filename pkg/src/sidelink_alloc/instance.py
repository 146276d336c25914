"""Data model for the subframe-constrained vehicle/resource matching problem.

Resources are laid out subframe-major: resource ``j`` lives in subframe
``j // K`` at slot ``j % K``.  Every subframe is a macro-vertex that may host
at most one vehicle.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

TOL = 1e-9


class InfeasibleError(ValueError):
    """The instance admits no conflict-free assignment."""


class InstanceFormatError(ValueError):
    """A matrix file could not be parsed."""


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    weights: np.ndarray
    num_subframes: int
    slots_per_subframe: int

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] < 1:
            raise ValueError("weights must be a non-empty 2-D matrix")
        if self.num_subframes < 1 or self.slots_per_subframe < 1:
            raise ValueError("num_subframes and slots_per_subframe must be >= 1")
        if w.shape[1] != self.num_subframes * self.slots_per_subframe:
            raise ValueError(
                f"weights has {w.shape[1]} columns, expected "
                f"{self.num_subframes} * {self.slots_per_subframe}"
            )
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_rows(cls, rows, num_subframes: int, slots_per_subframe: int) -> "ProblemInstance":
        return cls(np.asarray(rows, dtype=np.float64), num_subframes, slots_per_subframe)

    @property
    def num_vehicles(self) -> int:
        return self.weights.shape[0]

    @property
    def num_resources(self) -> int:
        return self.weights.shape[1]

    def subframe_of(self, resource):
        return np.asarray(resource) // self.slots_per_subframe

    def blocks(self) -> np.ndarray:
        """Weights viewed as (vehicles, subframes, slots)."""
        return self.weights.reshape(self.num_vehicles, self.num_subframes, self.slots_per_subframe)

    def scaled(self, factor: float) -> "ProblemInstance":
        return ProblemInstance(self.weights * factor, self.num_subframes, self.slots_per_subframe)


@dataclass(frozen=True)
class Assignment:
    """Resource index chosen for each vehicle (the one-hot ``x`` in compact form)."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(int(j) for j in self.mapping))

    def __len__(self):
        return len(self.mapping)

    def __getitem__(self, i):
        return self.mapping[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.mapping, dtype=np.int64)


@dataclass(frozen=True)
class MacroAssignment:
    """Subframe index chosen for each vehicle."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(a) for a in self.mapping)
        if len(set(mapping)) != len(mapping):
            raise ValueError("macro assignment entries must be distinct")
        object.__setattr__(self, "mapping", mapping)

    def __len__(self):
        return len(self.mapping)


@dataclass(frozen=True, eq=False)
class AggregatedWeights:
    """Per-subframe best weight ``d`` and the slot that attains it."""

    d: np.ndarray
    argmax_slot: np.ndarray
    slots_per_subframe: int

    @property
    def num_vehicles(self) -> int:
        return self.d.shape[0]

    @property
    def num_subframes(self) -> int:
        return self.d.shape[1]


@dataclass(frozen=True)
class SmoothMaxConfig:
    beta: float

    def __post_init__(self):
        if not np.isfinite(self.beta) or self.beta <= 0:
            raise ValueError(f"beta must be positive and finite, got {self.beta!r}")


class Violation(NamedTuple):
    kind: str  # "wrong length" | "out-of-range index" | "duplicate resource" | "subframe conflict"
    detail: str


def format_instance(instance: ProblemInstance) -> str:
    lines = [f"{instance.num_vehicles} {instance.num_subframes} {instance.slots_per_subframe}"]
    for row in instance.weights:
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> ProblemInstance:
    """Parse the ``N S K`` header followed by N rows of S*K weights.

    Blank lines and ``#`` comments are ignored.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InstanceFormatError("empty instance file")
    header = lines[0].split()
    if len(header) != 3:
        raise InstanceFormatError(f"header must be 'N S K', got {lines[0]!r}")
    try:
        n, s, k = (int(tok) for tok in header)
    except ValueError as exc:
        raise InstanceFormatError(f"non-integer header {lines[0]!r}") from exc
    if min(n, s, k) < 1:
        raise InstanceFormatError("N, S and K must be >= 1")
    rows = lines[1:]
    if len(rows) != n:
        raise InstanceFormatError(f"expected {n} weight rows, found {len(rows)}")
    parsed = []
    for idx, row in enumerate(rows):
        try:
            values = [float(tok) for tok in row.split()]
        except ValueError as exc:
            raise InstanceFormatError(f"row {idx}: {exc}") from exc
        if len(values) != s * k:
            raise InstanceFormatError(f"row {idx} has {len(values)} values, expected {s * k}")
        parsed.append(values)
    try:
        return ProblemInstance(np.array(parsed, dtype=np.float64), s, k)
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc


def read_instance(path: str | Path) -> ProblemInstance:
    return parse_instance(Path(path).read_text())


def write_instance(instance: ProblemInstance, path: str | Path) -> None:
    Path(path).write_text(format_instance(instance))


def as_assignment(mapping: Sequence[int] | Assignment) -> Assignment:
    return mapping if isinstance(mapping, Assignment) else Assignment(tuple(mapping))
