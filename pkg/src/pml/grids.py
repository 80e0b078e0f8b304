"""Geometric discretization grids for probabilities and frequencies.

The probability grid is the ladder ``(1+eps)^(1-i)`` extended far enough that
its smallest value is at most ``1/(2 n^2)``; distributions are floored onto it
entrywise. The frequency grid keeps every integer up to ``ceil(1/eps)`` and
then climbs by factors of ``1 + eps/2``; observed frequencies are ceiled onto
it, stretching the sample length by at most ``1 + eps``.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .profiles import Profile

__all__ = [
    "ProbabilityGrid",
    "FrequencyGrid",
    "DiscretePseudoDistribution",
    "DiscreteProfile",
    "build_probability_grid",
    "build_frequency_grid",
    "discretize_distribution",
    "discretize_profile",
]

# Relative slack when snapping floats onto grid boundaries; keeps values that
# are grid members up to roundoff classified as exactly on the grid.
_BOUNDARY_SNAP = 1e-12


@dataclass(frozen=True, eq=False)
class ProbabilityGrid:
    """Ascending ladder ``(1+eps)^(1-i)``, i = size..1, topping out at 1."""

    eps: float
    size: int

    def __post_init__(self):
        if not 0 < self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        if self.size < 1:
            raise ValueError("grid needs at least one value")
        exponents = np.arange(1 - self.size, 1, dtype=float)
        object.__setattr__(self, "values", (1.0 + self.eps) ** exponents)

    values: np.ndarray = None  # set in __post_init__

    def __len__(self) -> int:
        return self.size

    def floor_index(self, value: float) -> int:
        """Index of the largest grid value <= value; -1 when below the grid."""
        if value <= 0:
            return -1
        return int(np.searchsorted(self.values, value * (1 + _BOUNDARY_SNAP), side="right")) - 1

    def floor_value(self, value: float) -> float:
        idx = self.floor_index(value)
        return 0.0 if idx < 0 else float(self.values[idx])

    def to_dict(self) -> dict:
        return {"eps": self.eps, "exponents": list(range(1 - self.size, 1))}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Sorted integer frequencies: {1..ceil(1/eps)}, the ceil-ladder of
    (1+eps/2)^k below n, and n itself."""

    eps: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        if values.size == 0 or np.any(np.diff(values) <= 0) or values[0] < 1:
            raise ValueError("frequency grid must be strictly increasing positive ints")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def max_value(self) -> int:
        return int(self.values[-1])

    def ceil_index(self, freq: int) -> int:
        """Index of the smallest grid value >= freq."""
        if freq > self.max_value:
            raise ValueError(f"frequency {freq} above grid maximum {self.max_value}")
        if freq < 1:
            raise ValueError("frequencies are positive")
        return int(np.searchsorted(self.values, freq, side="left"))

    def ceil_value(self, freq: int) -> int:
        return int(self.values[self.ceil_index(freq)])

    def to_dict(self) -> dict:
        return {"eps": self.eps, "values": [int(v) for v in self.values]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def build_probability_grid(n: int, eps: float) -> ProbabilityGrid:
    """Smallest ladder whose bottom value is at most 1/(2 n^2)."""
    if n < 2:
        raise ValueError("probability grid needs n >= 2")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    floor_target = 1.0 / (2 * n * n)
    k = max(1, math.ceil(math.log(2 * n * n) / math.log1p(eps)))
    # Guard against float error around the boundary: k must be minimal with
    # (1+eps)^(-k) <= floor_target.
    while (1.0 + eps) ** (-k) > floor_target:
        k += 1
    while k > 1 and (1.0 + eps) ** (-(k - 1)) <= floor_target:
        k -= 1
    return ProbabilityGrid(eps=eps, size=k + 1)


def build_frequency_grid(n: int, eps: float) -> FrequencyGrid:
    """Integer run up to ceil(1/eps), geometric ceil-ladder after, and n."""
    if n < 1:
        raise ValueError("frequency grid needs n >= 1")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    values = set(range(1, min(n, math.ceil(1.0 / eps)) + 1))
    ratio = 1.0 + eps / 2.0
    k = 1
    while True:
        rung = math.ceil(ratio**k)
        if rung >= n:
            break
        values.add(rung)
        k += 1
    values.add(n)
    return FrequencyGrid(eps=eps, values=np.array(sorted(values), dtype=np.int64))


@dataclass(frozen=True, eq=False)
class DiscretePseudoDistribution:
    """Counts of elements at each probability-grid index; total mass <= 1."""

    grid: ProbabilityGrid
    level_counts: dict[int, int]
    dropped_mass: float = 0.0

    def __post_init__(self):
        counts = {int(i): int(c) for i, c in self.level_counts.items() if c}
        for idx, count in counts.items():
            if not 0 <= idx < self.grid.size:
                raise ValueError(f"grid index {idx} out of range")
            if count < 1:
                raise ValueError("counts must be positive")
        object.__setattr__(self, "level_counts", counts)

    def levels(self) -> dict[float, int]:
        """Map grid value -> element count, largest value first."""
        return {
            float(self.grid.values[i]): c
            for i, c in sorted(self.level_counts.items(), reverse=True)
        }

    def total_mass(self) -> float:
        return float(
            sum(self.grid.values[i] * c for i, c in self.level_counts.items())
        )

    def to_values(self) -> np.ndarray:
        """Dense vector with one entry per element, descending."""
        if not self.level_counts:
            return np.array([], dtype=float)
        idx = np.array(sorted(self.level_counts, reverse=True), dtype=np.int64)
        reps = np.array([self.level_counts[i] for i in idx], dtype=np.int64)
        return np.repeat(self.grid.values[idx], reps)


def discretize_distribution(probs, grid: ProbabilityGrid) -> DiscretePseudoDistribution:
    """Floor each entry onto the grid.

    Entries below the bottom grid value floor to zero; their mass is reported
    in ``dropped_mass`` rather than silently lost.
    """
    p = np.asarray(probs, dtype=float).ravel()
    if np.any(p < 0):
        raise ValueError("probabilities must be nonnegative")
    counts: Counter = Counter()
    dropped = 0.0
    for value in p:
        if value == 0.0:
            continue
        idx = grid.floor_index(float(value))
        if idx < 0:
            dropped += float(value)
        else:
            counts[idx] += 1
    return DiscretePseudoDistribution(grid=grid, level_counts=dict(counts), dropped_mass=dropped)


@dataclass(frozen=True, eq=False)
class DiscreteProfile:
    """Element counts per frequency-grid position (zero entries allowed)."""

    grid: FrequencyGrid
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.grid.values.size,):
            raise ValueError("counts must align with the frequency grid")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def n_prime(self) -> int:
        """Discretized sample length: sum of grid frequency * count."""
        return int(self.grid.values @ self.counts)

    @property
    def num_observed(self) -> int:
        return int(self.counts.sum())

    def to_profile(self) -> Profile:
        """View the nonzero entries as an ordinary profile of length n_prime."""
        pairs = [
            (int(f), int(c))
            for f, c in zip(self.grid.values, self.counts)
            if c > 0
        ]
        return Profile(tuple(pairs))


def discretize_profile(profile: Profile, grid: FrequencyGrid) -> DiscreteProfile:
    """Ceil every observed frequency onto the grid, keeping element counts."""
    counts = np.zeros(grid.values.size, dtype=np.int64)
    for freq, count in profile.pairs:
        counts[grid.ceil_index(freq)] += count
    return DiscreteProfile(grid=grid, counts=counts)
