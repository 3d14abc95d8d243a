"""Per-class arrival rates, normalized to sum 1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .graphs import iter_classes


@dataclass(frozen=True)
class RateVector:
    """Nonnegative per-class arrival rates with total exactly 1.

    Multiplying all rates by a positive constant only rescales time, so any
    positive total is accepted and normalized. Zero entries are allowed
    (a class that never arrives); at least one entry must be positive.
    """

    alpha: tuple[float, ...]

    def __post_init__(self):
        if any(a < 0 for a in self.alpha):
            raise ValueError("arrival rates must be nonnegative")
        if not any(a > 0 for a in self.alpha):
            raise ValueError("at least one arrival rate must be positive")

    @classmethod
    def normalized(cls, values: Iterable[float]) -> "RateVector":
        raw = [float(v) for v in values]
        if any(v < 0 for v in raw):
            raise ValueError("arrival rates must be nonnegative")
        total = math.fsum(raw)
        if not total > 0:
            raise ValueError("at least one arrival rate must be positive")
        scaled = [v / total for v in raw]
        # Nudge the largest entry so the exactly-rounded sum is 1.0: the
        # normalized vector must carry no drift into downstream identities.
        top = max(range(len(scaled)), key=scaled.__getitem__)
        for _ in range(4):
            drift = math.fsum(scaled) - 1.0
            if drift == 0.0:
                break
            scaled[top] -= drift
        return cls(tuple(scaled))

    @property
    def n(self) -> int:
        return len(self.alpha)

    def __getitem__(self, i: int) -> float:
        return self.alpha[i]

    def __iter__(self):
        return iter(self.alpha)

    def of_set(self, mask: int) -> float:
        """Total rate of the classes in a bitmask."""
        return sum(self.alpha[i] for i in iter_classes(mask))

    def scaled_by(self, factors: Iterable[float]) -> tuple[float, ...]:
        """Elementwise product with another vector (not renormalized)."""
        out = tuple(a * f for a, f in zip(self.alpha, factors, strict=True))
        return out
