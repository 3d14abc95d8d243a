"""Exception types shared across the package."""

from __future__ import annotations


class InputFormatError(ValueError):
    """A graph or rates file could not be parsed."""


class GraphStructureError(ValueError):
    """The graph shape rules out the requested analysis (bipartite, disconnected, ...)."""


class StabilityError(ValueError):
    """A recursion denominator is non-positive: the instance is not stable.

    ``violating_set`` holds the offending class set as a tuple of 0-based
    class indices.
    """

    def __init__(self, message: str, violating_set: tuple[int, ...] | None = None):
        super().__init__(message)
        self.violating_set = violating_set


class DegenerateRatesError(ValueError):
    """All classes in a required neighborhood have zero arrival rate."""


class ResourceCapError(RuntimeError):
    """An enumeration exceeded its configured cap."""
