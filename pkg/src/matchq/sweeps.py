"""Load sweeps: parametric rate rules evaluated over a grid of loads.

Three parametric rules tie a single load knob ``rho`` to a full rate
vector (all are normalized by construction):

* ``cycle``: odd cycle with N = 2K+1 classes; class 1 gets
  ``(rho/K)/(1 + rho/K)`` and every other class ``(1/(2K))/(1 + rho/K)``,
  making rho exactly the load of class 1.
* ``racket``: class 1 gets ``(rho/(N-1))/(1 + rho/(N-1))`` and every other
  class ``(1/(N-1))/(1 + rho/(N-1))``; again rho is the load of class 1
  when class 1 has a single neighbor.
* ``heavy-traffic``: the saturation scaling of ``heavy_traffic`` with
  uniform mass splits, rho being the load of the saturated set.

``explicit`` evaluates one fixed rate vector (a single row; the grid does
not apply).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import analytics, heavy_traffic
from .errors import StabilityError
from .fileio import SweepRow
from .graphs import CompatibilityGraph, enumerate_independent_sets
from .rates import RateVector

RULES = ("explicit", "cycle", "racket", "heavy-traffic")


def default_grid() -> tuple[float, ...]:
    """99 loads, 0.01 to 0.99 in steps of 0.01."""
    return tuple(round(0.01 * k, 2) for k in range(1, 100))


def cycle_rule_rates(n: int, rho: float) -> RateVector:
    if n < 3 or n % 2 == 0:
        raise ValueError(f"cycle rule needs an odd class count >= 3, got {n}")
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    k = (n - 1) // 2
    denom = 1.0 + rho / k
    alpha = [(1.0 / (2 * k)) / denom] * n
    alpha[0] = (rho / k) / denom
    return RateVector.normalized(alpha)


def racket_rule_rates(n: int, rho: float) -> RateVector:
    if n < 2:
        raise ValueError(f"racket rule needs at least 2 classes, got {n}")
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    denom = 1.0 + rho / (n - 1)
    alpha = [(1.0 / (n - 1)) / denom] * n
    alpha[0] = (rho / (n - 1)) / denom
    return RateVector.normalized(alpha)


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep: a graph, a rate rule, and the load grid."""

    graph: CompatibilityGraph
    rule: str
    rho_grid: tuple[float, ...] = ()
    rates: RateVector | None = None
    saturated: int | None = None

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rate rule {self.rule!r}; choose from {RULES}")
        if self.rule == "explicit":
            if self.rates is None:
                raise ValueError("explicit rule needs a rate vector")
        else:
            if not self.rho_grid:
                raise ValueError("parametric rules need a non-empty rho grid")
            for rho in self.rho_grid:
                if not 0 < rho < 1:
                    raise ValueError(f"grid loads must lie in (0, 1), got {rho}")
        if self.rule == "heavy-traffic" and self.saturated is None:
            raise ValueError("heavy-traffic rule needs a saturated set")

    def rates_at(self, rho: float) -> RateVector:
        g = self.graph
        if self.rule == "cycle":
            return cycle_rule_rates(g.n, rho)
        if self.rule == "racket":
            return racket_rule_rates(g.n, rho)
        if self.rule == "heavy-traffic":
            spec = heavy_traffic.ScalingSpec.uniform(g, self.saturated, rho)
            return heavy_traffic.scaled_rates(spec)
        raise ValueError("explicit rule has no load parameter")


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Evaluate exact metrics per grid point; unstable points yield blank rows."""
    g = spec.graph
    index = enumerate_independent_sets(g)
    rows = []
    if spec.rule == "explicit":
        points = [(None, spec.rates)]
    else:
        points = [(rho, spec.rates_at(rho)) for rho in spec.rho_grid]
    for rho, rates in points:
        try:
            table = analytics.compute_metrics(g, rates, index)
        except StabilityError:
            report = analytics.check_stability(g, rates, index)
            rows.append(
                SweepRow(
                    load=rho if rho is not None else report.max_load,
                    stable=False,
                    omega=None,
                    eti=None,
                    overall_wait=None,
                    overall_time=None,
                )
            )
            continue
        load = rho
        if load is None:
            load = analytics.check_stability(g, rates, index).max_load
        overall_wait = math.fsum(
            a * w for a, w in zip(rates.alpha, table.omega, strict=True)
        )
        rows.append(
            SweepRow(
                load=load,
                stable=True,
                omega=table.omega,
                eti=table.ETi,
                overall_wait=overall_wait,
                overall_time=table.ET,
            )
        )
    return rows
