"""Saturation scaling of one maximal independent set and its limit predictions.

Fix a maximal independent set I (so its neighborhood is exactly the
complement), split mass p over I and q over the complement, and set

    alpha_i = p_i * rho/(1+rho)   for i in I,
    alpha_i = q_i * 1/(1+rho)     otherwise,

so that rho is precisely the load of I. As rho tends to 1 the buffer
saturates with items of the classes in I while the other classes starve,
and the exact metrics converge to closed-form limits:

* pi(I) -> 1 and every other set probability -> 0,
* omega_i -> 1 on I and -> 0 off I,
* L_i ~ p_i * rho/(1-rho) on I (so L ~ rho/(1-rho)); L_i -> 0 off I,
* E[T_i] ~ 2/(1-rho) on I; E[T_i] -> 0 off I,
* (1-rho) X_i converges to an exponential with mean p_i on I,
* (1-rho) T_i converges to an exponential with rate 1/2 on I.

The regime is valid under a technical condition: at the limiting rates
(rho = 1) every other independent set must stay strictly subcritical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import analytics
from .errors import StabilityError
from .graphs import (
    CompatibilityGraph,
    IndependentSetIndex,
    classes_of,
    enumerate_independent_sets,
    iter_classes,
)
from .rates import RateVector


@dataclass(frozen=True)
class ScalingSpec:
    """A saturation direction: the set to saturate, mass splits, and the load rho.

    ``p`` and ``q`` are full-length per-class tuples; ``p`` must be zero off
    the saturated set and sum to 1 on it, ``q`` the mirror image.
    """

    graph: CompatibilityGraph
    saturated: int
    p: tuple[float, ...]
    q: tuple[float, ...]
    rho: float

    def __post_init__(self):
        g = self.graph
        if not g.is_independent(self.saturated):
            raise ValueError(f"{classes_of(self.saturated)} is not an independent set")
        if g.neighborhood(self.saturated) != g.full_mask & ~self.saturated:
            raise ValueError(
                f"{classes_of(self.saturated)} is not maximal: its neighborhood"
                " must be exactly the complement"
            )
        if len(self.p) != g.n or len(self.q) != g.n:
            raise ValueError("p and q must have one entry per class")
        for i in range(g.n):
            inside = bool((self.saturated >> i) & 1)
            if inside and self.q[i] != 0.0:
                raise ValueError(f"q must be zero on the saturated set (class {i})")
            if not inside and self.p[i] != 0.0:
                raise ValueError(f"p must be zero off the saturated set (class {i})")
            if self.p[i] < 0 or self.q[i] < 0:
                raise ValueError("p and q must be nonnegative")
        if abs(math.fsum(self.p) - 1.0) > 1e-9:
            raise ValueError("p must sum to 1 over the saturated set")
        if abs(math.fsum(self.q) - 1.0) > 1e-9:
            raise ValueError("q must sum to 1 over the complement")
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")

    @classmethod
    def uniform(cls, g: CompatibilityGraph, saturated: int, rho: float) -> "ScalingSpec":
        """Uniform mass on the saturated set and on its complement."""
        inside = classes_of(saturated)
        outside = classes_of(g.full_mask & ~saturated)
        p = [0.0] * g.n
        q = [0.0] * g.n
        for i in inside:
            p[i] = 1.0 / len(inside)
        for i in outside:
            q[i] = 1.0 / len(outside)
        return cls(graph=g, saturated=saturated, p=tuple(p), q=tuple(q), rho=rho)

    def at(self, rho: float) -> "ScalingSpec":
        return replace(self, rho=rho)


@dataclass(frozen=True)
class AssumptionCheck:
    """Whether only the chosen set saturates in the limit."""

    ok: bool
    witness: int | None
    probed_rhos: tuple[float, ...]
    probes_stable: bool


@dataclass(frozen=True)
class AsymptoticReport:
    """Predicted limits, optionally paired with exact values at one rho.

    Scaled quantities are reported in the form that has a finite nonzero
    limit on the saturated set: ``(1-rho) L_i / rho -> p_i`` and
    ``(1-rho) E[T_i] -> 2``.
    """

    spec: ScalingSpec
    predicted_pi_saturated: float
    predicted_omega: tuple[float, ...]
    predicted_scaled_Li: tuple[float, ...]
    predicted_scaled_ETi: tuple[float, ...]
    predicted_scaled_L: float
    rho: float | None = None
    stable: bool | None = None
    measured_pi_saturated: float | None = None
    measured_omega: tuple[float, ...] | None = None
    measured_scaled_Li: tuple[float, ...] | None = None
    measured_scaled_ETi: tuple[float, ...] | None = None
    measured_scaled_L: float | None = None

    def relative_gaps(self) -> dict[str, float]:
        """Worst relative gap per metric family, restricted to nonzero predictions."""
        if self.measured_omega is None:
            raise ValueError("no measured values attached to this report")
        gaps = {
            "pi_saturated": abs(self.measured_pi_saturated - self.predicted_pi_saturated),
            "scaled_L": abs(self.measured_scaled_L - self.predicted_scaled_L)
            / self.predicted_scaled_L,
        }
        worst_li = 0.0
        worst_eti = 0.0
        worst_omega = 0.0
        for i in range(len(self.predicted_omega)):
            if self.predicted_scaled_Li[i] > 0:
                worst_li = max(
                    worst_li,
                    abs(self.measured_scaled_Li[i] - self.predicted_scaled_Li[i])
                    / self.predicted_scaled_Li[i],
                )
                worst_eti = max(
                    worst_eti,
                    abs(self.measured_scaled_ETi[i] - self.predicted_scaled_ETi[i])
                    / self.predicted_scaled_ETi[i],
                )
            worst_omega = max(
                worst_omega, abs(self.measured_omega[i] - self.predicted_omega[i])
            )
        gaps["scaled_Li"] = worst_li
        gaps["scaled_ETi"] = worst_eti
        gaps["omega"] = worst_omega
        return gaps


def scaled_rates(spec: ScalingSpec) -> RateVector:
    """Arrival rates at the spec's rho; sums to exactly 1 by construction."""
    g = spec.graph
    inside_factor = spec.rho / (1.0 + spec.rho)
    outside_factor = 1.0 / (1.0 + spec.rho)
    raw = [0.0] * g.n
    for i in range(g.n):
        if (spec.saturated >> i) & 1:
            raw[i] = spec.p[i] * inside_factor
        else:
            raw[i] = spec.q[i] * outside_factor
    return RateVector.normalized(raw)


def limiting_rates(spec: ScalingSpec) -> tuple[float, ...]:
    """Rates with rho = 1 substituted: half the mass on each side of the split."""
    g = spec.graph
    return tuple(
        0.5 * (spec.p[i] if (spec.saturated >> i) & 1 else spec.q[i]) for i in range(g.n)
    )


def check_assumption(
    spec: ScalingSpec,
    index: IndependentSetIndex | None = None,
    rho_probes: tuple[float, ...] = (0.9, 0.99, 0.999),
) -> AssumptionCheck:
    """Verify that the saturated set is the only one that becomes critical.

    Checks the strict inequality ``alpha(J) < alpha(E(J))`` at the limiting
    rates for every independent set J other than the saturated one, and
    additionally probes stability at a few rho values near 1.
    """
    g = spec.graph
    if index is None:
        index = enumerate_independent_sets(g)
    limit = limiting_rates(spec)
    witness: int | None = None
    for mask in index.sets[1:]:
        if mask == spec.saturated:
            continue
        inside = sum(limit[i] for i in iter_classes(mask))
        around = sum(limit[i] for i in iter_classes(g.neighborhood(mask)))
        if not inside < around:
            witness = mask
            break
    probes_stable = True
    if witness is None:
        for rho in rho_probes:
            report = analytics.check_stability(g, scaled_rates(spec.at(rho)), index)
            if not report.stable:
                probes_stable = False
                break
    return AssumptionCheck(
        ok=witness is None and probes_stable,
        witness=witness,
        probed_rhos=rho_probes,
        probes_stable=probes_stable,
    )


def asymptotic_metrics(spec: ScalingSpec) -> AsymptoticReport:
    """Closed-form limit predictions; no sweep over independent sets involved."""
    assumption = check_assumption(spec)
    if not assumption.ok:
        detail = (
            f"set {classes_of(assumption.witness)} also saturates in the limit"
            if assumption.witness is not None
            else "stability fails near the limit"
        )
        raise ValueError(f"saturation regime assumption violated: {detail}")
    g = spec.graph
    omega = []
    scaled_li = []
    scaled_eti = []
    for i in range(g.n):
        inside = bool((spec.saturated >> i) & 1)
        omega.append(1.0 if inside else 0.0)
        scaled_li.append(spec.p[i] if inside else 0.0)
        scaled_eti.append(2.0 if inside else 0.0)
    return AsymptoticReport(
        spec=spec,
        predicted_pi_saturated=1.0,
        predicted_omega=tuple(omega),
        predicted_scaled_Li=tuple(scaled_li),
        predicted_scaled_ETi=tuple(scaled_eti),
        predicted_scaled_L=1.0,
    )


def measure_at(spec: ScalingSpec, index: IndependentSetIndex | None = None) -> AsymptoticReport:
    """Exact metrics at the spec's rho, attached to the limit predictions."""
    predictions = asymptotic_metrics(spec)
    g = spec.graph
    if index is None:
        index = enumerate_independent_sets(g)
    rho = spec.rho
    scale = (1.0 - rho) / rho
    try:
        table = analytics.compute_metrics(g, scaled_rates(spec), index)
    except StabilityError:
        return replace(predictions, rho=rho, stable=False)
    return replace(
        predictions,
        rho=rho,
        stable=True,
        measured_pi_saturated=table.pi_of(spec.saturated),
        measured_omega=table.omega,
        measured_scaled_Li=tuple(scale * li for li in table.Li),
        measured_scaled_ETi=tuple(
            (1.0 - rho) * t if not math.isnan(t) else 0.0 for t in table.ETi
        ),
        measured_scaled_L=scale * table.L,
    )


def convergence_sweep(
    spec: ScalingSpec, rho_grid: tuple[float, ...] | list[float]
) -> list[AsymptoticReport]:
    """Exact metrics alongside predictions over a grid of rho values.

    Unstable grid points (possible below the regime's onset) are recorded
    with ``stable=False`` rather than raised.
    """
    g = spec.graph
    index = enumerate_independent_sets(g)
    return [measure_at(spec.at(rho), index) for rho in rho_grid]
