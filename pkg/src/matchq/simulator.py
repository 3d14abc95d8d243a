"""Discrete-time simulation of the first-come-first-matched buffer.

The chain simulated here is the jump chain of the continuous-time model:
one arrival per step, drawn with the class probabilities. Because every
state's total transition rate equals the total arrival rate (normalized to
1), the jump chain and the continuous-time process share their stationary
measures, so plain time averages over steps estimate every stationary
metric of the analytics module.

Estimators:
* occupancy fraction per independent set  -> pi(I)
* per-class time-average buffer count     -> L_i (and their sum -> L)
* fraction of class-i arrivals that append rather than match -> omega_i
  (arrivals see time averages, so the arriving item's view is stationary)

Confidence half-widths come from the method of batch means: the
post-warmup span is cut into 30 equal batches and a Student-t interval is
put around the mean of the batch means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._chain import BACKEND, run_chain
from ._chain_py import splitmix64_ints, splitmix64_stream
from .analytics import check_stability
from .errors import GraphStructureError
from .graphs import (
    CompatibilityGraph,
    IndependentSetIndex,
    enumerate_independent_sets,
)
from .rates import RateVector
from .validation import is_feasible_word

N_BATCHES = 30

# Student-t quantiles at 29 degrees of freedom (30 batches).
T_95 = 2.0452296421327034
T_99 = 2.756385903670335
CI99_SCALE = T_99 / T_95

def step(g: CompatibilityGraph, word: tuple[int, ...], arriving: int) -> tuple[int, ...]:
    """One first-come-first-matched transition.

    The arriving item scans the buffer from the oldest end; it removes the
    first compatible item it finds, otherwise it joins at the newest end.
    """
    if not 0 <= arriving < g.n:
        raise ValueError(f"class index {arriving} out of range")
    compat = g.adj[arriving]
    for pos, c in enumerate(word):
        if (compat >> c) & 1:
            return word[:pos] + word[pos + 1 :]
    return word + (arriving,)


def arrival_class_stream(alpha, seed: int, count: int) -> list[int]:
    """The exact class sequence a simulation with this seed consumes.

    Exposed so tests can replay a run step by step against the kernels.
    """
    rv = alpha if isinstance(alpha, RateVector) else RateVector.normalized(alpha)
    cum = _cumulative(rv)
    uniforms = splitmix64_stream(seed)
    out = []
    for _ in range(count):
        u = next(uniforms)
        i = 0
        while u >= cum[i]:
            i += 1
        out.append(i)
    return out


def _cumulative(rv: RateVector) -> tuple[float, ...]:
    cum = []
    running = 0.0
    for a in rv.alpha:
        running += a
        cum.append(running)
    cum[-1] = 1.0  # guard against rounding so the class scan cannot overrun
    return tuple(cum)


@dataclass(frozen=True)
class SimulationEstimates:
    """Point estimates with 95% batch-means half-widths.

    ``pi_hat`` is aligned to ``index.sets``. ``used_steps`` is the span the
    estimators actually average over (the largest multiple of the batch
    count that fits after warmup). Multiply a half-width by ``CI99_SCALE``
    for the 99% interval.
    """

    graph: CompatibilityGraph
    rates: RateVector
    index: IndependentSetIndex
    steps: int
    warmup: int
    used_steps: int
    n_batches: int
    batch_size: int
    seed: int
    backend: str
    replications: int
    pi_hat: tuple[float, ...]
    pi_half_width: tuple[float, ...]
    omega_hat: tuple[float, ...]
    omega_half_width: tuple[float, ...]
    Li_hat: tuple[float, ...]
    Li_half_width: tuple[float, ...]
    L_hat: float
    L_half_width: float
    avg_wait_hat: float
    avg_wait_half_width: float
    final_word: tuple[int, ...]
    stability_warning: str | None

    def pi_of(self, mask: int) -> float:
        return self.pi_hat[self.index.index_of(mask)]


def _batch_stats(batch_means: np.ndarray) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Mean and 95% half-width per column, ignoring undefined batches."""
    means = np.nanmean(batch_means, axis=0)
    counts = np.sum(~np.isnan(batch_means), axis=0)
    with np.errstate(invalid="ignore"):
        std = np.nanstd(batch_means, axis=0, ddof=1)
    hw = np.where(counts > 1, T_95 * std / np.sqrt(np.maximum(counts, 1)), np.nan)
    return tuple(float(v) for v in means), tuple(float(v) for v in hw)


def simulate(
    g: CompatibilityGraph,
    alpha,
    steps: int,
    seed: int = 0,
    warmup: int | None = None,
    index: IndependentSetIndex | None = None,
) -> SimulationEstimates:
    """Simulate ``steps`` arrivals and estimate every stationary metric.

    Reproducible: the output is a pure function of (graph, rates, steps,
    seed, warmup). Unstable or refused instances still run, with a warning
    attached, since exploration of divergent behavior is legitimate; the
    estimates then have no stationary interpretation.
    """
    rv = alpha if isinstance(alpha, RateVector) else RateVector.normalized(alpha)
    if rv.n != g.n:
        raise ValueError(f"rate vector has length {rv.n}, graph has {g.n} classes")
    if warmup is None:
        warmup = steps // 10
    if warmup < 0:
        raise ValueError("warmup must be nonnegative")
    if steps <= warmup:
        raise ValueError(f"steps ({steps}) must exceed warmup ({warmup})")
    if steps - warmup < N_BATCHES:
        raise ValueError(f"need at least {N_BATCHES} post-warmup steps for batch means")
    if index is None:
        index = enumerate_independent_sets(g)

    warning: str | None = None
    try:
        report = check_stability(g, rv, index)
        if not report.stable:
            warning = "instance is unstable; estimates have no stationary meaning"
            if report.reason:
                warning += f" ({report.reason})"
    except GraphStructureError as exc:
        warning = f"instance refused by analytics: {exc}"

    batch_size = (steps - warmup) // N_BATCHES
    used = batch_size * N_BATCHES
    occupancy, class_sums, arrivals, appends, final_word = run_chain(
        g.adj,
        _cumulative(rv),
        warmup,
        N_BATCHES,
        batch_size,
        seed,
        index.position,
        len(index.sets),
    )

    pi_batches = occupancy / batch_size
    li_batches = class_sums / batch_size
    l_batches = li_batches.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        omega_batches = np.where(arrivals > 0, appends / arrivals, np.nan)
    wait_batches = appends.sum(axis=1, keepdims=True) / arrivals.sum(
        axis=1, keepdims=True
    )

    pi_hat, pi_hw = _batch_stats(pi_batches)
    li_hat, li_hw = _batch_stats(li_batches)
    l_hat, l_hw = _batch_stats(l_batches)
    omega_hat, omega_hw = _batch_stats(omega_batches)
    wait_hat, wait_hw = _batch_stats(wait_batches)

    return SimulationEstimates(
        graph=g,
        rates=rv,
        index=index,
        steps=steps,
        warmup=warmup,
        used_steps=used,
        n_batches=N_BATCHES,
        batch_size=batch_size,
        seed=seed,
        backend=BACKEND,
        replications=1,
        pi_hat=pi_hat,
        pi_half_width=pi_hw,
        omega_hat=omega_hat,
        omega_half_width=omega_hw,
        Li_hat=li_hat,
        Li_half_width=li_hw,
        L_hat=l_hat[0],
        L_half_width=l_hw[0],
        avg_wait_hat=wait_hat[0],
        avg_wait_half_width=wait_hw[0],
        final_word=tuple(final_word),
        stability_warning=warning,
    )


def replication_seeds(master_seed: int, replications: int) -> list[int]:
    """Derive one independent-looking seed per replication from a master seed."""
    ints = splitmix64_ints(master_seed)
    return [next(ints) for _ in range(replications)]


def simulate_replicated(
    g: CompatibilityGraph,
    alpha,
    steps: int,
    seed: int = 0,
    warmup: int | None = None,
    replications: int = 1,
    index: IndependentSetIndex | None = None,
) -> SimulationEstimates:
    """Independent replications merged by averaging with pooled variance.

    Half-widths keep the per-run t factor, which is slightly conservative
    for the merged interval.
    """
    if replications < 1:
        raise ValueError("replications must be at least 1")
    runs = [
        simulate(g, alpha, steps, seed=s, warmup=warmup, index=index)
        for s in replication_seeds(seed, replications)
    ]
    if replications == 1:
        return replace(runs[0], seed=seed)

    def merge(values):
        return tuple(float(v) for v in np.nanmean(np.array(values, dtype=float), axis=0))

    def pool(half_widths):
        arr = np.array(half_widths, dtype=float)
        return tuple(float(v) for v in np.sqrt(np.nansum(arr**2, axis=0)) / replications)

    base = runs[0]
    return replace(
        base,
        seed=seed,
        replications=replications,
        pi_hat=merge([r.pi_hat for r in runs]),
        pi_half_width=pool([r.pi_half_width for r in runs]),
        omega_hat=merge([r.omega_hat for r in runs]),
        omega_half_width=pool([r.omega_half_width for r in runs]),
        Li_hat=merge([r.Li_hat for r in runs]),
        Li_half_width=pool([r.Li_half_width for r in runs]),
        L_hat=float(np.mean([r.L_hat for r in runs])),
        L_half_width=float(
            math.sqrt(math.fsum(r.L_half_width**2 for r in runs)) / replications
        ),
        avg_wait_hat=float(np.mean([r.avg_wait_hat for r in runs])),
        avg_wait_half_width=float(
            math.sqrt(math.fsum(r.avg_wait_half_width**2 for r in runs)) / replications
        ),
        final_word=runs[-1].final_word,
    )


def assert_feasible(g: CompatibilityGraph, word: tuple[int, ...]) -> None:
    """Debug helper: raise if a buffer word could not occur under the policy."""
    if not is_feasible_word(g, word):
        raise AssertionError(f"infeasible buffer word {word}")
