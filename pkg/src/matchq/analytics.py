"""Exact stationary performance metrics via dynamic programming over independent sets.

The stationary distribution of the matching buffer has a product form, and
aggregating it by the *set* of classes present yields one unnormalized
weight per independent set. Every metric below is a dynamic program over
the cardinality-ordered independent-set index:

* ``psi(I)``   - unnormalized stationary weight of class set I, ``psi({}) = 1``
* ``pi(I)``    - stationary probability that the set of buffered classes is I
* ``omega_i``  - probability an arriving class-i item has to wait (PASTA)
* ``L_i, L``   - mean number of unmatched items, per class and total
* ``E[T_i]``   - mean matching time per class, via Little's law (overall = L)

plus the probability generating function of the unmatched-item counts and
the Laplace-Stieltjes transform of the per-class matching time, both of
which reduce to the same recursion with modified rate vectors.

All recursions share the denominator ``alpha(E(I)) - alpha(I)``, positive
exactly when the instance is stable; a non-positive denominator raises
``StabilityError`` naming the offending set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateRatesError, GraphStructureError, StabilityError
from .graphs import (
    CompatibilityGraph,
    IndependentSetIndex,
    classes_of,
    enumerate_independent_sets,
    iter_classes,
)
from .rates import RateVector

# Denominators at or below this are treated as instability: the recursion
# is numerically meaningless that close to criticality.
DENOM_EPS = 1e-12

# Above this max load, psi is computed in the log domain to survive
# near-critical sweeps without overflow.
LOG_DOMAIN_LOAD_THRESHOLD = 0.999


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of checking ``alpha(I) < alpha(E(I))`` over all independent sets.

    Sets with zero arrival rate are skipped: classes that never arrive
    cannot accumulate. ``violations`` lists (set mask, load) pairs with
    load >= 1; ``max_load`` and ``argmax_set`` cover the evaluated sets.
    """

    stable: bool
    violations: tuple[tuple[int, float], ...]
    max_load: float
    argmax_set: int | None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.stable


@dataclass(frozen=True)
class MetricsTable:
    """All stationary metrics of one stable instance, aligned to an index."""

    graph: CompatibilityGraph
    rates: RateVector
    index: IndependentSetIndex
    psi: tuple[float, ...]
    pi: tuple[float, ...]
    pi_empty: float
    omega: tuple[float, ...]
    Li: tuple[float, ...]
    L: float
    ETi: tuple[float, ...]
    ET: float

    def pi_of(self, mask: int) -> float:
        return self.pi[self.index.index_of(mask)]

    def psi_of(self, mask: int) -> float:
        return self.psi[self.index.index_of(mask)]


def _as_rates(g: CompatibilityGraph, alpha) -> RateVector:
    rv = alpha if isinstance(alpha, RateVector) else RateVector.normalized(alpha)
    if rv.n != g.n:
        raise ValueError(f"rate vector has length {rv.n}, graph has {g.n} classes")
    return rv


def load(g: CompatibilityGraph, alpha, members: int) -> float:
    """Load of an independent set: rate into the set over rate of its neighborhood."""
    rv = _as_rates(g, alpha)
    if not g.is_independent(members):
        raise ValueError(f"set {classes_of(members)} is not independent")
    denom = rv.of_set(g.neighborhood(members))
    if denom <= 0.0:
        raise DegenerateRatesError(
            f"all neighbors of {classes_of(members)} have zero arrival rate"
        )
    return rv.of_set(members) / denom


def check_stability(
    g: CompatibilityGraph, alpha, index: IndependentSetIndex | None = None
) -> StabilityReport:
    """Evaluate the stability condition over every independent set.

    Disconnected graphs are refused outright (the model is not defined
    piecewise here). Connected bipartite graphs always yield an unstable
    report, with the reason spelled out.
    """
    if not g.connected:
        raise GraphStructureError(
            "graph is disconnected; stability is only analyzed on connected graphs"
        )
    rv = _as_rates(g, alpha)
    if index is None:
        index = enumerate_independent_sets(g)
    violations: list[tuple[int, float]] = []
    max_load = 0.0
    argmax: int | None = None
    for mask in index.sets[1:]:
        a_in = rv.of_set(mask)
        if a_in == 0.0:
            continue
        a_env = rv.of_set(g.neighborhood(mask))
        rho = a_in / a_env if a_env > 0.0 else math.inf
        if rho > max_load:
            max_load = rho
            argmax = mask
        if rho >= 1.0:
            violations.append((mask, rho))
    reason = (
        "graph is bipartite; no arrival rates can satisfy the stability condition"
        if g.bipartite
        else None
    )
    return StabilityReport(
        stable=not violations,
        violations=tuple(violations),
        max_load=max_load,
        argmax_set=argmax,
        reason=reason,
    )


def _set_rate_arrays(
    g: CompatibilityGraph, rv: RateVector, index: IndependentSetIndex
) -> tuple[list[float], list[float]]:
    a_in = [0.0] * len(index.sets)
    a_env = [0.0] * len(index.sets)
    for k, mask in enumerate(index.sets):
        a_in[k] = rv.of_set(mask)
        a_env[k] = rv.of_set(g.neighborhood(mask))
    return a_in, a_env


def psi_general(
    g: CompatibilityGraph,
    lam,
    mu,
    index: IndependentSetIndex,
) -> tuple[float, ...]:
    """Weights for arbitrary numerator/denominator rate vectors.

    ``psi(I) = sum_{i in I} lam_i psi(I \\ {i}) / (mu(E(I)) - lam(I))`` with
    ``psi({}) = 1``, defined whenever ``lam(I) < mu(E(I))`` for every
    independent set. With ``lam = mu = alpha`` this is the stationary
    weight recursion itself.
    """
    lam = tuple(float(v) for v in lam)
    mu = tuple(float(v) for v in mu)
    if len(lam) != g.n or len(mu) != g.n:
        raise ValueError("rate vectors must have one entry per class")
    if any(v < 0 for v in lam) or any(v < 0 for v in mu):
        raise ValueError("rate vectors must be nonnegative")
    psi = [0.0] * len(index.sets)
    psi[0] = 1.0
    for k, mask in enumerate(index.sets):
        if k == 0:
            continue
        num = 0.0
        lam_in = 0.0
        for i in iter_classes(mask):
            lam_in += lam[i]
            num += lam[i] * psi[index.position[mask ^ (1 << i)]]
        if num == 0.0:
            psi[k] = 0.0
            continue
        denom = sum(mu[i] for i in iter_classes(g.neighborhood(mask))) - lam_in
        if denom <= DENOM_EPS:
            raise StabilityError(
                f"numerator rate of {classes_of(mask)} is not below its neighborhood"
                " service rate",
                violating_set=classes_of(mask),
            )
        psi[k] = num / denom
    return tuple(psi)


def compute_psi(
    g: CompatibilityGraph,
    alpha,
    index: IndependentSetIndex,
) -> tuple[float, ...]:
    """Unnormalized stationary weights per independent set, base 1 at the empty set."""
    rv = _as_rates(g, alpha)
    return psi_general(g, rv.alpha, rv.alpha, index)


def _log_psi(
    g: CompatibilityGraph, rv: RateVector, index: IndependentSetIndex
) -> list[float]:
    """Log-domain twin of the psi recursion, for near-critical loads."""
    log_alpha = [math.log(a) if a > 0 else -math.inf for a in rv.alpha]
    logs = [-math.inf] * len(index.sets)
    logs[0] = 0.0
    for k, mask in enumerate(index.sets):
        if k == 0:
            continue
        terms = []
        a_in = 0.0
        for i in iter_classes(mask):
            a_in += rv.alpha[i]
            prev = logs[index.position[mask ^ (1 << i)]]
            if rv.alpha[i] > 0 and prev > -math.inf:
                terms.append(log_alpha[i] + prev)
        if not terms:
            continue
        denom = rv.of_set(g.neighborhood(mask)) - a_in
        if denom <= DENOM_EPS:
            raise StabilityError(
                f"arrival rate of {classes_of(mask)} is not below its neighborhood rate",
                violating_set=classes_of(mask),
            )
        top = max(terms)
        logs[k] = top + math.log(math.fsum(math.exp(t - top) for t in terms)) - math.log(denom)
    return logs


def pi_table(psi: tuple[float, ...]) -> tuple[float, tuple[float, ...]]:
    """Normalize weights into the stationary distribution over class sets."""
    total = math.fsum(psi)
    pi_empty = 1.0 / total
    return pi_empty, tuple(p * pi_empty for p in psi)


def _pi_from_logs(logs: list[float]) -> tuple[float, tuple[float, ...]]:
    top = max(logs)
    log_total = top + math.log(math.fsum(math.exp(v - top) for v in logs))
    pi = tuple(math.exp(v - log_total) for v in logs)
    return math.exp(-log_total), pi


def waiting_probabilities(
    g: CompatibilityGraph, index: IndependentSetIndex, pi: tuple[float, ...]
) -> tuple[float, ...]:
    """Per-class waiting probability: total mass of sets whose neighborhood misses the class.

    An arriving class-i item waits exactly when no buffered class can match
    it, i.e. when i is not in E(I) for the current set I (PASTA). The empty
    set always qualifies.
    """
    omega = [0.0] * g.n
    per_class_terms: list[list[float]] = [[] for _ in range(g.n)]
    for k, mask in enumerate(index.sets):
        env = g.neighborhood(mask)
        for i in range(g.n):
            if not (env >> i) & 1:
                per_class_terms[i].append(pi[k])
    for i in range(g.n):
        omega[i] = min(math.fsum(per_class_terms[i]), 1.0)
    return tuple(omega)


def mean_unmatched_per_class(
    g: CompatibilityGraph,
    alpha,
    index: IndependentSetIndex,
    pi: tuple[float, ...],
) -> tuple[float, ...]:
    """Mean number of unmatched items of each class.

    Runs one dynamic program per class over the sets containing it; the
    recursed quantity is the product (conditional mean) * (set probability),
    which stays bounded by the total mean even near criticality.
    """
    rv = _as_rates(g, alpha)
    a_in, a_env = _set_rate_arrays(g, rv, index)
    out = []
    for i in range(g.n):
        bit = 1 << i
        y = [0.0] * len(index.sets)
        for k, mask in enumerate(index.sets):
            if not mask & bit:
                continue
            without_i = index.position[mask ^ bit]
            num = rv.alpha[i] * (pi[k] + pi[without_i])
            for j in iter_classes(mask ^ bit):
                num += rv.alpha[j] * y[index.position[mask ^ (1 << j)]]
            if num == 0.0:
                continue
            denom = a_env[k] - a_in[k]
            if denom <= DENOM_EPS:
                raise StabilityError(
                    f"arrival rate of {classes_of(mask)} is not below its neighborhood rate",
                    violating_set=classes_of(mask),
                )
            y[k] = num / denom
        out.append(math.fsum(y))
    return tuple(out)


def mean_unmatched_total(
    g: CompatibilityGraph,
    alpha,
    index: IndependentSetIndex,
    pi: tuple[float, ...],
) -> float:
    """Mean number of unmatched items over all classes, via a single dynamic program."""
    rv = _as_rates(g, alpha)
    _, a_env = _set_rate_arrays(g, rv, index)
    m = [0.0] * len(index.sets)
    for k, mask in enumerate(index.sets):
        if k == 0:
            continue
        num = a_env[k] * pi[k]
        for i in iter_classes(mask):
            num += rv.alpha[i] * m[index.position[mask ^ (1 << i)]]
        if num == 0.0:
            continue
        denom = a_env[k] - rv.of_set(mask)
        if denom <= DENOM_EPS:
            raise StabilityError(
                f"arrival rate of {classes_of(mask)} is not below its neighborhood rate",
                violating_set=classes_of(mask),
            )
        m[k] = num / denom
    return math.fsum(m)


def mean_matching_times(
    alpha, Li: tuple[float, ...], L: float
) -> tuple[tuple[float, ...], float]:
    """Little's law: per-class mean matching time L_i/alpha_i, overall equal to L.

    Classes with zero arrival rate get ``nan`` (no items, no matching time);
    the overall value is unaffected because the total arrival rate is 1.
    """
    rv = alpha if isinstance(alpha, RateVector) else RateVector.normalized(alpha)
    per_class = tuple(
        li / a if a > 0 else math.nan for li, a in zip(Li, rv.alpha, strict=True)
    )
    return per_class, L


def evaluate_pgf(
    g: CompatibilityGraph,
    alpha,
    z,
    index: IndependentSetIndex | None = None,
) -> float:
    """Joint probability generating function of the unmatched-item counts at point z.

    ``g_X(z) = sum_I psi_{alpha*z, alpha}(I) / sum_I psi_{alpha, alpha}(I)``
    with the elementwise product in the numerator rates.
    """
    rv = _as_rates(g, alpha)
    z = tuple(float(v) for v in z)
    if len(z) != g.n:
        raise ValueError("z must have one entry per class")
    if any(not 0.0 <= v <= 1.0 for v in z):
        raise ValueError("z entries must lie in [0, 1]")
    if index is None:
        index = enumerate_independent_sets(g)
    num = psi_general(g, rv.scaled_by(z), rv.alpha, index)
    den = psi_general(g, rv.alpha, rv.alpha, index)
    return math.fsum(num) / math.fsum(den)


def lst_matching_time(
    g: CompatibilityGraph,
    alpha,
    i: int,
    u: float,
    index: IndependentSetIndex | None = None,
) -> float:
    """Laplace-Stieltjes transform of the class-i matching time at u in [0, alpha_i].

    By the distributional form of Little's law this equals the PGF evaluated
    at ``z_i = 1 - u/alpha_i`` and 1 elsewhere; the identity is only claimed
    on that u-range, so arguments outside it are rejected.
    """
    rv = _as_rates(g, alpha)
    if not 0 <= i < g.n:
        raise ValueError(f"class index {i} out of range")
    if rv.alpha[i] <= 0:
        raise ValueError(f"class {i} has zero arrival rate; its matching time is undefined")
    if not 0.0 <= u <= rv.alpha[i]:
        raise ValueError(f"u must lie in [0, {rv.alpha[i]}], got {u}")
    z = [1.0] * g.n
    z[i] = 1.0 - u / rv.alpha[i]
    return evaluate_pgf(g, rv, z, index)


def compute_metrics(
    g: CompatibilityGraph,
    alpha,
    index: IndependentSetIndex | None = None,
) -> MetricsTable:
    """Compute the full metrics table for a stable instance.

    Raises ``GraphStructureError`` for disconnected graphs and
    ``StabilityError`` when the stability condition fails. Near criticality
    (max load above 0.999) the weights are normalized through the log
    domain so the distribution survives even when raw weights overflow.
    """
    rv = _as_rates(g, alpha)
    if index is None:
        index = enumerate_independent_sets(g)
    report = check_stability(g, rv, index)
    if not report.stable:
        worst = report.violations[0]
        raise StabilityError(
            f"unstable instance: set {classes_of(worst[0])} has load {worst[1]:.6g}"
            + (f" ({report.reason})" if report.reason else ""),
            violating_set=classes_of(worst[0]),
        )
    if report.max_load > LOG_DOMAIN_LOAD_THRESHOLD:
        logs = _log_psi(g, rv, index)
        pi_empty, pi = _pi_from_logs(logs)
        psi = tuple(math.exp(v) for v in logs)
    else:
        psi = compute_psi(g, rv, index)
        pi_empty, pi = pi_table(psi)
    omega = waiting_probabilities(g, index, pi)
    Li = mean_unmatched_per_class(g, rv, index, pi)
    L = mean_unmatched_total(g, rv, index, pi)
    ETi, ET = mean_matching_times(rv, Li, L)
    return MetricsTable(
        graph=g,
        rates=rv,
        index=index,
        psi=psi,
        pi=pi,
        pi_empty=pi_empty,
        omega=omega,
        Li=Li,
        L=L,
        ETi=ETi,
        ET=ET,
    )
