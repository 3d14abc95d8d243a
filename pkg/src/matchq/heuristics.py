"""Arrival-rate design: weight-proportional construction and min-max-load optimization.

Two ways to pick rates that stabilize a connected non-bipartite graph:

* rates proportional to row sums of a positive symmetric weight matrix
  supported exactly on the edges (degree-proportional as the 0/1 special
  case) -- always stable;
* minimize the maximum load over all independent sets. Each load is a
  ratio of linear forms, so for a fixed threshold t the sublevel set
  {alpha >= 0, sum alpha = 1, alpha(I) <= t * alpha(E(I)) for all I} is a
  linear feasibility problem. We bisect on t and solve each feasibility
  problem with a small phase-1 simplex (Bland's rule, hence deterministic
  and cycle-free), so no external solver is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytics import StabilityReport, check_stability
from .errors import ResourceCapError
from .graphs import (
    CompatibilityGraph,
    IndependentSetIndex,
    enumerate_independent_sets,
    iter_classes,
    require_connected_nonbipartite,
)
from .rates import RateVector

BISECTION_TOL = 1e-9
MAX_BISECTION_ITERATIONS = 200

_PIVOT_EPS = 1e-9
_FEASIBILITY_EPS = 1e-10

# A phase-1 vertex is only accepted once its recomputed max load confirms
# the threshold; degenerate pivots can otherwise leak small violations.
_VERIFY_MARGIN = 1e-9


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a min-max-load run.

    ``achieved_max_load`` is the maximum load of the returned rates over the
    constraint family actually optimized; ``full_check`` re-evaluates the
    full family when the optimization was restricted by cardinality (None
    when that re-check was impossible within the enumeration cap).
    """

    rates: RateVector
    achieved_max_load: float
    iterations: int
    converged: bool
    max_cardinality: int | None = None
    full_check: StabilityReport | None = None
    warning: str | None = None


def _validate_weights(g: CompatibilityGraph, weights: np.ndarray) -> np.ndarray:
    a = np.asarray(weights, dtype=float)
    if a.shape != (g.n, g.n):
        raise ValueError(f"weight matrix must be {g.n}x{g.n}, got {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=0.0):
        raise ValueError("weight matrix must be symmetric")
    if np.any(a < 0):
        raise ValueError("weights must be nonnegative")
    for i in range(g.n):
        if a[i, i] != 0.0:
            raise ValueError("weight matrix must have a zero diagonal")
        for j in range(g.n):
            neighbor = bool((g.adj[i] >> j) & 1)
            if neighbor != (a[i, j] > 0):
                raise ValueError(
                    f"weight support must match adjacency exactly (entry {i},{j})"
                )
    return a


def weight_proportional_rates(g: CompatibilityGraph, weights) -> RateVector:
    """Rates proportional to per-class weights d_i = sum of incident edge weights.

    For any positive symmetric weight matrix supported exactly on the edges
    of a connected non-bipartite graph, these rates satisfy the stability
    condition.
    """
    require_connected_nonbipartite(g)
    a = _validate_weights(g, weights)
    d = a.sum(axis=1)
    return RateVector.normalized(d)


def degree_proportional_rates(g: CompatibilityGraph) -> RateVector:
    """Weight-proportional rates with the 0/1 adjacency matrix: rates ~ degrees."""
    adjacency = np.zeros((g.n, g.n))
    for i in range(g.n):
        for j in iter_classes(g.adj[i]):
            adjacency[i, j] = 1.0
    return weight_proportional_rates(g, adjacency)


def _constraint_matrix(
    g: CompatibilityGraph, index: IndependentSetIndex
) -> tuple[np.ndarray, np.ndarray]:
    """Indicator rows for each nonempty set and its neighborhood."""
    m = index.n_nonempty
    inset = np.zeros((m, g.n))
    env = np.zeros((m, g.n))
    for row, mask in enumerate(index.sets[1:]):
        for i in iter_classes(mask):
            inset[row, i] = 1.0
        for i in iter_classes(g.neighborhood(mask)):
            env[row, i] = 1.0
    return inset, env


def _feasible_point(inset: np.ndarray, env: np.ndarray, t: float) -> np.ndarray | None:
    """Find alpha >= 0 with sum alpha = 1 and alpha(I) <= t*alpha(E(I)) per row, or None.

    Phase-1 simplex on the standard form: each load row gets a slack and
    starts basic at rhs 0; the normalization row gets the single artificial
    variable, whose value we drive to zero. Bland's rule everywhere, so the
    walk is deterministic and terminates despite heavy degeneracy.
    """
    m, n = inset.shape
    n_vars = n + m + 1
    art = n + m
    tableau = np.zeros((m + 1, n_vars + 1))
    tableau[:m, :n] = inset - t * env
    tableau[:m, n : n + m] = np.eye(m)
    tableau[m, :n] = 1.0
    tableau[m, art] = 1.0
    tableau[m, -1] = 1.0
    basis = list(range(n, n + m)) + [art]
    cost = np.zeros(n_vars)
    cost[art] = 1.0

    for _ in range(50_000):
        reduced = cost - cost[basis] @ tableau[:, :-1]
        entering = -1
        for v in range(n_vars):
            if reduced[v] < -_PIVOT_EPS:
                entering = v
                break
        if entering < 0:
            break
        col = tableau[:, entering]
        leaving = -1
        best = np.inf
        for r in range(m + 1):
            if col[r] > _PIVOT_EPS:
                ratio = tableau[r, -1] / col[r]
                if ratio < best - _PIVOT_EPS or (
                    abs(ratio - best) <= _PIVOT_EPS
                    and (leaving < 0 or basis[r] < basis[leaving])
                ):
                    best = ratio
                    leaving = r
        if leaving < 0:
            return None  # unbounded phase-1 cannot happen; treat as infeasible
        pivot = tableau[leaving, entering]
        tableau[leaving] /= pivot
        for r in range(m + 1):
            if r != leaving and tableau[r, entering] != 0.0:
                tableau[r] -= tableau[r, entering] * tableau[leaving]
        basis[leaving] = entering
    else:
        raise RuntimeError("phase-1 simplex failed to terminate")

    objective = sum(
        tableau[r, -1] for r in range(m + 1) if basis[r] == art
    )
    if objective > _FEASIBILITY_EPS:
        return None
    alpha = np.zeros(n)
    for r, var in enumerate(basis):
        if var < n:
            alpha[var] = max(tableau[r, -1], 0.0)
    return alpha


def _max_load(inset: np.ndarray, env: np.ndarray, alpha: np.ndarray) -> float:
    num = inset @ alpha
    den = env @ alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        loads = np.where(den > 0, num / den, np.where(num > 0, np.inf, 0.0))
    return float(loads.max())


def minimize_max_load(
    g: CompatibilityGraph,
    *,
    tol: float = BISECTION_TOL,
    max_iterations: int = MAX_BISECTION_ITERATIONS,
    cap: int | None = None,
) -> OptimizationResult:
    """Minimize the maximum independent-set load over the rate simplex.

    Bisects the threshold t between 0 (always infeasible) and the max load
    of the degree-proportional rates (always feasible), keeping the best
    feasible point found. The result is stable by construction and never
    worse than the degree-proportional starting point.
    """
    require_connected_nonbipartite(g)
    index = enumerate_independent_sets(g, cap=cap)
    return _optimize(g, index, tol=tol, max_iterations=max_iterations)


def restricted_minimize_max_load(
    g: CompatibilityGraph,
    max_cardinality: int,
    *,
    tol: float = BISECTION_TOL,
    max_iterations: int = MAX_BISECTION_ITERATIONS,
    cap: int | None = None,
) -> OptimizationResult:
    """Min-max load over only the independent sets of size <= ``max_cardinality``.

    Useful when the full family is too large to enumerate. The optimum of
    the restricted program may violate a larger set, so the result is
    re-checked against the full family when that is enumerable; otherwise a
    warning is attached.
    """
    if max_cardinality < 1:
        raise ValueError("max_cardinality must be at least 1")
    require_connected_nonbipartite(g)
    index = enumerate_independent_sets(g, cap=cap, max_cardinality=max_cardinality)
    result = _optimize(g, index, tol=tol, max_iterations=max_iterations)
    full_check: StabilityReport | None = None
    warning: str | None = None
    try:
        full_check = check_stability(g, result.rates, enumerate_independent_sets(g, cap=cap))
        if not full_check.stable:
            warning = (
                "restricted optimum violates the stability condition on a set of size"
                f" > {max_cardinality}"
            )
    except ResourceCapError:
        warning = (
            "full independent-set family exceeds the enumeration cap; the restricted"
            " optimum may not be stable"
        )
    return OptimizationResult(
        rates=result.rates,
        achieved_max_load=result.achieved_max_load,
        iterations=result.iterations,
        converged=result.converged,
        max_cardinality=max_cardinality,
        full_check=full_check,
        warning=warning,
    )


def _optimize(
    g: CompatibilityGraph,
    index: IndependentSetIndex,
    *,
    tol: float,
    max_iterations: int,
) -> OptimizationResult:
    inset, env = _constraint_matrix(g, index)
    start = degree_proportional_rates(g)
    best = np.array(start.alpha)
    hi = _max_load(inset, env, best)
    lo = 0.0
    iterations = 0
    while hi - lo > tol and iterations < max_iterations:
        mid = 0.5 * (lo + hi)
        candidate = _feasible_point(inset, env, mid)
        if candidate is not None and _max_load(inset, env, candidate) <= mid + _VERIFY_MARGIN:
            best = candidate
            hi = mid
        else:
            lo = mid
        iterations += 1
    rates = RateVector.normalized(best)
    achieved = _max_load(inset, env, np.array(rates.alpha))
    return OptimizationResult(
        rates=rates,
        achieved_max_load=achieved,
        iterations=iterations,
        converged=hi - lo <= tol,
    )
