"""Rate design: weight/degree-proportional construction and min-max-load optimization."""

from __future__ import annotations

import random

import numpy as np
import pytest

from matchq import (
    GraphStructureError,
    build_graph,
    check_stability,
    degree_proportional_rates,
    enumerate_independent_sets,
    load,
    minimize_max_load,
    restricted_minimize_max_load,
    weight_proportional_rates,
)

from .conftest import cycle_graph, random_connected_nonbipartite


def adjacency_matrix(g) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for i, j in g.edges:
        a[i, j] = a[j, i] = 1.0
    return a


def random_weights(g, rng: random.Random) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for i, j in g.edges:
        a[i, j] = a[j, i] = rng.uniform(0.1, 5.0)
    return a


def max_load_via_analytics(g, rates) -> float:
    index = enumerate_independent_sets(g)
    return max(load(g, rates, mask) for mask in index.sets[1:])


class TestWeightProportional:
    def test_fig1_degrees(self, fig1):
        rates = weight_proportional_rates(fig1, adjacency_matrix(fig1))
        assert rates.alpha == pytest.approx((0.25, 0.25, 0.375, 0.125), abs=1e-15)

    def test_triangle_uniform(self, triangle):
        rates = degree_proportional_rates(triangle)
        assert rates.alpha == pytest.approx((1 / 3,) * 3, abs=1e-15)

    def test_c9_uniform(self, c9):
        rates = degree_proportional_rates(c9)
        assert rates.alpha == pytest.approx((1 / 9,) * 9, abs=1e-15)

    def test_support_mismatch_rejected(self, fig1):
        bad = adjacency_matrix(fig1)
        bad[0, 3] = bad[3, 0] = 1.0  # not an edge
        with pytest.raises(ValueError, match="support"):
            weight_proportional_rates(fig1, bad)
        missing = adjacency_matrix(fig1)
        missing[0, 1] = missing[1, 0] = 0.0  # edge with zero weight
        with pytest.raises(ValueError, match="support"):
            weight_proportional_rates(fig1, missing)

    def test_bipartite_rejected(self, two_class_edge):
        with pytest.raises(GraphStructureError, match="bipartite"):
            degree_proportional_rates(two_class_edge)

    def test_disconnected_rejected(self):
        g = build_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        with pytest.raises(GraphStructureError, match="disconnected"):
            degree_proportional_rates(g)

    def test_always_stable_randomized(self):
        rng = random.Random(5)
        for _ in range(30):
            g = random_connected_nonbipartite(rng)
            rates = weight_proportional_rates(g, random_weights(g, rng))
            assert check_stability(g, rates).stable


class TestMinimizeMaxLoad:
    def test_fig1_known_optimum(self, fig1):
        result = minimize_max_load(fig1)
        assert result.converged
        target = (1 / 3, 1 / 3, 1 / 3, 0.0)
        gap = max(abs(a - b) for a, b in zip(result.rates.alpha, target))
        assert gap <= 1e-4
        assert result.achieved_max_load <= 0.5 + 1e-6

    def test_triangle_uniform(self, triangle):
        result = minimize_max_load(triangle)
        assert result.rates.alpha == pytest.approx((1 / 3,) * 3, abs=1e-6)
        assert result.achieved_max_load == pytest.approx(0.5, abs=1e-6)

    def test_c9_uniform_and_stable(self, c9):
        result = minimize_max_load(c9)
        gap = max(abs(a - 1 / 9) for a in result.rates.alpha)
        assert gap <= 1e-4
        assert result.achieved_max_load < 1.0
        assert check_stability(c9, result.rates).stable

    def test_claimed_load_matches_independent_recompute(self, fig1, c9):
        for g in (fig1, c9):
            result = minimize_max_load(g)
            recomputed = max_load_via_analytics(g, result.rates)
            assert abs(recomputed - result.achieved_max_load) <= 1e-8

    def test_never_worse_than_degree_proportional(self):
        rng = random.Random(17)
        for _ in range(10):
            g = random_connected_nonbipartite(rng, max_n=8)
            start = max_load_via_analytics(g, degree_proportional_rates(g))
            result = minimize_max_load(g)
            assert result.achieved_max_load <= start + 1e-9

    def test_bipartite_rejected(self, two_class_edge):
        with pytest.raises(GraphStructureError):
            minimize_max_load(two_class_edge)


class TestRestricted:
    def test_fig1_cardinality_two_equals_full(self, fig1):
        full = minimize_max_load(fig1)
        restricted = restricted_minimize_max_load(fig1, 2)
        assert restricted.achieved_max_load == pytest.approx(
            full.achieved_max_load, abs=1e-8
        )
        assert restricted.full_check is not None and restricted.full_check.stable
        assert restricted.warning is None

    def test_fig1_cardinality_one_relaxation(self, fig1):
        full = minimize_max_load(fig1)
        restricted = restricted_minimize_max_load(fig1, 1)
        # Relaxed program: its optimum cannot exceed the full optimum on
        # the singleton constraints it optimizes.
        singles = [1 << i for i in range(fig1.n)]
        restricted_max = max(load(fig1, restricted.rates, m) for m in singles)
        full_max = max(load(fig1, full.rates, m) for m in singles)
        assert restricted_max <= full_max + 1e-6

    def test_full_cardinality_identical(self, c9):
        full = minimize_max_load(c9)
        restricted = restricted_minimize_max_load(c9, 9)
        assert restricted.rates.alpha == pytest.approx(full.rates.alpha, abs=1e-9)

    def test_warning_when_restriction_misses_instability(self):
        # Star-of-triangles shape where pair constraints matter: use C9 with
        # cardinality 1; singleton loads alone admit rates that larger sets reject.
        g = cycle_graph(9)
        result = restricted_minimize_max_load(g, 1)
        assert result.full_check is not None
        if not result.full_check.stable:
            assert result.warning is not None
