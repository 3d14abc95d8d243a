"""Graph construction, neighborhoods, independence, enumeration, classification."""

from __future__ import annotations

import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matchq import (
    ResourceCapError,
    build_graph,
    classes_of,
    classify_graph,
    enumerate_independent_sets,
    mask_of,
)
from matchq.graphs import MAX_CLASSES

from .conftest import cycle_graph


def brute_force_independent_sets(g) -> set[int]:
    out = set()
    for mask in range(1, 1 << g.n):
        if g.is_independent(mask):
            out.add(mask)
    return out


def lucas(n: int) -> int:
    a, b = 2, 1  # L(0), L(1)
    for _ in range(n):
        a, b = b, a + b
    return a


class TestBuildGraph:
    def test_fig1_adjacency(self, fig1):
        assert fig1.edges == ((0, 1), (0, 2), (1, 2), (2, 3))
        assert fig1.adj[2] == mask_of([0, 1, 3])

    def test_duplicate_edges_collapse(self):
        g = build_graph(3, [(0, 1), (1, 0), (0, 1), (1, 2), (0, 2)])
        assert g.edges == ((0, 1), (0, 2), (1, 2))

    def test_self_edge_rejected(self):
        with pytest.raises(ValueError, match="self-edge"):
            build_graph(3, [(0, 0)])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            build_graph(3, [(0, 3)])

    def test_class_count_bounds(self):
        with pytest.raises(ValueError):
            build_graph(1, [])
        with pytest.raises(ValueError):
            build_graph(MAX_CLASSES + 1, [(0, 1)])


class TestNeighborhoods:
    def test_fig1_example(self, fig1):
        assert fig1.neighborhood(mask_of([0, 3])) == mask_of([1, 2])

    def test_empty_set(self, fig1):
        assert fig1.neighborhood(0) == 0

    def test_triangle_singleton(self, triangle):
        assert triangle.neighborhood(mask_of([0])) == mask_of([1, 2])

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_union_property(self, data):
        n = data.draw(st.integers(2, 8))
        pairs = list(combinations(range(n), 2))
        edges = data.draw(st.lists(st.sampled_from(pairs), max_size=len(pairs)))
        g = build_graph(n, edges)
        full = (1 << n) - 1
        a = data.draw(st.integers(0, full))
        b = data.draw(st.integers(0, full))
        assert g.neighborhood(a | b) == g.neighborhood(a) | g.neighborhood(b)


class TestIndependence:
    def test_fig1_cases(self, fig1):
        assert fig1.is_independent(mask_of([0, 3]))
        assert not fig1.is_independent(mask_of([0, 1]))
        assert not fig1.is_independent(mask_of([2, 3]))

    def test_empty_is_not_independent(self, fig1):
        assert not fig1.is_independent(0)

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_subsets_stay_independent(self, data):
        n = data.draw(st.integers(2, 8))
        pairs = list(combinations(range(n), 2))
        edges = data.draw(st.lists(st.sampled_from(pairs), max_size=len(pairs)))
        g = build_graph(n, edges)
        sets = brute_force_independent_sets(g)
        for mask in sets:
            for i in classes_of(mask):
                sub = mask ^ (1 << i)
                assert sub == 0 or sub in sets


class TestEnumeration:
    def test_fig1_sets(self, fig1):
        idx = enumerate_independent_sets(fig1)
        expected = {mask_of(s) for s in [(0,), (1,), (2,), (3,), (0, 3), (1, 3)]}
        assert set(idx.sets[1:]) == expected
        assert idx.sets[0] == 0
        assert idx.n_nonempty == 6

    def test_cycle_counts(self, c9, c15):
        assert enumerate_independent_sets(c9).n_nonempty == 75
        assert enumerate_independent_sets(c15).n_nonempty == 1363

    @pytest.mark.parametrize("n", [5, 7, 9])
    def test_lucas_count_on_odd_cycles(self, n):
        g = cycle_graph(n)
        assert enumerate_independent_sets(g).n_nonempty == lucas(n) - 1
        assert len(brute_force_independent_sets(g)) == lucas(n) - 1

    def test_cardinality_order_and_predecessors(self, c9):
        idx = enumerate_independent_sets(c9)
        sizes = [m.bit_count() for m in idx.sets]
        assert sizes == sorted(sizes)
        for k, mask in enumerate(idx.sets):
            for i in classes_of(mask):
                assert idx.position[mask ^ (1 << i)] < k

    def test_matches_brute_force_on_random_graphs(self):
        rng = random.Random(2024)
        for _ in range(25):
            n = rng.randint(2, 12)
            edges = [
                (i, j)
                for i in range(n)
                for j in range(i + 1, n)
                if rng.random() < 0.5
            ]
            g = build_graph(n, edges)
            idx = enumerate_independent_sets(g)
            assert set(idx.sets[1:]) == brute_force_independent_sets(g)

    def test_cap_enforced(self, c15):
        with pytest.raises(ResourceCapError):
            enumerate_independent_sets(c15, cap=100)

    def test_cap_env_override(self, c15, monkeypatch):
        monkeypatch.setenv("MATCHQ_STATE_CAP", "100")
        with pytest.raises(ResourceCapError):
            enumerate_independent_sets(c15)

    def test_max_cardinality_restriction(self, c9):
        idx = enumerate_independent_sets(c9, max_cardinality=2)
        assert all(m.bit_count() <= 2 for m in idx.sets)
        assert idx.n_nonempty == 9 + 9 * 6 // 2  # singletons + non-adjacent pairs


class TestClassification:
    def test_examples(self, fig1, two_class_edge, c9):
        assert classify_graph(fig1) == {"connected": True, "bipartite": False}
        assert classify_graph(two_class_edge) == {"connected": True, "bipartite": True}
        assert classify_graph(c9) == {"connected": True, "bipartite": False}

    def test_disconnected(self):
        g = build_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        assert not g.connected
        assert not g.bipartite

    def test_even_cycle_bipartite(self):
        assert cycle_graph(8).bipartite
