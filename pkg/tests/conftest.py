"""Shared fixtures: the toy graphs and rate vectors every module is tested on."""

from __future__ import annotations

import random

import pytest

from matchq import (
    CompatibilityGraph,
    RateVector,
    build_graph,
    check_stability,
    enumerate_independent_sets,
    weight_proportional_rates,
)


def cycle_graph(n: int) -> CompatibilityGraph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


@pytest.fixture(scope="session")
def fig1() -> CompatibilityGraph:
    """4 classes; classes 1-2-3 form a triangle and 4 hangs off 3 (1-based labels)."""
    return build_graph(4, [(0, 1), (0, 2), (1, 2), (2, 3)])


@pytest.fixture(scope="session")
def triangle() -> CompatibilityGraph:
    return build_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture(scope="session")
def two_class_edge() -> CompatibilityGraph:
    return build_graph(2, [(0, 1)])


@pytest.fixture(scope="session")
def c9() -> CompatibilityGraph:
    return cycle_graph(9)


@pytest.fixture(scope="session")
def c15() -> CompatibilityGraph:
    return cycle_graph(15)


@pytest.fixture(scope="session")
def chord9() -> CompatibilityGraph:
    """9-cycle plus a chord between classes 5 and 9 (1-based)."""
    edges = [(i, (i + 1) % 9) for i in range(9)] + [(4, 8)]
    return build_graph(9, edges)


@pytest.fixture(scope="session")
def racket9() -> CompatibilityGraph:
    """Line 1-2-3-4 attached to the 5-cycle 5-6-7-8-9 at class 5 (1-based)."""
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 4)]
    return build_graph(9, edges)


@pytest.fixture(scope="session")
def fig1_degree_rates() -> RateVector:
    return RateVector((0.25, 0.25, 0.375, 0.125))


@pytest.fixture(scope="session")
def fig1_opt_rates() -> RateVector:
    return RateVector((1 / 3, 1 / 3, 1 / 3, 0.0))


@pytest.fixture(scope="session")
def uniform3() -> RateVector:
    return RateVector.normalized([1.0, 1.0, 1.0])


def random_connected_nonbipartite(rng: random.Random, max_n: int = 10) -> CompatibilityGraph:
    """Rejection-sample a random simple graph until connected and non-bipartite."""
    while True:
        n = rng.randint(3, max_n)
        p = rng.uniform(0.25, 0.75)
        edges = [
            (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
        ]
        if not edges:
            continue
        g = build_graph(n, edges)
        if g.connected and not g.bipartite:
            return g


def random_stable_rates(g: CompatibilityGraph, rng: random.Random) -> RateVector:
    """A random stable rate vector: rejection sampling with a guaranteed fallback."""
    index = enumerate_independent_sets(g)
    for _ in range(40):
        rv = RateVector.normalized([rng.expovariate(1.0) + 1e-3 for _ in range(g.n)])
        if check_stability(g, rv, index).stable:
            return rv
    weights = [[0.0] * g.n for _ in range(g.n)]
    for i, j in g.edges:
        w = rng.uniform(0.5, 2.0)
        weights[i][j] = w
        weights[j][i] = w
    return weight_proportional_rates(g, weights)
