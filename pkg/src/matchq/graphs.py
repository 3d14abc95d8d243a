"""Compatibility graphs and their independent sets.

Classes are indexed 0..n-1 and class sets are plain ``int`` bitmasks
(bit ``i`` set means class ``i`` is in the set), which keeps all set
algebra O(1). File formats and the CLI use 1-based labels; the
translation happens at that boundary only.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import GraphStructureError, ResourceCapError

MAX_CLASSES = 64

DEFAULT_ENUMERATION_CAP = 1_000_000

STATE_CAP_ENV = "MATCHQ_STATE_CAP"


def enumeration_cap(cap: int | None = None) -> int:
    """Resolve an enumeration cap: explicit argument, else env override, else default."""
    if cap is not None:
        return cap
    env = os.environ.get(STATE_CAP_ENV)
    if env:
        return int(env)
    return DEFAULT_ENUMERATION_CAP


def mask_of(classes: Iterable[int]) -> int:
    """Bitmask for an iterable of 0-based class indices."""
    mask = 0
    for i in classes:
        mask |= 1 << i
    return mask


def classes_of(mask: int) -> tuple[int, ...]:
    """Sorted tuple of 0-based class indices in a bitmask."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def iter_classes(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class CompatibilityGraph:
    """Simple undirected graph on item classes.

    ``adj[i]`` is the neighbor bitmask of class ``i``. Connectivity and
    bipartiteness are computed flags: construction succeeds for any simple
    graph, and the analysis layers decide what they refuse.
    """

    n: int
    adj: tuple[int, ...]
    _env_cache: dict = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        if not 2 <= self.n <= MAX_CLASSES:
            raise ValueError(f"number of classes must be in [2, {MAX_CLASSES}], got {self.n}")
        if len(self.adj) != self.n:
            raise ValueError("adjacency length does not match number of classes")
        for i, m in enumerate(self.adj):
            if m >> self.n:
                raise ValueError(f"class {i} has neighbors outside 0..{self.n - 1}")
            if (m >> i) & 1:
                raise ValueError(f"self-edge at class {i}")
        for i in range(self.n):
            for j in iter_classes(self.adj[i]):
                if not (self.adj[j] >> i) & 1:
                    raise ValueError(f"adjacency is not symmetric at edge {i}-{j}")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        out = []
        for i in range(self.n):
            for j in iter_classes(self.adj[i]):
                if i < j:
                    out.append((i, j))
        return tuple(out)

    def neighborhood(self, mask: int) -> int:
        """Union of the neighbor sets of all classes in ``mask``; empty set maps to 0."""
        cached = self._env_cache.get(mask)
        if cached is not None:
            return cached
        env = 0
        for i in iter_classes(mask):
            env |= self.adj[i]
        self._env_cache[mask] = env
        return env

    def is_independent(self, mask: int) -> bool:
        """True iff ``mask`` is nonempty and contains no edge.

        The empty set is reported separately (False here): it is the base
        point of every recursion, not an independent set.
        """
        if mask == 0:
            return False
        return mask & self.neighborhood(mask) == 0

    @property
    def connected(self) -> bool:
        return self._classification()[0]

    @property
    def bipartite(self) -> bool:
        return self._classification()[1]

    def _classification(self) -> tuple[bool, bool]:
        cached = self._env_cache.get("_class")
        if cached is not None:
            return cached
        color = [-1] * self.n
        bipartite = True
        components = 0
        for start in range(self.n):
            if color[start] >= 0:
                continue
            components += 1
            color[start] = 0
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for w in iter_classes(self.adj[v]):
                    if color[w] < 0:
                        color[w] = 1 - color[v]
                        queue.append(w)
                    elif color[w] == color[v]:
                        bipartite = False
        result = (components == 1, bipartite)
        self._env_cache["_class"] = result
        return result


def build_graph(n_classes: int, edges: Iterable[tuple[int, int]]) -> CompatibilityGraph:
    """Build a compatibility graph from 0-based class pairs.

    Duplicate edges collapse; self-edges and out-of-range endpoints are
    rejected.
    """
    adj = [0] * n_classes
    for i, j in edges:
        if not (0 <= i < n_classes and 0 <= j < n_classes):
            raise ValueError(f"edge ({i}, {j}) out of range for {n_classes} classes")
        if i == j:
            raise ValueError(f"self-edge at class {i} is not allowed")
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    return CompatibilityGraph(n_classes, tuple(adj))


def classify_graph(g: CompatibilityGraph) -> dict[str, bool]:
    """Standard classification used by the analysis layers to accept or refuse a graph."""
    return {"connected": g.connected, "bipartite": g.bipartite}


@dataclass(frozen=True)
class IndependentSetIndex:
    """All independent sets of a graph, ordered by nondecreasing cardinality.

    Position 0 is the empty set. The ordering guarantees that for every
    listed nonempty set I and every i in I, the set I minus {i} appears
    earlier, which is exactly what the dynamic programs need.
    """

    sets: tuple[int, ...]
    position: dict[int, int] = field(compare=False, repr=False)

    @property
    def n_nonempty(self) -> int:
        return len(self.sets) - 1

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[int]:
        return iter(self.sets)

    def index_of(self, mask: int) -> int:
        return self.position[mask]


def enumerate_independent_sets(
    g: CompatibilityGraph,
    cap: int | None = None,
    max_cardinality: int | None = None,
) -> IndependentSetIndex:
    """Enumerate every independent set of ``g`` by pruned backtracking.

    The enumeration is exponential in general, so it is guarded by ``cap``
    (argument, else the MATCHQ_STATE_CAP env var, else 10**6).
    """
    limit = enumeration_cap(cap)
    depth_limit = g.n if max_cardinality is None else max_cardinality
    found: list[int] = [0]

    def extend(mask: int, forbidden: int, start: int, size: int) -> None:
        if size == depth_limit:
            return
        for v in range(start, g.n):
            bit = 1 << v
            if forbidden & bit:
                continue
            grown = mask | bit
            found.append(grown)
            if len(found) > limit:
                raise ResourceCapError(
                    f"independent-set enumeration exceeded cap {limit}"
                )
            extend(grown, forbidden | g.adj[v], v + 1, size + 1)

    extend(0, 0, 0, 0)
    found.sort(key=int.bit_count)
    position = {mask: k for k, mask in enumerate(found)}
    return IndependentSetIndex(tuple(found), position)


def require_connected_nonbipartite(g: CompatibilityGraph) -> None:
    """Raise unless the graph admits stabilizing arrival rates at all."""
    if not g.connected:
        raise GraphStructureError(
            "graph is disconnected; the model is only analyzed on connected graphs"
        )
    if g.bipartite:
        raise GraphStructureError(
            "graph is bipartite; no arrival rates can stabilize the matching model"
        )
