"""Brute-force oracles over the word-level buffer state space.

These routines certify the closed-form results on desk-scale instances by
working directly with buffer words (ordered sequences of classes, oldest
first) instead of aggregated class sets:

* enumerate all feasible words up to a length cap,
* evaluate the unnormalized product-form measure of a word,
* check the two partial-balance identities the product form satisfies,
* sum the measure over all words with a given class set, truncated by
  length, which converges to the dynamic-programming weight psi(I).

Everything here is deliberately independent of the recursions in
``analytics``; agreement between the two is the correctness argument.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateRatesError, ResourceCapError
from .graphs import CompatibilityGraph, classes_of, enumeration_cap, iter_classes, mask_of
from .rates import RateVector


@dataclass(frozen=True)
class TruncatedStateSpace:
    """All feasible buffer words of length at most ``max_length``.

    Feasible means the word's class set is empty or independent; the listing
    is closed under prefixes by construction.
    """

    graph: CompatibilityGraph
    max_length: int
    words: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.words)


def _as_rates(g: CompatibilityGraph, alpha) -> RateVector:
    rv = alpha if isinstance(alpha, RateVector) else RateVector.normalized(alpha)
    if rv.n != g.n:
        raise ValueError(f"rate vector has length {rv.n}, graph has {g.n} classes")
    return rv


def is_feasible_word(g: CompatibilityGraph, word: tuple[int, ...]) -> bool:
    """A word is feasible iff no buffered class neighbors a later one (or itself)."""
    mask = 0
    for c in word:
        if not 0 <= c < g.n:
            return False
        if (g.neighborhood(mask) >> c) & 1:
            return False
        mask |= 1 << c
    return True


def enumerate_states(
    g: CompatibilityGraph, max_length: int, cap: int | None = None
) -> TruncatedStateSpace:
    """Enumerate feasible words by extending each word with every addable class."""
    limit = enumeration_cap(cap)
    words: list[tuple[int, ...]] = [()]
    frontier: list[tuple[tuple[int, ...], int]] = [((), 0)]
    for _ in range(max_length):
        next_frontier = []
        for word, mask in frontier:
            addable = g.full_mask & ~g.neighborhood(mask)
            for c in iter_classes(addable):
                grown = word + (c,)
                words.append(grown)
                if len(words) > limit:
                    raise ResourceCapError(f"state enumeration exceeded cap {limit}")
                next_frontier.append((grown, mask | (1 << c)))
        frontier = next_frontier
    return TruncatedStateSpace(graph=g, max_length=max_length, words=tuple(words))


def product_form_measure(g: CompatibilityGraph, alpha, word: tuple[int, ...]) -> float:
    """Unnormalized stationary measure of a feasible word (empty word -> 1).

    The measure multiplies, over each prefix, the last class's arrival rate
    divided by the arrival rate of the prefix set's neighborhood. Computed
    as a left-to-right running product so each value equals its prefix's
    value times one factor, exactly.
    """
    rv = _as_rates(g, alpha)
    value = 1.0
    mask = 0
    for c in word:
        if not 0 <= c < g.n:
            raise ValueError(f"class index {c} out of range")
        if (g.neighborhood(mask) >> c) & 1:
            raise ValueError(f"word {word} is not feasible: {c} matches a buffered class")
        mask |= 1 << c
        env_rate = rv.of_set(g.neighborhood(mask))
        if env_rate <= 0.0:
            raise DegenerateRatesError(
                f"all neighbors of {classes_of(mask)} have zero arrival rate"
            )
        value *= rv.alpha[c] / env_rate
    return value


def check_partial_balance(
    g: CompatibilityGraph, alpha, word: tuple[int, ...]
) -> tuple[float | None, dict[int, float]]:
    """Absolute residuals of the two partial-balance identities at one word.

    First identity (skipped for the empty word): flow out of the word due
    to matchable arrivals equals flow in from the arrival that built it:

        measure(word) * alpha(E(V(word))) = measure(prefix) * alpha(last)

    Second identity, for every class i not matchable in the word: flow out
    due to a class-i arrival equals flow in from departures of class-i
    items, summed over every insertion position p:

        measure(word) * alpha_i =
            sum_p measure(insert(word, p, i)) * alpha(E_i \\ E(V(word[:p])))
    """
    rv = _as_rates(g, alpha)
    v_mask = mask_of(word)
    measure = product_form_measure(g, rv, word)

    residual1: float | None = None
    if word:
        prefix = product_form_measure(g, rv, word[:-1])
        residual1 = abs(
            measure * rv.of_set(g.neighborhood(v_mask)) - prefix * rv.alpha[word[-1]]
        )

    residual2: dict[int, float] = {}
    outside = g.full_mask & ~g.neighborhood(v_mask)
    for i in iter_classes(outside):
        inflow = 0.0
        prefix_mask = 0
        for p in range(len(word) + 1):
            inserted = word[:p] + (i,) + word[p:]
            coeff = rv.of_set(g.adj[i] & ~g.neighborhood(prefix_mask))
            inflow += product_form_measure(g, rv, inserted) * coeff
            if p < len(word):
                prefix_mask |= 1 << word[p]
        residual2[i] = abs(measure * rv.alpha[i] - inflow)
    return residual1, residual2


def truncated_partial_sums(
    g: CompatibilityGraph,
    alpha,
    members: int,
    max_length: int,
    cap: int | None = None,
) -> tuple[float, ...]:
    """Cumulative truncated sums of the measure over words using exactly ``members``.

    Entry k is the sum over all such words of length <= k+1 (so the last
    entry is the length-``max_length`` truncation). The sums are monotone
    nondecreasing and converge to psi(members) as the cap grows.
    """
    rv = _as_rates(g, alpha)
    if members and not g.is_independent(members):
        raise ValueError(f"set {classes_of(members)} is not independent")
    limit = enumeration_cap(cap)
    by_length = [0.0] * max_length
    count = 0

    def extend(mask: int, value: float, length: int) -> None:
        nonlocal count
        if length == max_length:
            return
        for c in iter_classes(members):
            grown_mask = mask | (1 << c)
            env_rate = rv.of_set(g.neighborhood(grown_mask))
            if env_rate <= 0.0:
                raise DegenerateRatesError(
                    f"all neighbors of {classes_of(grown_mask)} have zero arrival rate"
                )
            grown_value = value * (rv.alpha[c] / env_rate)
            count += 1
            if count > limit:
                raise ResourceCapError(f"word enumeration exceeded cap {limit}")
            if grown_mask == members:
                by_length[length] += grown_value
            if grown_value > 0.0:
                extend(grown_mask, grown_value, length + 1)

    if members == 0:
        return tuple([1.0] * max_length) if max_length else ()
    extend(0, 1.0, 0)
    sums = []
    running = 0.0
    for v in by_length:
        running += v
        sums.append(running)
    return tuple(sums)


def truncated_aggregate(
    g: CompatibilityGraph,
    alpha,
    members: int,
    max_length: int,
    cap: int | None = None,
) -> float:
    """Truncated direct sum of the measure over words with class set ``members``."""
    sums = truncated_partial_sums(g, alpha, members, max_length, cap)
    return sums[-1] if sums else 1.0
