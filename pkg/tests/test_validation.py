"""Word-level oracles: state enumeration, product form, balance, truncated sums."""

from __future__ import annotations

import random

import pytest

from matchq import (
    ResourceCapError,
    check_partial_balance,
    compute_psi,
    enumerate_independent_sets,
    enumerate_states,
    load,
    mask_of,
    product_form_measure,
    truncated_aggregate,
    truncated_partial_sums,
)
from matchq.validation import is_feasible_word

from .conftest import random_stable_rates


def subsets_of(mask: int):
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


class TestEnumerateStates:
    def test_fig1_length_one(self, fig1):
        space = enumerate_states(fig1, 1)
        assert set(space.words) == {(), (0,), (1,), (2,), (3,)}

    def test_fig1_length_two(self, fig1):
        space = enumerate_states(fig1, 2)
        two = {w for w in space.words if len(w) == 2}
        assert two == {
            (0, 3), (3, 0), (1, 3), (3, 1), (0, 0), (1, 1), (2, 2), (3, 3),
        }

    def test_triangle_length_three(self, triangle):
        space = enumerate_states(triangle, 3)
        assert set(space.words) == {
            (),
            (0,), (1,), (2,),
            (0, 0), (1, 1), (2, 2),
            (0, 0, 0), (1, 1, 1), (2, 2, 2),
        }

    def test_prefix_closed_and_feasible(self, fig1):
        space = enumerate_states(fig1, 4)
        listed = set(space.words)
        for word in space.words:
            assert is_feasible_word(fig1, word)
            if word:
                assert word[:-1] in listed

    def test_closed_under_feasible_extension(self, fig1):
        space = enumerate_states(fig1, 3)
        listed = set(space.words)
        for word in space.words:
            if len(word) == 3:
                continue
            present = mask_of(word)
            for c in range(fig1.n):
                extended = word + (c,)
                addable = not (fig1.neighborhood(present) >> c) & 1
                assert (extended in listed) == addable

    def test_cap(self, c9):
        with pytest.raises(ResourceCapError):
            enumerate_states(c9, 6, cap=500)


class TestProductFormMeasure:
    def test_empty_word(self, triangle, uniform3):
        assert product_form_measure(triangle, uniform3, ()) == 1.0

    def test_triangle_singletons(self, triangle, uniform3):
        assert product_form_measure(triangle, uniform3, (0,)) == pytest.approx(0.5)
        assert product_form_measure(triangle, uniform3, (0, 0)) == pytest.approx(0.25)

    def test_infeasible_rejected(self, triangle, uniform3):
        with pytest.raises(ValueError, match="not feasible"):
            product_form_measure(triangle, uniform3, (0, 1))

    def test_prefix_factor_identity_exact(self, fig1, fig1_degree_rates):
        # Each word's measure is exactly its prefix's measure times one factor.
        for word in enumerate_states(fig1, 5).words:
            if not word:
                continue
            value = product_form_measure(fig1, fig1_degree_rates, word)
            prefix = product_form_measure(fig1, fig1_degree_rates, word[:-1])
            env = fig1.neighborhood(mask_of(word))
            factor = fig1_degree_rates.alpha[word[-1]] / fig1_degree_rates.of_set(env)
            assert value == prefix * factor  # bitwise: same operation order


class TestPartialBalance:
    def test_empty_word_boundary(self, triangle, uniform3):
        residual1, residual2 = check_partial_balance(triangle, uniform3, ())
        assert residual1 is None
        assert set(residual2) == {0, 1, 2}
        assert max(residual2.values()) <= 1e-12

    def test_residuals_small_on_fixtures(self, fig1, triangle):
        rng = random.Random(42)
        for g in (fig1, triangle):
            for _ in range(5):
                rates = random_stable_rates(g, rng)
                for word in enumerate_states(g, 4).words:
                    r1, r2 = check_partial_balance(g, rates, word)
                    if r1 is not None:
                        assert r1 <= 1e-12
                    for value in r2.values():
                        assert value <= 1e-12

    def test_insertion_positions_hand_case(self, triangle, uniform3):
        # Word (1); class 1 can be re-inserted before or after; both terms count.
        _, residual2 = check_partial_balance(triangle, uniform3, (0,))
        assert residual2[0] <= 1e-15


class TestTruncatedSums:
    def test_triangle_geometric(self, triangle, uniform3):
        sums = truncated_partial_sums(triangle, uniform3, mask_of([0]), 5)
        assert sums == pytest.approx((0.5, 0.75, 0.875, 0.9375, 0.96875))

    def test_zero_rate_class_gives_zero(self, fig1, fig1_opt_rates):
        assert truncated_aggregate(fig1, fig1_opt_rates, mask_of([3]), 10) == 0.0
        assert truncated_aggregate(fig1, fig1_opt_rates, mask_of([0, 3]), 10) == 0.0

    def test_monotone_and_below_psi(self, fig1, fig1_degree_rates):
        idx = enumerate_independent_sets(fig1)
        psi = compute_psi(fig1, fig1_degree_rates, idx)
        for mask in idx.sets[1:]:
            sums = truncated_partial_sums(fig1, fig1_degree_rates, mask, 14)
            assert all(b >= a for a, b in zip(sums, sums[1:]))
            assert sums[-1] <= psi[idx.index_of(mask)] + 1e-15

    def test_tail_bound(self, fig1, triangle, fig1_degree_rates, uniform3):
        for g, rates in ((fig1, fig1_degree_rates), (triangle, uniform3)):
            idx = enumerate_independent_sets(g)
            psi = compute_psi(g, rates, idx)
            for mask in idx.sets[1:]:
                k = 14
                total = truncated_aggregate(g, rates, mask, k)
                target = psi[idx.index_of(mask)]
                r = max(load(g, rates, sub) for sub in subsets_of(mask))
                bound = target * r ** (k - mask.bit_count()) / (1 - r)
                assert target - total <= bound + 1e-15

    def test_cap(self, fig1, fig1_degree_rates):
        with pytest.raises(ResourceCapError):
            truncated_partial_sums(fig1, fig1_degree_rates, mask_of([0, 3]), 30, cap=100)
