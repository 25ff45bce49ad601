"""Consistency repairs: monotone projection and triplet least squares."""

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chancefit.choice_model import risk_disposition
from chancefit.consistency import (
    TripletGamble,
    UnderdeterminedError,
    UtilityPoint,
    isotonic_adjust,
    nl_triplet_fit,
    triplet_objective,
)


def make_points(cs, us):
    return [
        UtilityPoint(c=c, u=u, omega=u - c, disposition=risk_disposition(u - c), method="mle")
        for c, u in zip(cs, us)
    ]


def brute_force_monotone(us, step=1e-3):
    """Exact least-squares monotone fit restricted to a value lattice.

    Dynamic program over lattice levels; the running minimum over the
    previous point's levels enforces the non-decreasing constraint.
    """
    levels = np.arange(0.0, 1.0 + step / 2, step)
    cost = (np.asarray(us[0]) - levels) ** 2
    choices = []
    for u in us[1:]:
        best_prev = np.minimum.accumulate(cost)
        idx = np.zeros(levels.size, dtype=int)
        running = 0
        for k in range(levels.size):
            if cost[k] < cost[running]:
                running = k
            idx[k] = running
        choices.append(idx)
        cost = best_prev + (u - levels) ** 2
    k = int(np.argmin(cost))
    path = [levels[k]]
    for idx in reversed(choices):
        k = idx[k]
        path.append(levels[k])
    return list(reversed(path))


class TestIsotonicAdjust:
    def test_single_violation_pools_last_two(self):
        points = make_points([0.5, 0.6, 0.7, 0.8, 0.9], [0.5, 0.6, 0.7, 0.93, 0.92])
        adjusted = isotonic_adjust(points)
        assert [pt.u for pt in adjusted] == pytest.approx([0.5, 0.6, 0.7, 0.925, 0.925])
        assert [pt.method for pt in adjusted] == ["mle", "mle", "mle", "adjusted", "adjusted"]

    def test_monotone_input_unchanged(self):
        points = make_points([0.2, 0.5, 0.8], [0.1, 0.4, 0.9])
        assert isotonic_adjust(points) == tuple(points)

    def test_interior_violation(self):
        points = make_points([0.2, 0.5, 0.8], [0.5, 0.7, 0.6])
        adjusted = isotonic_adjust(points)
        assert [pt.u for pt in adjusted] == pytest.approx([0.5, 0.65, 0.65])

    def test_duplicate_c_rejected(self):
        points = make_points([0.3, 0.3], [0.2, 0.4])
        with pytest.raises(ValueError, match="strictly increasing"):
            isotonic_adjust(points)

    def test_unsorted_rejected(self):
        points = make_points([0.5, 0.3], [0.2, 0.4])
        with pytest.raises(ValueError, match="strictly increasing"):
            isotonic_adjust(points)

    @given(st.lists(st.floats(min_value=0, max_value=1), min_size=1, max_size=8))
    def test_output_monotone_and_idempotent(self, us):
        cs = np.linspace(0.1, 0.9, len(us))
        adjusted = isotonic_adjust(make_points(cs, us))
        vals = [pt.u for pt in adjusted]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        again = isotonic_adjust(adjusted)
        assert [pt.u for pt in again] == pytest.approx(vals, abs=1e-12)

    @given(st.lists(st.floats(min_value=0, max_value=1), min_size=2, max_size=8))
    def test_pooled_blocks_preserve_means(self, us):
        cs = np.linspace(0.1, 0.9, len(us))
        adjusted = isotonic_adjust(make_points(cs, us))
        assert sum(pt.u for pt in adjusted) == pytest.approx(sum(us), abs=1e-9)

    def test_matches_bruteforce_on_small_lattice(self):
        # Exhaustive check for every sequence of length <= 4 over the
        # five-level value set, against the lattice dynamic program.
        levels = [0.0, 0.25, 0.5, 0.75, 1.0]
        for n in range(1, 5):
            cs = np.linspace(0.2, 0.8, n)
            for us in itertools.product(levels, repeat=n):
                got = [pt.u for pt in isotonic_adjust(make_points(cs, us))]
                brute = brute_force_monotone(list(us))
                assert np.max(np.abs(np.array(got) - np.array(brute))) <= 1e-3
                obj_got = sum((a - b) ** 2 for a, b in zip(got, us))
                obj_brute = sum((a - b) ** 2 for a, b in zip(brute, us))
                assert obj_got <= obj_brute + 1e-9


def consistent_triplets(extended_u):
    """All triplets with the indifference chance implied by a utility vector."""
    n_ext = len(extended_u)
    out = []
    for i, m, k in itertools.combinations(range(n_ext), 3):
        p = (extended_u[m] - extended_u[i]) / (extended_u[k] - extended_u[i])
        out.append(TripletGamble(i=i, m=m, k=k, p=p))
    return out


class TestNlTripletFit:
    def test_recovers_linear_utility(self):
        cs = [0.25, 0.5, 0.75]
        triplets = consistent_triplets([0.0, 0.25, 0.5, 0.75, 1.0])
        points = nl_triplet_fit(cs, triplets)
        for pt, c in zip(points, cs):
            assert pt.u == pytest.approx(c, abs=1e-6)

    def test_single_even_triplet_puts_middle_at_midpoint(self):
        points = nl_triplet_fit([0.5], [TripletGamble(i=0, m=1, k=2, p=0.5)])
        assert points[0].u == pytest.approx(0.5, abs=1e-9)

    def test_inconsistent_pair_is_least_squares_compromise(self):
        triplets = [
            TripletGamble(i=0, m=1, k=2, p=0.4),
            TripletGamble(i=0, m=1, k=2, p=0.6),
        ]
        points = nl_triplet_fit([0.5], triplets)
        u_hat = points[0].u
        # 1-D brute scan of the objective at 1e-4 resolution.
        grid = np.arange(1e-4, 1.0, 1e-4)
        objs = [triplet_objective([0.5], triplets, [u]) for u in grid]
        assert u_hat == pytest.approx(grid[int(np.argmin(objs))], abs=2e-4)
        assert triplet_objective([0.5], triplets, [u_hat]) > 1e-4

    def test_zero_residual_on_consistent_input(self):
        extended = [0.0, 0.04, 0.16, 0.36, 0.64, 1.0]
        points = nl_triplet_fit([0.2, 0.4, 0.6, 0.8], consistent_triplets(extended))
        fitted = [pt.u for pt in points]
        assert triplet_objective([0.2, 0.4, 0.6, 0.8], consistent_triplets(extended), fitted) <= 1e-12

    def test_adding_consistent_triplet_never_raises_objective(self):
        cs = [0.3, 0.6]
        triplets = [
            TripletGamble(i=0, m=1, k=3, p=0.35),
            TripletGamble(i=1, m=2, k=3, p=0.55),
        ]
        points = nl_triplet_fit(cs, triplets)
        before = triplet_objective(cs, triplets, [pt.u for pt in points])
        u_ext = [0.0] + [pt.u for pt in points] + [1.0]
        p_new = (u_ext[2] - u_ext[0]) / (u_ext[3] - u_ext[0])
        extended = triplets + [TripletGamble(i=0, m=2, k=3, p=p_new)]
        refit = nl_triplet_fit(cs, extended)
        after = triplet_objective(cs, extended, [pt.u for pt in refit])
        assert after <= before + 1e-9

    def test_fitted_curve_is_strictly_increasing(self):
        extended = [0.0, 0.1, 0.5, 0.6, 0.95, 1.0]
        points = nl_triplet_fit([0.2, 0.4, 0.6, 0.8], consistent_triplets(extended))
        us = [0.0] + [pt.u for pt in points] + [1.0]
        assert all(b > a for a, b in zip(us, us[1:]))

    def test_uncovered_interior_index_rejected(self):
        with pytest.raises(UnderdeterminedError, match="appear in no triplet"):
            nl_triplet_fit([0.3, 0.6], [TripletGamble(i=0, m=1, k=3, p=0.4)])

    def test_bad_indices_rejected(self):
        with pytest.raises(ValueError):
            TripletGamble(i=2, m=1, k=3, p=0.4)
        with pytest.raises(ValueError):
            TripletGamble(i=0, m=1, k=2, p=1.0)

    def test_index_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="extended range"):
            nl_triplet_fit([0.5], [TripletGamble(i=0, m=1, k=5, p=0.5)])


class TestUtilityPoint:
    def test_inconsistent_offset_rejected(self):
        with pytest.raises(ValueError, match="inconsistent"):
            UtilityPoint(c=0.5, u=0.9, omega=0.1, disposition="averse", method="mle")

    def test_adjusted_points_may_break_offset_consistency(self):
        UtilityPoint(c=0.5, u=0.9, omega=0.1, disposition="averse", method="adjusted")

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            UtilityPoint(c=0.5, u=1.2, omega=0.7, disposition="averse", method="mle")
