"""Tests for the rank-based comparison statistics."""

import math
import random

import pytest

from sigd2.stats import (
    accuracy,
    chi_square_sf,
    friedman_test,
    regularized_gamma_q,
    wilcoxon_signed_ranks,
)

from oracles import average_ranks_by_counting, friedman_by_hand


# --------------------------------------------------------------------------
# accuracy

def test_accuracy_basic():
    assert accuracy([1, 0, 1, 1], [1, 0, 0, 1]) == 0.75
    assert accuracy([2], [2]) == 1.0


def test_accuracy_validation():
    with pytest.raises(ValueError):
        accuracy([1, 2], [1])
    with pytest.raises(ValueError):
        accuracy([], [])


# --------------------------------------------------------------------------
# gamma tail

def test_regularized_gamma_q_matches_high_precision():
    import mpmath

    mpmath.mp.dps = 50
    for s in (0.5, 1.0, 1.5, 2.0, 3.5, 5.0, 10.0, 25.0):
        for x in (1e-6, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 80.0):
            want = float(mpmath.gammainc(s, a=x, regularized=True))
            got = regularized_gamma_q(s, x)
            assert abs(got - want) <= 1e-12 * max(want, 1e-300) + 1e-15, (s, x)


def test_regularized_gamma_q_limits():
    assert regularized_gamma_q(2.0, 0.0) == 1.0
    assert 0.0 <= regularized_gamma_q(1.0, 700.0) < 1e-300


def test_chi_square_sf_closed_forms():
    # two degrees of freedom: exp(-x/2); four: (1 + x/2) exp(-x/2)
    for x in (0.0, 0.5, 1.0, 2.5, 8.0, 20.0):
        assert math.isclose(
            chi_square_sf(x, 2), math.exp(-x / 2), rel_tol=1e-12, abs_tol=0
        )
        assert math.isclose(
            chi_square_sf(x, 4),
            (1 + x / 2) * math.exp(-x / 2),
            rel_tol=1e-12,
            abs_tol=0,
        )
    # one degree of freedom: erfc(sqrt(x/2))
    for x in (0.1, 1.0, 4.0, 9.0):
        assert math.isclose(
            chi_square_sf(x, 1),
            math.erfc(math.sqrt(x / 2)),
            rel_tol=1e-12,
            abs_tol=0,
        )


# --------------------------------------------------------------------------
# Friedman

def test_friedman_strict_order_four_by_three():
    table = [
        [0.9, 0.8, 0.7],
        [0.95, 0.85, 0.6],
        [0.7, 0.6, 0.5],
        [0.99, 0.9, 0.1],
    ]
    stat, p = friedman_test(table)
    # every row ranks the columns 1, 2, 3
    assert abs(stat - 8.0) <= 1e-9
    assert math.isclose(p, chi_square_sf(8.0, 2), rel_tol=1e-12)


def test_friedman_matches_hand_rank_sums_with_ties():
    rng = random.Random(37)
    for _ in range(50):
        n = rng.randint(2, 12)
        k = rng.randint(2, 6)
        table = [
            [rng.choice((0.5, 0.6, 0.7, 0.8, 0.9)) for _ in range(k)]
            for _ in range(n)
        ]
        stat, p = friedman_test(table)
        assert math.isclose(
            stat, friedman_by_hand(table), rel_tol=0, abs_tol=1e-9
        )
        assert math.isclose(p, chi_square_sf(stat, k - 1), rel_tol=1e-12)


def test_friedman_validation():
    with pytest.raises(ValueError):
        friedman_test([[0.9, 0.8]])  # one row is not a comparison
    with pytest.raises(ValueError):
        friedman_test([[0.9], [0.8]])  # one column
    with pytest.raises(ValueError):
        friedman_test([[0.9, 0.8], [0.7]])  # ragged


# --------------------------------------------------------------------------
# Wilcoxon

def test_wilcoxon_all_positive_differences():
    z, p, wins, losses, ties = wilcoxon_signed_ranks(
        list(range(1, 11)), [0] * 10
    )
    # T = 0, n = 10: z = -27.5 / sqrt(96.25)
    want_z = -27.5 / math.sqrt(96.25)
    assert math.isclose(z, want_z, rel_tol=0, abs_tol=1e-12)
    assert math.isclose(p, math.erfc(abs(want_z) / math.sqrt(2)), rel_tol=1e-12)
    assert (wins, losses, ties) == (10, 0, 0)


def test_wilcoxon_drops_zero_differences():
    a = [1.0, 2.0, 3.0, 5.0, 5.0]
    b = [0.0, 1.0, 2.0, 5.0, 5.0]
    z, p, wins, losses, ties = wilcoxon_signed_ranks(a, b)
    z3, p3, w3, l3, t3 = wilcoxon_signed_ranks([1.0, 2.0, 3.0], [0.0, 1.0, 2.0])
    assert (z, p) == (z3, p3)
    assert (wins, losses, ties) == (3, 0, 2)
    assert (w3, l3, t3) == (3, 0, 0)


def test_wilcoxon_hand_example_with_tied_magnitudes():
    # differences: +1, -1, +2, +3 -> |d| ranks 1.5, 1.5, 3, 4
    a = [2.0, 1.0, 4.0, 6.0]
    b = [1.0, 2.0, 2.0, 3.0]
    z, p, wins, losses, ties = wilcoxon_signed_ranks(a, b)
    t_plus = 1.5 + 3 + 4
    t_minus = 1.5
    t = min(t_plus, t_minus)
    n = 4
    mean = n * (n + 1) / 4
    sd = math.sqrt(n * (n + 1) * (2 * n + 1) / 24)
    assert math.isclose(z, (t - mean) / sd, rel_tol=0, abs_tol=1e-12)
    assert (wins, losses, ties) == (3, 1, 0)


def test_wilcoxon_symmetric_in_argument_order():
    rng = random.Random(41)
    a = [rng.random() for _ in range(12)]
    b = [rng.random() for _ in range(12)]
    za, pa, wa, la, ta = wilcoxon_signed_ranks(a, b)
    zb, pb, wb, lb, tb = wilcoxon_signed_ranks(b, a)
    assert math.isclose(za, zb, rel_tol=0, abs_tol=1e-12)
    assert math.isclose(pa, pb, rel_tol=0, abs_tol=1e-12)
    assert (wa, la) == (lb, wb)
    assert ta == tb


def test_wilcoxon_rejects_all_zero_differences():
    with pytest.raises(ValueError):
        wilcoxon_signed_ranks([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        wilcoxon_signed_ranks([1.0], [1.0, 2.0])


def test_average_ranks_oracle_self_check():
    assert average_ranks_by_counting([3.0, 1.0, 2.0]) == [3.0, 1.0, 2.0]
    assert average_ranks_by_counting([5.0, 5.0, 1.0]) == [2.5, 2.5, 1.0]
