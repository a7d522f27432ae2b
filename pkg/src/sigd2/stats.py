"""Rank-based comparison statistics for classifier benchmarks.

Friedman's test ranks the algorithms within each dataset (rank 1 = best,
average ranks on ties) and asks whether the mean ranks could plausibly be
equal; its statistic is referred to a chi-square tail.  Wilcoxon's
signed-ranks test compares two algorithms across datasets by ranking the
absolute accuracy differences (zero differences dropped) and referring the
smaller signed rank sum to a normal tail.

Neither distribution tail needs a numerics dependency: the chi-square tail
is a regularized incomplete gamma function (series in one regime, a Lentz
continued fraction in the other) and the normal tail is ``erfc``.
"""

from __future__ import annotations

import math
from typing import Sequence

__all__ = [
    "accuracy",
    "chi_square_sf",
    "friedman_test",
    "regularized_gamma_q",
    "wilcoxon_signed_ranks",
]


def accuracy(predictions: Sequence[int], truth: Sequence[int]) -> float:
    if len(predictions) != len(truth):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions, {len(truth)} labels"
        )
    if not predictions:
        raise ValueError("accuracy of an empty prediction list is undefined")
    hits = sum(1 for p, t in zip(predictions, truth) if p == t)
    return hits / len(predictions)


def regularized_gamma_q(s: float, x: float) -> float:
    """Q(s, x) = Γ(s, x) / Γ(s), the upper regularized incomplete gamma.

    Series expansion of P for x < s + 1, modified-Lentz continued fraction
    for Q otherwise; both converge to near machine precision in this
    parameter range (s = df/2 of a chi-square test, x moderate).
    """
    if s <= 0.0:
        raise ValueError(f"shape must be positive, got {s}")
    if x < 0.0:
        raise ValueError(f"argument must be non-negative, got {x}")
    if x == 0.0:
        return 1.0
    log_front = -x + s * math.log(x) - math.lgamma(s)
    if x < s + 1.0:
        term = 1.0 / s
        total = term
        k = s
        while True:
            k += 1.0
            term *= x / k
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        return max(0.0, 1.0 - total * math.exp(log_front))
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        a = -i * (i - s)
        b += 2.0
        d = a * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + a / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return min(1.0, math.exp(log_front) * h)


def chi_square_sf(x: float, df: int) -> float:
    """Upper-tail probability of a chi-square variable with ``df`` dof."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    return regularized_gamma_q(df / 2.0, x / 2.0)


def _average_ranks(values: Sequence[float]) -> list[float]:
    """Ranks 1..n for ascending ``values``; tied entries share the mean rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        shared = (i + j) / 2 + 1  # mean of positions i..j, 1-based
        for pos in range(i, j + 1):
            ranks[order[pos]] = shared
        i = j + 1
    return ranks


def friedman_test(table: Sequence[Sequence[float]]) -> tuple[float, float]:
    """Friedman chi-square over rows = datasets, columns = algorithms.

    Rank 1 goes to the highest accuracy in a row.  Returns the statistic and
    its chi-square upper-tail p-value with k-1 degrees of freedom.
    """
    n_rows = len(table)
    if n_rows < 2:
        raise ValueError("need at least 2 datasets to compare")
    k = len(table[0])
    if k < 2:
        raise ValueError("need at least 2 algorithms to compare")
    if any(len(row) != k for row in table):
        raise ValueError("ragged accuracy table")
    rank_sums = [0.0] * k
    for row in table:
        # negate so the best (largest) accuracy gets rank 1
        for j, r in enumerate(_average_ranks([-v for v in row])):
            rank_sums[j] += r
    mean_ranks = [s / n_rows for s in rank_sums]
    stat = (12.0 * n_rows / (k * (k + 1))) * (
        sum(r * r for r in mean_ranks) - k * (k + 1) ** 2 / 4.0
    )
    return stat, chi_square_sf(stat, k - 1)


def wilcoxon_signed_ranks(
    a: Sequence[float], b: Sequence[float]
) -> tuple[float, float, int, int, int]:
    """Signed-ranks comparison of paired accuracies.

    Returns ``(z, p, wins, losses, ties)`` where wins count datasets with
    a > b.  Ties are dropped before ranking; |differences| get average ranks;
    the statistic is the smaller of the positive/negative rank sums, so z is
    never positive.  The p-value is the two-sided normal tail.
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    diffs = [x - y for x, y in zip(a, b)]
    wins = sum(1 for d in diffs if d > 0)
    losses = sum(1 for d in diffs if d < 0)
    ties = len(diffs) - wins - losses
    nonzero = [d for d in diffs if d != 0]
    if not nonzero:
        raise ValueError("no informative pairs: all differences are zero")
    ranks = _average_ranks([abs(d) for d in nonzero])
    t_plus = sum(r for r, d in zip(ranks, nonzero) if d > 0)
    t_minus = sum(r for r, d in zip(ranks, nonzero) if d < 0)
    t = min(t_plus, t_minus)
    n = len(nonzero)
    mean = n * (n + 1) / 4.0
    sd = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0)
    z = (t - mean) / sd
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return z, p, wins, losses, ties
