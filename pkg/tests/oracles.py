"""Independent reference implementations used to pin expected values.

Everything here favours obviousness over speed: exact rational arithmetic,
brute-force enumeration, straight-line replays.  Nothing imports the
package's own numeric kernels, so agreement between the two sides is
evidence, not tautology.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb


# --------------------------------------------------------------------------
# exact hypergeometric upper tail

def tail_fraction(n: int, n_x: int, n_c: int, n_xc: int) -> Fraction:
    """P[overlap >= n_xc] as an exact rational."""
    total = 0
    for i in range(n_xc, min(n_x, n_c) + 1):
        total += comb(n_c, i) * comb(n - n_c, n_x - i)
    return Fraction(total, comb(n, n_x))


def tail_suffix_numerators(n: int, n_x: int, n_c: int) -> list[int]:
    """numerator of P[overlap >= k] over denominator C(n, n_x), all k.

    Returned list has length min(n_x, n_c) + 2; entry k is the sum of
    hypergeometric numerator terms for overlaps >= k (last entry 0).
    """
    hi = min(n_x, n_c)
    terms = [comb(n_c, i) * comb(n - n_c, n_x - i) for i in range(hi + 1)]
    out = [0] * (hi + 2)
    for k in range(hi, -1, -1):
        out[k] = out[k + 1] + terms[k]
    return out


def purity_bound_fraction(n: int, n_x: int, n_c: int) -> Fraction:
    """Best-case tail if a support-n_x antecedent kept only class rows."""
    if n_x == 0:
        return Fraction(1)
    if n_x > n_c:
        return Fraction(0)
    return Fraction(comb(n_c, n_x), comb(n, n_x))


# --------------------------------------------------------------------------
# definitional rule miner (exhaustive, rational)

def mine_by_definition(
    rows: list[tuple[tuple[int, ...], int]],
    num_items: int,
    num_classes: int,
    alpha: Fraction,
    max_len: int | None = None,
) -> dict[tuple[tuple[int, ...], int], Fraction]:
    """All emitted (antecedent, class) -> exact p, straight from the rules.

    A rule is emitted iff its tail probability is below alpha, no non-empty
    proper subset of its antecedent gives a strictly smaller p for the same
    class, and no such-surviving proper superset gives a strictly smaller p.
    """
    n = len(rows)
    cap = num_items if max_len is None else min(max_len, num_items)
    p_of: dict[tuple[tuple[int, ...], int], Fraction] = {}
    for size in range(1, cap + 1):
        for itemset in combinations(range(num_items), size):
            need = set(itemset)
            matching = [cls for items, cls in rows if need.issubset(items)]
            n_x = len(matching)
            for c in range(num_classes):
                n_c = sum(1 for _, cls in rows if cls == c)
                n_xc = sum(1 for cls in matching if cls == c)
                p_of[(itemset, c)] = tail_fraction(n, n_x, n_c, n_xc)

    significant = {key for key, p in p_of.items() if p < alpha}
    surviving = set()
    for itemset, c in significant:
        p = p_of[(itemset, c)]
        beaten = False
        for size in range(1, len(itemset)):
            for sub in combinations(itemset, size):
                if p_of[(sub, c)] < p:
                    beaten = True
                    break
            if beaten:
                break
        if not beaten:
            surviving.add((itemset, c))
    emitted = {}
    for itemset, c in surviving:
        p = p_of[(itemset, c)]
        blocked = any(
            other_c == c
            and len(other) > len(itemset)
            and set(other) > set(itemset)
            and p_of[(other, other_c)] < p
            for other, other_c in surviving
        )
        if not blocked:
            emitted[(itemset, c)] = p
    return emitted


# --------------------------------------------------------------------------
# straight-line replay of the two-stage pruning

class RuleView:
    """Minimal stand-in: whatever has antecedent/class_id/ln_p/conf."""

    def __init__(self, antecedent, class_id, ln_p, conf):
        self.antecedent = tuple(antecedent)
        self.class_id = class_id
        self.ln_p = ln_p
        self.conf = conf

    def key(self):
        return (self.antecedent, self.class_id)


def prune_by_replay(
    rules,
    prune_rows: list[tuple[tuple[int, ...], int]],
    conf_threshold: float,
):
    """Returns (stage-1 keep order, stage-2 counts dict keyed by rule key)."""
    work = list(rules)
    txs = list(prune_rows)
    kept = []
    while work and txs:
        scored = []
        for r in work:
            matched = [t for t in txs if set(r.antecedent).issubset(t[0])]
            hit = [t for t in matched if t[1] == r.class_id]
            dyn = len(hit) / len(matched) if matched else 0.0
            scored.append(((-dyn, r.ln_p, r.antecedent, r.class_id), r, dyn))
        scored.sort(key=lambda entry: entry[0])
        _, top, dyn = scored[0]
        if dyn < conf_threshold:
            break
        correct = [
            t for t in txs
            if set(top.antecedent).issubset(t[0]) and t[1] == top.class_id
        ]
        if correct:
            kept.append(top)
            txs = [
                t for t in txs if not set(top.antecedent).issubset(t[0])
            ]
        work.remove(top)

    counts: dict[tuple, int] = {}
    for items, cls in prune_rows:
        matches = [
            r for r in kept
            if r.class_id == cls and set(r.antecedent).issubset(items)
        ]
        if not matches:
            continue
        matches.sort(key=lambda r: (-r.conf, r.ln_p, r.antecedent, r.class_id))
        key = (matches[0].antecedent, matches[0].class_id)
        counts[key] = counts.get(key, 0) + 1
    return kept, counts


# --------------------------------------------------------------------------
# rank statistics

def average_ranks_by_counting(values) -> list[float]:
    """Average ranks (1-based, ascending) via the counting identity."""
    ranks = []
    for v in values:
        less = sum(1 for w in values if w < v)
        equal = sum(1 for w in values if w == v)
        ranks.append(less + (equal + 1) / 2)
    return ranks


def friedman_by_hand(table) -> float:
    """Chi-square statistic via per-row rank sums, no mean-rank shortcut."""
    n_rows = len(table)
    k = len(table[0])
    rank_sums = [0.0] * k
    for row in table:
        for j in range(k):
            less = sum(1 for v in row if v > row[j])
            equal = sum(1 for v in row if v == row[j])
            # best accuracy earns rank 1; ties share the average position
            rank_sums[j] += less + (equal + 1) / 2
    mean_ranks = [s / n_rows for s in rank_sums]
    return (12.0 * n_rows / (k * (k + 1))) * (
        sum(r * r for r in mean_ranks) - k * (k + 1) ** 2 / 4.0
    )
