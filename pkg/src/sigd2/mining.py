"""Mining of significant, non-redundant, minimal class association rules.

The search walks an enumeration tree whose items are ordered by ascending
support (ties by id), so each candidate antecedent is generated exactly once
as an ordered chain of extensions.  Two sound cuts keep the tree small:

* a child is dropped for a class when even a perfectly pure refinement of it
  could not reach significance (purity lower bound vs alpha), and
* a child is dropped for a class when that same bound cannot beat the best
  p-value already achieved by one of its chain ancestors — every rule in the
  subtree would then be shadowed by a strictly better sub-rule.

Survivors are evaluated into a candidate table, and a final pass keeps the
rules that are significant, not shadowed by any strictly better sub-rule
(non-redundant), and not shadowed by any strictly better non-redundant
super-rule (minimal).  Comparisons that land within 1e-12 on the ln scale
are re-decided in exact rational arithmetic, so boundary cases (for example
a p-value exactly equal to alpha) never depend on float rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .data import Dataset
from .errors import DataError
from .significance import (
    ContingencyCounts,
    exact_tail,
    ln_fisher_p,
    pss_lower_bound,
)

__all__ = [
    "Car",
    "MiningConfig",
    "format_rule_line",
    "generate_rules",
    "impossible_items",
    "is_redundant",
    "parse_rule_line",
    "parse_rules",
    "serialize_rules",
]

# Width of the "too close to call in floats" band on the ln-p scale.  The
# tail computation is accurate to well under this, so any pair of values
# whose difference exceeds the band is ordered correctly by plain float
# comparison; anything inside it is settled exactly.
_TIE_BAND = 1e-12


@dataclass(frozen=True)
class Car:
    """A class association rule ``antecedent -> class_id`` with its stats.

    ``conf`` must equal ``support_xc / support_x`` exactly; ``count`` is the
    number of times the pruning stage selected the rule (0 until then).
    """

    antecedent: tuple[int, ...]
    class_id: int
    ln_p: float
    conf: float
    support_x: int
    support_xc: int
    count: int = 0

    def __post_init__(self) -> None:
        if not self.antecedent:
            raise ValueError("rule antecedent must be non-empty")
        if any(b <= a for a, b in zip(self.antecedent, self.antecedent[1:])):
            raise ValueError(f"antecedent not sorted/unique: {self.antecedent}")
        if self.ln_p > 0.0:
            raise ValueError(f"ln_p must be <= 0, got {self.ln_p}")
        if self.support_x < 1 or not 0 <= self.support_xc <= self.support_x:
            raise ValueError(
                f"bad supports: support_x={self.support_x}, "
                f"support_xc={self.support_xc}"
            )
        if self.conf != self.support_xc / self.support_x:
            raise ValueError(
                f"conf={self.conf!r} does not equal "
                f"{self.support_xc}/{self.support_x}"
            )
        if self.count < 0:
            raise ValueError(f"negative selection count {self.count}")

    @classmethod
    def from_counts(
        cls,
        antecedent: Iterable[int],
        class_id: int,
        ln_p: float,
        support_x: int,
        support_xc: int,
        count: int = 0,
    ) -> "Car":
        """Build a rule, deriving ``conf`` from the support counts."""
        return cls(
            antecedent=tuple(sorted(antecedent)),
            class_id=class_id,
            ln_p=ln_p,
            conf=support_xc / support_x,
            support_x=support_x,
            support_xc=support_xc,
            count=count,
        )

    def with_count(self, count: int) -> "Car":
        return replace(self, count=count)


@dataclass(frozen=True)
class MiningConfig:
    alpha: float = 0.05
    max_antecedent_len: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.max_antecedent_len is not None and self.max_antecedent_len < 1:
            raise ValueError("max_antecedent_len must be >= 1 when given")


def _pss_passes(sup: int, n: int, n_c: int, alpha: float, ln_alpha: float) -> bool:
    """Could any refinement with support <= sup be significant for the class?"""
    bound = pss_lower_bound(n, sup, n_c)
    if bound < ln_alpha - _TIE_BAND:
        return True
    if bound > ln_alpha + _TIE_BAND:
        return False
    # Boundary: the bound is a single binomial ratio, compare it exactly.
    return Fraction(math.comb(n_c, sup), math.comb(n, sup)) < Fraction(alpha)


def _significant(ln_p: float, n: int, n_x: int, n_c: int, n_xc: int,
                 alpha: float, ln_alpha: float) -> bool:
    if ln_p < ln_alpha - _TIE_BAND:
        return True
    if ln_p > ln_alpha + _TIE_BAND:
        return False
    return exact_tail(n, n_x, n_c, n_xc) < Fraction(alpha)


def _strictly_better(
    a: tuple[float, int, int], b: tuple[float, int, int], n: int, n_c: int
) -> bool:
    """Is candidate ``a``'s p-value strictly below ``b``'s?

    Entries are ``(ln_p, support_x, support_xc)`` for the same class, hence
    the same ``(n, n_c)`` margins.  Identical tables are equal by
    construction; near-ties between different tables are settled exactly.
    """
    if a[0] < b[0] - _TIE_BAND:
        return True
    if a[0] > b[0] + _TIE_BAND:
        return False
    if a[1:] == b[1:]:
        return False
    return exact_tail(n, a[1], n_c, a[2]) < exact_tail(n, b[1], n_c, b[2])


def impossible_items(d: Dataset, cfg: MiningConfig) -> frozenset[int]:
    """Items that cannot occur in any significant rule for any class.

    An item whose purity bound already misses alpha for every class can be
    removed outright: supersets only lose support, and the bound is monotone
    in support.
    """
    n = len(d.transactions)
    if n == 0:
        return frozenset(range(d.num_items))
    ln_alpha = math.log(cfg.alpha)
    out = []
    for i in range(d.num_items):
        sup = d.item_support[i]
        if not any(
            _pss_passes(sup, n, n_c, cfg.alpha, ln_alpha)
            for n_c in d.class_support
        ):
            out.append(i)
    return frozenset(out)


def generate_rules(train: Dataset, cfg: MiningConfig) -> list[Car]:
    """Mine every significant, non-redundant, minimal rule of ``train``.

    Output is sorted by (ln_p ascending, antecedent, class id) and contains
    at most one rule per (antecedent, class) pair.  A dataset whose
    transactions all share one class yields an empty list: no association
    can be significant without contrast.
    """
    n = len(train.transactions)
    if n == 0:
        raise DataError("cannot mine an empty training set")
    alpha = cfg.alpha
    ln_alpha = math.log(alpha)
    max_len = cfg.max_antecedent_len

    excluded = impossible_items(train, cfg)
    items = sorted(
        (i for i in range(train.num_items) if i not in excluded),
        key=lambda i: (train.item_support[i], i),
    )
    # Classes absent from the data can never be significant (p = 1 always).
    init_alive = {
        c: math.inf for c in range(train.num_classes) if train.class_support[c] > 0
    }

    # (class_id, antecedent) -> (ln_p, support_x, support_xc) for every
    # candidate that survived the tree cuts.
    table: dict[tuple[int, frozenset[int]], tuple[float, int, int]] = {}

    item_tids = train.item_tids
    class_tids = train.class_tids
    class_support = train.class_support
    full_mask = (1 << n) - 1
    stack: list[tuple[tuple[int, ...], int, int, dict[int, float]]] = [
        ((), full_mask, 0, init_alive)
    ]
    while stack:
        prefix, mask, start, alive = stack.pop()
        for pos in range(start, len(items)):
            item = items[pos]
            child_mask = mask & item_tids[item]
            sup = child_mask.bit_count()
            if sup == 0:
                continue
            child = prefix + (item,)
            child_alive: dict[int, float] = {}
            key_set: frozenset[int] | None = None
            for c, chain_best in alive.items():
                n_c = class_support[c]
                bound = pss_lower_bound(n, sup, n_c)
                # Every rule in this subtree would be shadowed by the chain
                # ancestor that achieved chain_best; the band errs towards
                # keeping (the final filter is authoritative).
                if bound > chain_best + _TIE_BAND:
                    continue
                if not _pss_passes(sup, n, n_c, alpha, ln_alpha):
                    continue
                n_xc = (child_mask & class_tids[c]).bit_count()
                lp = ln_fisher_p(ContingencyCounts(n, sup, n_c, n_xc))
                if key_set is None:
                    key_set = frozenset(child)
                table[(c, key_set)] = (lp, sup, n_xc)
                child_alive[c] = lp if lp < chain_best else chain_best
            if child_alive and (max_len is None or len(child) < max_len):
                stack.append((child, child_mask, pos + 1, child_alive))

    # Final filtering over the candidate table.
    # 1. significance
    significant: dict[tuple[int, frozenset[int]], tuple[float, int, int]] = {
        key: entry
        for key, entry in table.items()
        if _significant(entry[0], n, entry[1], class_support[key[0]],
                        entry[2], alpha, ln_alpha)
    }
    # 2. non-redundancy: no strictly better evaluated proper sub-rule
    clean: dict[tuple[int, frozenset[int]], tuple[float, int, int]] = {}
    for (c, xs), entry in significant.items():
        n_c = class_support[c]
        shadowed = False
        for size in range(1, len(xs)):
            for sub in combinations(sorted(xs), size):
                hit = table.get((c, frozenset(sub)))
                if hit is not None and _strictly_better(hit, entry, n, n_c):
                    shadowed = True
                    break
            if shadowed:
                break
        if not shadowed:
            clean[(c, xs)] = entry
    # 3. minimality: no strictly better non-redundant proper super-rule
    by_class: dict[int, list[tuple[frozenset[int], tuple[float, int, int]]]] = {}
    for (c, xs), entry in clean.items():
        by_class.setdefault(c, []).append((xs, entry))
    rules: list[Car] = []
    for c, members in by_class.items():
        n_c = class_support[c]
        for xs, entry in members:
            blocked = any(
                len(ys) > len(xs)
                and ys > xs
                and _strictly_better(other, entry, n, n_c)
                for ys, other in members
            )
            if not blocked:
                rules.append(
                    Car.from_counts(xs, c, entry[0], entry[1], entry[2])
                )
    rules.sort(key=lambda r: (r.ln_p, r.antecedent, r.class_id))
    return rules


def is_redundant(
    candidate: Car, evaluated: Mapping[tuple[int, frozenset[int]], Car]
) -> bool:
    """Does a strictly better proper sub-rule of ``candidate`` exist?

    ``evaluated`` is keyed by ``(class_id, frozenset(antecedent))`` and must
    hold the already-evaluated shorter rules of the same class.  Plain float
    comparison of ln_p; the miner itself additionally breaks exact ties in
    rational arithmetic.
    """
    xs = candidate.antecedent
    for size in range(1, len(xs)):
        for sub in combinations(xs, size):
            hit = evaluated.get((candidate.class_id, frozenset(sub)))
            if hit is not None and hit.ln_p < candidate.ln_p:
                return True
    return False


# --------------------------------------------------------------------------
# rule list serialization (shared with the pruned-model format)

def format_rule_line(car: Car) -> str:
    items = " ".join(map(str, car.antecedent))
    return (
        f"{items} -> {car.class_id} ln_p={car.ln_p:.17g} conf={car.conf!r} "
        f"n_x={car.support_x} n_xc={car.support_xc} count={car.count}"
    )


def parse_rule_line(line: str) -> Car:
    head, sep, tail = line.partition(" -> ")
    if not sep:
        raise DataError(f"rule line missing '->': {line!r}")
    try:
        antecedent = tuple(int(tok) for tok in head.split())
    except ValueError:
        raise DataError(f"non-integer antecedent item in {line!r}") from None
    fields = tail.split()
    if len(fields) != 6:
        raise DataError(f"expected class and 5 key=value fields: {line!r}")
    expected = ("ln_p", "conf", "n_x", "n_xc", "count")
    values: dict[str, str] = {}
    for wanted, field in zip(expected, fields[1:]):
        key, eq, value = field.partition("=")
        if not eq or key != wanted:
            raise DataError(f"expected field {wanted}= in {line!r}")
        values[key] = value
    try:
        car = Car(
            antecedent=antecedent,
            class_id=int(fields[0]),
            ln_p=float(values["ln_p"]),
            conf=float(values["conf"]),
            support_x=int(values["n_x"]),
            support_xc=int(values["n_xc"]),
            count=int(values["count"]),
        )
    except ValueError as exc:
        raise DataError(f"bad rule line {line!r}: {exc}") from None
    return car


def serialize_rules(rules: Iterable[Car]) -> str:
    return "".join(format_rule_line(car) + "\n" for car in rules)


def parse_rules(text: str) -> list[Car]:
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            rules.append(parse_rule_line(stripped))
        except DataError as exc:
            raise DataError(f"line {lineno}: {exc}") from None
    return rules
