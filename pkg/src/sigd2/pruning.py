"""Two-stage rule pruning against a held-out prune set.

Stage 1 is a database-coverage loop with *dynamic* confidences: at each step
every remaining rule's confidence is recomputed over the prune transactions
not yet covered, the best rule is taken (dynamic confidence desc, then ln_p
asc, then antecedent), and the loop stops as soon as the best rule falls
below the confidence threshold.  A taken rule is kept only if it correctly
classifies at least one remaining transaction, and keeping it removes every
remaining transaction its antecedent matches — right or wrong class.

Stage 2 walks the prune transactions once more and, per transaction, credits
the single best kept rule that matches it with the correct class.  Rules
never credited are dropped; the credit tally becomes the rule's ``count``.

Deliberate deviations from the obvious one-pass reading, both load-bearing
for the replay tests: the threshold is tested *before* a rule is admitted
(so no sub-threshold rule ever enters the intermediate list), and stage 2
scans the prune portion, not the mining portion (a flag on the composition
restores the alternative).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .data import Dataset
from .errors import DataError
from .mining import Car, format_rule_line, parse_rule_line

__all__ = [
    "PruneConfig",
    "PrunedModel",
    "parse_model",
    "serialize_model",
    "stage1_database_coverage",
    "stage2_instance_selection",
    "two_stage_prune",
]

#: Global rule order of a pruned model: strongest first.
MODEL_SORT_KEY = lambda r: (-r.conf, r.ln_p, r.antecedent, r.class_id)  # noqa: E731


@dataclass(frozen=True)
class PruneConfig:
    conf_threshold: float = 0.50

    def __post_init__(self) -> None:
        if not 0.0 <= self.conf_threshold <= 1.0:
            raise ValueError(
                f"conf_threshold must be within [0, 1], got {self.conf_threshold}"
            )


@dataclass(frozen=True)
class PrunedModel:
    """Final rule list (every rule selected at least once) plus a fallback.

    ``fallback_class`` answers instances no rule matches.  Rules are kept in
    the canonical strongest-first order (conf desc, ln_p asc, antecedent).
    """

    rules: tuple[Car, ...]
    fallback_class: int

    def __post_init__(self) -> None:
        if self.fallback_class < 0:
            raise ValueError(f"bad fallback class {self.fallback_class}")
        for rule in self.rules:
            if rule.count < 1:
                raise ValueError(
                    f"pruned model holds an unselected rule: {format_rule_line(rule)}"
                )
        keys = [MODEL_SORT_KEY(r) for r in self.rules]
        if keys != sorted(keys):
            raise ValueError("pruned model rules are not in canonical order")


def _antecedent_masks(rules: Sequence[Car], d: Dataset) -> list[int]:
    """Per rule, the bitmask of transactions of ``d`` its antecedent matches."""
    full = (1 << len(d.transactions)) - 1
    out = []
    for rule in rules:
        mask = full
        for item in rule.antecedent:
            mask &= d.item_tids[item]
        out.append(mask)
    return out


def stage1_database_coverage(
    rules: Sequence[Car], prune_set: Dataset, cfg: PruneConfig
) -> list[Car]:
    """Database-coverage selection; returns the kept rules in selection order."""
    working = list(range(len(rules)))
    matched = _antecedent_masks(rules, prune_set)
    correct = [
        m & prune_set.class_tids[rules[i].class_id] for i, m in enumerate(matched)
    ]
    remaining = (1 << len(prune_set.transactions)) - 1
    kept: list[Car] = []
    while working and remaining:
        best_i = None
        best_key = None
        for i in working:
            n_x = (matched[i] & remaining).bit_count()
            dyn = (correct[i] & remaining).bit_count() / n_x if n_x else 0.0
            key = (-dyn, rules[i].ln_p, rules[i].antecedent, rules[i].class_id)
            if best_key is None or key < best_key:
                best_key = key
                best_i = i
        if -best_key[0] < cfg.conf_threshold:
            break
        if (correct[best_i] & remaining).bit_count() >= 1:
            kept.append(rules[best_i])
            remaining &= ~matched[best_i]
        working.remove(best_i)
    return kept


def stage2_instance_selection(
    r_mid: Sequence[Car], prune_set: Dataset, fallback_class: int
) -> PrunedModel:
    """Credit each transaction's best correct matching rule; keep the credited.

    "Best" means highest original (training) confidence, ties by ln_p then
    antecedent.  The credit tally is stored as the rule's ``count``.
    """
    matched = _antecedent_masks(r_mid, prune_set)
    order = sorted(
        range(len(r_mid)),
        key=lambda i: (-r_mid[i].conf, r_mid[i].ln_p, r_mid[i].antecedent,
                       r_mid[i].class_id),
    )
    counts = [0] * len(r_mid)
    for tid, t in enumerate(prune_set.transactions):
        bit = 1 << tid
        for i in order:
            if matched[i] & bit and r_mid[i].class_id == t.class_id:
                counts[i] += 1
                break
    final = sorted(
        (rule.with_count(c) for rule, c in zip(r_mid, counts) if c > 0),
        key=MODEL_SORT_KEY,
    )
    return PrunedModel(rules=tuple(final), fallback_class=fallback_class)


def two_stage_prune(
    rules: Sequence[Car],
    prune_set: Dataset,
    cfg: PruneConfig,
    fallback_class: int,
    stage2_set: Dataset | None = None,
) -> PrunedModel:
    """Stage 1 then stage 2.  ``stage2_set`` overrides the stage-2 scan set."""
    r_mid = stage1_database_coverage(rules, prune_set, cfg)
    return stage2_instance_selection(
        r_mid, prune_set if stage2_set is None else stage2_set, fallback_class
    )


# --------------------------------------------------------------------------
# serialization

def serialize_model(model: PrunedModel) -> str:
    lines = [f"fallback={model.fallback_class}"]
    lines += [format_rule_line(rule) for rule in model.rules]
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> PrunedModel:
    fallback: int | None = None
    rules: list[Car] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if fallback is None:
            key, sep, value = stripped.partition("=")
            if not sep or key != "fallback":
                raise DataError(f"line {lineno}: expected fallback=<class id>")
            try:
                fallback = int(value)
            except ValueError:
                raise DataError(
                    f"line {lineno}: non-integer fallback class {value!r}"
                ) from None
            continue
        try:
            rules.append(parse_rule_line(stripped))
        except DataError as exc:
            raise DataError(f"line {lineno}: {exc}") from None
    if fallback is None:
        raise DataError("model text has no fallback line")
    try:
        return PrunedModel(rules=tuple(rules), fallback_class=fallback)
    except ValueError as exc:
        raise DataError(str(exc)) from None
