"""Rule-based prediction, the weakened learner, and the training pipeline.

Prediction collects the rules whose antecedents are contained in the
instance, groups them by class, and scores each group with one of three
aggregates: sum of ln p (lower is better), sum of confidence (higher is
better), or sum of ln p times confidence (lower is better).  Group ties go
to the group holding the best single rule under the same aggregate, then to
the smallest class id.  An instance matching nothing gets the fallback
class.

``weaken`` keeps only the strongest few rules per class — deliberately
crippling the model so it can serve as the weak learner inside the
ensembles.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .data import Dataset, split_train_prune
from .mining import Car, MiningConfig, generate_rules
from .pruning import PruneConfig, PrunedModel, two_stage_prune

__all__ = [
    "Heuristic",
    "WeakenConfig",
    "match_rules",
    "predict",
    "render_rule",
    "render_rules",
    "train_sigd2",
    "train_wsigdirect",
    "weaken",
]


class Heuristic(enum.Enum):
    """Group scoring rule used at prediction time."""

    S1 = "sum of ln p, argmin"
    S2 = "sum of confidence, argmax"
    S3 = "sum of ln p times confidence, argmin"


@dataclass(frozen=True)
class WeakenConfig:
    eta: int = 10

    def __post_init__(self) -> None:
        if self.eta < 1:
            raise ValueError(f"eta must be >= 1, got {self.eta}")


def match_rules(model: PrunedModel, instance: Iterable[int]) -> dict[int, list[Car]]:
    """Rules whose antecedent is contained in the instance, keyed by class.

    Group order follows the model order (conf desc, ln_p asc), so the first
    rule of each group is its strongest member.
    """
    have = frozenset(instance)
    groups: dict[int, list[Car]] = {}
    for rule in model.rules:
        if have.issuperset(rule.antecedent):
            groups.setdefault(rule.class_id, []).append(rule)
    return groups


def _term(rule: Car, h: Heuristic, use_counts: bool) -> float:
    if h is Heuristic.S1:
        value = rule.ln_p
    elif h is Heuristic.S2:
        value = rule.conf
    else:
        value = rule.ln_p * rule.conf
    return value * rule.count if use_counts else value


def predict(
    model: PrunedModel,
    instance: Iterable[int],
    h: Heuristic = Heuristic.S1,
    use_counts: bool = False,
) -> int:
    groups = match_rules(model, instance)
    if not groups:
        return model.fallback_class
    # Normalize to "smaller is better" so one min() handles all three.
    flip = -1.0 if h is Heuristic.S2 else 1.0
    best_class = None
    best_key = None
    for class_id, rules in groups.items():
        terms = [flip * _term(r, h, use_counts) for r in rules]
        key = (sum(terms), min(terms), class_id)
        if best_key is None or key < best_key:
            best_key = key
            best_class = class_id
    return best_class


def weaken(model: PrunedModel, cfg: WeakenConfig) -> PrunedModel:
    """Keep the top ``eta`` rules per class (conf desc, ln_p asc, antecedent)."""
    taken: list[Car] = []
    seen: dict[int, int] = {}
    for rule in model.rules:  # model order is exactly the per-class ranking
        kept = seen.get(rule.class_id, 0)
        if kept < cfg.eta:
            taken.append(rule)
            seen[rule.class_id] = kept + 1
    return PrunedModel(rules=tuple(taken), fallback_class=model.fallback_class)


def train_sigd2(
    train: Dataset,
    mining_cfg: MiningConfig | None = None,
    prune_cfg: PruneConfig | None = None,
    seed: int = 0,
    stage2_on_train: bool = False,
) -> PrunedModel:
    """Full pipeline: 2:1 split, rule generation, two-stage pruning.

    The fallback class is the majority class of the mining portion.  With
    ``stage2_on_train`` the stage-2 credit pass scans the whole training
    input instead of only the prune portion.
    """
    mining_cfg = mining_cfg if mining_cfg is not None else MiningConfig()
    prune_cfg = prune_cfg if prune_cfg is not None else PruneConfig()
    plan = split_train_prune(train, seed)
    mine_part = train.subset(plan.train_indices)
    prune_part = train.subset(plan.prune_indices)
    rules = generate_rules(mine_part, mining_cfg)
    return two_stage_prune(
        rules,
        prune_part,
        prune_cfg,
        fallback_class=mine_part.majority_class(),
        stage2_set=train if stage2_on_train else None,
    )


def train_wsigdirect(
    train: Dataset,
    mining_cfg: MiningConfig | None = None,
    prune_cfg: PruneConfig | None = None,
    weaken_cfg: WeakenConfig | None = None,
    seed: int = 0,
) -> PrunedModel:
    """The weak learner: the full pipeline followed by per-class truncation."""
    model = train_sigd2(train, mining_cfg, prune_cfg, seed)
    return weaken(model, weaken_cfg if weaken_cfg is not None else WeakenConfig())


# --------------------------------------------------------------------------
# human-readable rendering

def _split_label(name: str) -> str:
    column, eq, value = name.partition("=")
    return f"({column} = {value})" if eq else f"({name})"


def render_rule(
    rule: Car, item_names: Sequence[str], class_names: Sequence[str]
) -> str:
    left = " and ".join(_split_label(item_names[i]) for i in rule.antecedent)
    right = f"(class = {class_names[rule.class_id]})"
    return (
        f"{left} -> {right}  "
        f"[conf={rule.conf:.4f}, ln_p={rule.ln_p:.4f}, count={rule.count}]"
    )


def render_rules(
    rules: Iterable[Car], item_names: Sequence[str], class_names: Sequence[str]
) -> str:
    return "".join(
        render_rule(r, item_names, class_names) + "\n" for r in rules
    )
