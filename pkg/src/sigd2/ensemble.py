"""Ensembles of the weakened rule learner: bagging and SAMME boosting.

Bagging trains each member on a uniform bootstrap resample and combines by
majority vote.  Boosting follows multi-class AdaBoost (SAMME): instance
weights start uniform, each round trains on a weighted resample, the
member's weighted error is measured on the ORIGINAL training set, its vote
weight is ln((1-err)/err) + ln(K-1), and misclassified instances gain
weight for the next round.  The learner has no native support for instance
weights, so the weighted distribution is realized by resampling.

A round whose error is no better than random guessing among K classes
(err >= (K-1)/K) is discarded and redrawn a bounded number of times, after
which training stops with whatever members exist.  A perfect member has its
error floored to keep the vote weight finite and ends training after its
round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random
from typing import Iterable, Sequence

from .classifier import Heuristic, WeakenConfig, predict, train_wsigdirect
from .data import Dataset, bootstrap_sample
from .errors import DataError, TrainingError
from .mining import MiningConfig
from .pruning import PruneConfig, PrunedModel, parse_model, serialize_model

__all__ = [
    "BoostConfig",
    "EnsembleModel",
    "WeightedLearner",
    "acbag_predict",
    "acbag_train",
    "acboost_predict",
    "acboost_train",
    "ensemble_predict",
    "parse_ensemble",
    "serialize_ensemble",
]

MAJORITY_VOTE = "majority-vote"
WEIGHTED_VOTE = "weighted-vote"

#: Seed values handed to sub-steps are drawn from a per-member PRNG in this
#: range; any fixed range works, it only has to be stable.
_SEED_SPAN = 1 << 62


@dataclass(frozen=True)
class WeightedLearner:
    model: PrunedModel
    alpha: float


@dataclass(frozen=True)
class EnsembleModel:
    learners: tuple[WeightedLearner, ...]
    mode: str
    num_classes: int
    heuristic: Heuristic
    eta: int

    def __post_init__(self) -> None:
        if not self.learners:
            raise ValueError("an ensemble needs at least one learner")
        if self.mode not in (MAJORITY_VOTE, WEIGHTED_VOTE):
            raise ValueError(f"unknown ensemble mode {self.mode!r}")
        if self.num_classes < 2:
            raise ValueError("an ensemble needs at least 2 classes")
        if self.eta < 1:
            raise ValueError(f"eta must be >= 1, got {self.eta}")


@dataclass(frozen=True)
class BoostConfig:
    n_estimators: int
    eta: int = 10
    epsilon_floor: float = 1e-10
    max_resample_retries: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_estimators < 1:
            raise ValueError(f"n_estimators must be >= 1, got {self.n_estimators}")
        if self.eta < 1:
            raise ValueError(f"eta must be >= 1, got {self.eta}")
        if not 0.0 < self.epsilon_floor < 1.0:
            raise ValueError("epsilon_floor must be in (0, 1)")
        if self.max_resample_retries < 0:
            raise ValueError("max_resample_retries must be >= 0")


def acbag_train(
    train: Dataset,
    B: int,
    eta: int,
    prune_cfg: PruneConfig | None = None,
    seed: int = 0,
    mining_cfg: MiningConfig | None = None,
    heuristic: Heuristic = Heuristic.S1,
) -> EnsembleModel:
    """Train ``B`` members on uniform bootstrap resamples, vote by majority.

    Member ``b`` draws its resample and splits it internally with seed
    ``seed + b``, so members are independent of training order.
    """
    if B < 1:
        raise ValueError(f"ensemble size must be >= 1, got {B}")
    weaken_cfg = WeakenConfig(eta=eta)
    learners = []
    for b in range(B):
        sample = bootstrap_sample(train, None, seed + b)
        model = train_wsigdirect(
            sample, mining_cfg, prune_cfg, weaken_cfg, seed=seed + b
        )
        learners.append(WeightedLearner(model=model, alpha=1.0))
    return EnsembleModel(
        learners=tuple(learners),
        mode=MAJORITY_VOTE,
        num_classes=train.num_classes,
        heuristic=heuristic,
        eta=eta,
    )


def acbag_predict(
    e: EnsembleModel, instance: Iterable[int], use_counts: bool = False
) -> int:
    if e.mode != MAJORITY_VOTE:
        raise ValueError(f"majority vote asked of a {e.mode} ensemble")
    if not e.learners:
        raise ValueError("cannot predict with an empty ensemble")
    have = frozenset(instance)
    tally = [0] * e.num_classes
    for learner in e.learners:
        tally[predict(learner.model, have, e.heuristic, use_counts)] += 1
    return min(range(e.num_classes), key=lambda c: (-tally[c], c))


def acboost_train(
    train: Dataset,
    cfg: BoostConfig,
    prune_cfg: PruneConfig | None = None,
    mining_cfg: MiningConfig | None = None,
    heuristic: Heuristic = Heuristic.S1,
) -> EnsembleModel:
    """SAMME boosting of the weakened learner; see the module docstring."""
    n = len(train.transactions)
    if n == 0:
        raise DataError("cannot boost on an empty training set")
    K = train.num_classes
    if K < 2:
        raise ValueError("boosting needs at least 2 classes")
    weaken_cfg = WeakenConfig(eta=cfg.eta)
    reject_at = (K - 1) / K
    truth = [t.class_id for t in train.transactions]
    instances = [frozenset(t.items) for t in train.transactions]

    weights = [1.0 / n] * n
    learners: list[WeightedLearner] = []
    stop = False
    for m in range(cfg.n_estimators):
        rng = Random(cfg.seed + m)
        accepted = None
        for _attempt in range(cfg.max_resample_retries + 1):
            sample_seed = rng.randrange(_SEED_SPAN)
            split_seed = rng.randrange(_SEED_SPAN)
            sample = bootstrap_sample(train, weights, sample_seed)
            model = train_wsigdirect(
                sample, mining_cfg, prune_cfg, weaken_cfg, seed=split_seed
            )
            misses = [
                predict(model, inst, heuristic) != label
                for inst, label in zip(instances, truth)
            ]
            err = sum(w for w, miss in zip(weights, misses) if miss)
            if err < reject_at:
                accepted = (model, err, misses)
                break
        if accepted is None:
            break  # no member beat chance; keep what we have
        model, err, misses = accepted
        if err < cfg.epsilon_floor:
            err = cfg.epsilon_floor
            stop = True  # a perfect member would degenerate later rounds
        alpha = math.log((1.0 - err) / err) + math.log(K - 1)
        if not alpha > 0.0:
            raise TrainingError(f"non-positive member weight alpha={alpha!r}")
        learners.append(WeightedLearner(model=model, alpha=alpha))

        bump = math.exp(alpha)
        weights = [
            w * bump if miss else w for w, miss in zip(weights, misses)
        ]
        total = sum(weights)
        weights = [w / total for w in weights]
        if any(w <= 0.0 for w in weights):
            raise TrainingError("instance weight collapsed to zero")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise TrainingError("instance weights lost normalization")
        if stop:
            break
    if not learners:
        raise TrainingError(
            "boosting failed to find a weak learner better than chance"
        )
    return EnsembleModel(
        learners=tuple(learners),
        mode=WEIGHTED_VOTE,
        num_classes=K,
        heuristic=heuristic,
        eta=cfg.eta,
    )


def acboost_predict(
    e: EnsembleModel, instance: Iterable[int], use_counts: bool = False
) -> int:
    if e.mode != WEIGHTED_VOTE:
        raise ValueError(f"weighted vote asked of a {e.mode} ensemble")
    if not e.learners:
        raise ValueError("cannot predict with an empty ensemble")
    have = frozenset(instance)
    score = [0.0] * e.num_classes
    for learner in e.learners:
        score[predict(learner.model, have, e.heuristic, use_counts)] += learner.alpha
    return min(range(e.num_classes), key=lambda c: (-score[c], c))


def ensemble_predict(
    e: EnsembleModel, instance: Iterable[int], use_counts: bool = False
) -> int:
    """Dispatch on the ensemble's voting mode."""
    if e.mode == MAJORITY_VOTE:
        return acbag_predict(e, instance, use_counts)
    return acboost_predict(e, instance, use_counts)


# --------------------------------------------------------------------------
# serialization

def serialize_ensemble(e: EnsembleModel) -> str:
    parts = [
        f"mode={e.mode} K={e.num_classes} "
        f"heuristic={e.heuristic.name} eta={e.eta}\n"
    ]
    for learner in e.learners:
        parts.append(f"alpha={learner.alpha!r}\n")
        parts.append(serialize_model(learner.model))
    return "".join(parts)


def parse_ensemble(text: str) -> EnsembleModel:
    lines = [
        line for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise DataError("empty ensemble text")
    header: dict[str, str] = {}
    for token in lines[0].split():
        key, sep, value = token.partition("=")
        if not sep:
            raise DataError(f"bad ensemble header token {token!r}")
        header[key] = value
    try:
        mode = header["mode"]
        num_classes = int(header["K"])
        heuristic = Heuristic[header["heuristic"]]
        eta = int(header["eta"])
    except (KeyError, ValueError) as exc:
        raise DataError(f"bad ensemble header {lines[0]!r}: {exc}") from None

    learners = []
    i = 1
    while i < len(lines):
        key, sep, value = lines[i].strip().partition("=")
        if key != "alpha" or not sep:
            raise DataError(f"expected alpha=<weight>, got {lines[i]!r}")
        try:
            alpha = float(value)
        except ValueError:
            raise DataError(f"non-numeric learner weight {value!r}") from None
        i += 1
        block: list[str] = []
        while i < len(lines) and not lines[i].strip().startswith("alpha="):
            block.append(lines[i])
            i += 1
        model = parse_model("\n".join(block))
        learners.append(WeightedLearner(model=model, alpha=alpha))
    if not learners:
        raise DataError("ensemble text has no learners")
    try:
        return EnsembleModel(
            learners=tuple(learners),
            mode=mode,
            num_classes=num_classes,
            heuristic=heuristic,
            eta=eta,
        )
    except ValueError as exc:
        raise DataError(str(exc)) from None
