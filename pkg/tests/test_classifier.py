"""Tests for prediction heuristics, weakening, and end-to-end training."""

import random

import pytest

from sigd2.classifier import (
    Heuristic,
    WeakenConfig,
    match_rules,
    predict,
    render_rule,
    render_rules,
    train_sigd2,
    train_wsigdirect,
    weaken,
)
from sigd2.data import split_train_prune
from sigd2.mining import Car, MiningConfig, generate_rules
from sigd2.pruning import MODEL_SORT_KEY, PruneConfig, PrunedModel

from datagen import random_dataset


def model_of(*rules, fallback=0):
    ordered = tuple(sorted(rules, key=MODEL_SORT_KEY))
    return PrunedModel(ordered, fallback)


def heuristic_fixture():
    # class sums over instance (0, 1, 2):
    #   ln p:        class0 -10   class1 -8    class2 -8
    #   confidence:  class0 0.2   class1 1.8   class2 1.0
    #   ln p * conf: class0 -2    class1 -7.2  class2 -8
    r0 = Car.from_counts((0,), 0, -10.0, 5, 1, count=1)
    r1a = Car.from_counts((1,), 1, -4.0, 10, 9, count=3)
    r1b = Car.from_counts((2,), 1, -4.0, 10, 9, count=1)
    r2 = Car.from_counts((0, 1), 2, -8.0, 4, 4, count=1)
    return model_of(r0, r1a, r1b, r2, fallback=2)


def test_each_heuristic_picks_a_different_class():
    m = heuristic_fixture()
    inst = (0, 1, 2)
    assert predict(m, inst, Heuristic.S1) == 0
    assert predict(m, inst, Heuristic.S2) == 1
    assert predict(m, inst, Heuristic.S3) == 2


def test_use_counts_scales_each_rule_contribution():
    m = heuristic_fixture()
    # class1 gains 3 * (-4) + (-4) = -16, overtaking class0's -10
    assert predict(m, (0, 1, 2), Heuristic.S1, use_counts=True) == 1


def test_match_rules_groups_by_class_in_model_order():
    m = heuristic_fixture()
    groups = match_rules(m, (0, 1, 2))
    assert set(groups) == {0, 1, 2}
    assert [r.antecedent for r in groups[1]] == [(1,), (2,)]
    assert match_rules(m, ()) == {}


def test_tied_sums_fall_back_to_best_single_rule():
    # equal ln-p sums (-8); class 0 owns the single strongest rule
    ra = Car.from_counts((0,), 0, -8.0, 2, 1, count=1)
    rb = Car.from_counts((1,), 1, -4.0, 2, 1, count=1)
    rc = Car.from_counts((2,), 1, -4.0, 2, 1, count=1)
    assert predict(model_of(ra, rb, rc), (0, 1, 2), Heuristic.S1) == 0

    # equal confidence sums (1.0); class 1 owns the single highest rule
    sa = Car.from_counts((0,), 0, -1.0, 10, 3, count=1)
    sb = Car.from_counts((1,), 0, -1.0, 10, 7, count=1)
    sc = Car.from_counts((2,), 1, -1.0, 4, 4, count=1)
    assert predict(model_of(sa, sb, sc), (0, 1, 2), Heuristic.S2) == 1


def test_full_tie_resolved_to_smallest_class_id():
    ra = Car.from_counts((0,), 1, -5.0, 2, 1, count=1)
    rb = Car.from_counts((1,), 0, -5.0, 2, 1, count=1)
    m = model_of(ra, rb, fallback=1)
    for h in Heuristic:
        assert predict(m, (0, 1), h) == 0


def test_no_matching_rule_uses_fallback():
    m = heuristic_fixture()
    assert predict(m, (), Heuristic.S1) == 2
    assert predict(PrunedModel((), 1), (0, 5), Heuristic.S2) == 1


# --------------------------------------------------------------------------
# weakening

def test_weaken_keeps_first_eta_rules_per_class():
    w1 = Car.from_counts((0,), 0, -9.0, 3, 3, count=1)
    w2 = Car.from_counts((1,), 0, -5.0, 10, 9, count=1)
    w3 = Car.from_counts((2,), 0, -5.0, 10, 8, count=2)
    v1 = Car.from_counts((3,), 1, -7.0, 3, 3, count=1)
    v2 = Car.from_counts((4,), 1, -2.0, 2, 1, count=1)
    m = model_of(w1, w2, w3, v1, v2, fallback=0)
    thin = weaken(m, WeakenConfig(eta=2))
    assert [(r.antecedent, r.class_id) for r in thin.rules] == [
        ((0,), 0), ((3,), 1), ((1,), 0), ((4,), 1),
    ]
    assert thin.fallback_class == m.fallback_class
    assert weaken(m, WeakenConfig(eta=10)) == m


def test_weaken_config_validation():
    with pytest.raises(ValueError):
        WeakenConfig(eta=0)


# --------------------------------------------------------------------------
# training

def test_train_sigd2_composition():
    rng = random.Random(83)
    for _ in range(10):
        d = random_dataset(rng, max_rows=30)
        seed = rng.randrange(100)
        model = train_sigd2(d, seed=seed)
        plan = split_train_prune(d, seed)
        mine_part = d.subset(plan.train_indices)
        assert model.fallback_class == mine_part.majority_class()
        mined = {
            (r.antecedent, r.class_id)
            for r in generate_rules(mine_part, MiningConfig())
        }
        assert {(r.antecedent, r.class_id) for r in model.rules} <= mined


def test_train_sigd2_deterministic_per_seed():
    d = random_dataset(random.Random(5), max_rows=30)
    assert train_sigd2(d, seed=3) == train_sigd2(d, seed=3)


def test_stage2_on_train_recounts_on_the_full_training_set():
    rng = random.Random(97)
    differed = False
    for _ in range(40):
        d = random_dataset(rng, max_rows=30)
        base = train_sigd2(d, seed=1)
        full = train_sigd2(d, seed=1, stage2_on_train=True)
        assert {r.antecedent for r in full.rules} >= set()
        if not base.rules:
            continue
        base_total = sum(r.count for r in base.rules)
        full_total = sum(r.count for r in full.rules)
        # counting over the whole training set can only see more instances
        assert full_total >= base_total
        if (base_total, [r.antecedent for r in base.rules]) != (
            full_total, [r.antecedent for r in full.rules]
        ):
            differed = True
    assert differed


def test_train_wsigdirect_is_train_then_weaken():
    rng = random.Random(103)
    for _ in range(10):
        d = random_dataset(rng, max_rows=30)
        got = train_wsigdirect(d, weaken_cfg=WeakenConfig(eta=1), seed=2)
        want = weaken(train_sigd2(d, seed=2), WeakenConfig(eta=1))
        assert got == want


# --------------------------------------------------------------------------
# rendering

def test_render_rule_exact_format():
    r = Car.from_counts((0, 1), 0, -8.00739, 3, 3, count=3)
    out = render_rule(r, ["color=red", "size=big"], ["yes"])
    assert out == (
        "(color = red) and (size = big) -> (class = yes)"
        "  [conf=1.0000, ln_p=-8.0074, count=3]"
    )


def test_render_rules_one_line_per_rule():
    a = Car.from_counts((0,), 0, -2.0, 4, 3, count=1)
    b = Car.from_counts((1,), 1, -3.0, 4, 4, count=2)
    text = render_rules([a, b], ["x=1", "y=2"], ["no", "yes"])
    lines = text.splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("(x = 1) ->")
    assert lines[1].startswith("(y = 2) ->")
