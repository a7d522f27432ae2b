"""Associative classification by statistically significant rules.

The pipeline: mine class association rules whose Fisher exact-test p-value
beats a significance level (redundant and non-minimal rules dropped during
the search), prune them in two stages against a held-out portion of the
training data, and predict by aggregating the matching rules per class.  A
deliberately weakened variant of the learner feeds bagging and SAMME
boosting ensembles, and a benchmark harness provides cross-validation plus
Friedman / Wilcoxon comparisons.
"""

from .bench import (
    ComparisonTable,
    EvalReport,
    FoldResult,
    cross_validate,
    parse_comparison_table,
    render_comparison,
    render_report,
)
from .classifier import (
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
from .data import (
    Dataset,
    SplitPlan,
    Transaction,
    bootstrap_sample,
    encode_csv,
    parse_encoding_map,
    parse_transactions,
    read_csv,
    serialize_encoding_map,
    serialize_transactions,
    split_train_prune,
    stratified_kfold,
)
from .ensemble import (
    BoostConfig,
    EnsembleModel,
    WeightedLearner,
    acbag_predict,
    acbag_train,
    acboost_predict,
    acboost_train,
    ensemble_predict,
    parse_ensemble,
    serialize_ensemble,
)
from .errors import DataError, TrainingError
from .mining import (
    Car,
    MiningConfig,
    generate_rules,
    impossible_items,
    is_redundant,
    parse_rules,
    serialize_rules,
)
from .pruning import (
    PruneConfig,
    PrunedModel,
    parse_model,
    serialize_model,
    stage1_database_coverage,
    stage2_instance_selection,
    two_stage_prune,
)
from .significance import (
    LN_ZERO,
    ContingencyCounts,
    confidence,
    count_contingency,
    exact_tail,
    ln_fisher_p,
    pss_lower_bound,
)
from .stats import (
    accuracy,
    chi_square_sf,
    friedman_test,
    regularized_gamma_q,
    wilcoxon_signed_ranks,
)

__version__ = "0.1.0"
