"""Cross-validation driver, evaluation reports, and comparison tables.

One report covers one (dataset, algorithm) pair: per-fold accuracy, rule
count, and wall seconds, plus the means.  Reports render to a human text
block, a TSV table (`dataset algo fold accuracy n_rules seconds` with a
final mean row), or JSON lines with the same keys.  The TSV/JSON forms keep
full float precision; the text form rounds like a results table.

A comparison table (datasets x algorithms of mean accuracies) feeds the
Friedman test and pairwise Wilcoxon signed-ranks tests.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .classifier import Heuristic, WeakenConfig, predict, train_sigd2, train_wsigdirect
from .data import Dataset, stratified_kfold
from .ensemble import BoostConfig, acbag_train, acboost_train, ensemble_predict
from .errors import DataError
from .mining import MiningConfig
from .pruning import PruneConfig
from .stats import accuracy, friedman_test, wilcoxon_signed_ranks

__all__ = [
    "ALGORITHMS",
    "ComparisonTable",
    "EvalReport",
    "FoldResult",
    "cross_validate",
    "parse_comparison_table",
    "render_comparison",
    "render_report",
]

ALGORITHMS = ("sigd2", "wsigdirect", "acbag", "acboost")


@dataclass(frozen=True)
class FoldResult:
    fold: int
    accuracy: float
    n_rules: int
    seconds: float


@dataclass(frozen=True)
class EvalReport:
    dataset: str
    algo: str
    folds: tuple[FoldResult, ...]
    config: dict = field(compare=False)
    mean_member_rules: float | None = None

    @property
    def mean_accuracy(self) -> float:
        return sum(f.accuracy for f in self.folds) / len(self.folds)

    @property
    def mean_rules(self) -> float:
        return sum(f.n_rules for f in self.folds) / len(self.folds)

    @property
    def mean_seconds(self) -> float:
        return sum(f.seconds for f in self.folds) / len(self.folds)


def _resolve_heuristic(value) -> Heuristic:
    if isinstance(value, Heuristic):
        return value
    return Heuristic[str(value).upper()]


def _resolved_params(params: Mapping | None) -> dict:
    p = dict(params) if params else {}
    out = {
        "alpha": float(p.pop("alpha", 0.05)),
        "conf_threshold": float(p.pop("conf_threshold", 0.50)),
        "heuristic": _resolve_heuristic(p.pop("heuristic", Heuristic.S1)),
        "use_counts": bool(p.pop("use_counts", False)),
        "eta": int(p.pop("eta", 10)),
        "estimators": int(p.pop("estimators", 15)),
        "bag_size": int(p.pop("bag_size", 10)),
        "max_len": p.pop("max_len", None),
        "stage2_on_train": bool(p.pop("stage2_on_train", False)),
    }
    if p:
        raise ValueError(f"unknown parameter(s): {sorted(p)}")
    if out["max_len"] is not None:
        out["max_len"] = int(out["max_len"])
    return out


def _fit(algo: str, train: Dataset, p: dict, seed: int):
    """Train one fold's model; returns (predict_fn, n_rules, member_mean)."""
    mining_cfg = MiningConfig(alpha=p["alpha"], max_antecedent_len=p["max_len"])
    prune_cfg = PruneConfig(conf_threshold=p["conf_threshold"])
    h = p["heuristic"]
    uc = p["use_counts"]
    if algo == "sigd2":
        model = train_sigd2(
            train, mining_cfg, prune_cfg, seed=seed,
            stage2_on_train=p["stage2_on_train"],
        )
        return (lambda inst: predict(model, inst, h, uc)), len(model.rules), None
    if algo == "wsigdirect":
        model = train_wsigdirect(
            train, mining_cfg, prune_cfg, WeakenConfig(eta=p["eta"]), seed=seed
        )
        return (lambda inst: predict(model, inst, h, uc)), len(model.rules), None
    if algo == "acbag":
        e = acbag_train(
            train, B=p["bag_size"], eta=p["eta"], prune_cfg=prune_cfg,
            seed=seed, mining_cfg=mining_cfg, heuristic=h,
        )
    elif algo == "acboost":
        cfg = BoostConfig(n_estimators=p["estimators"], eta=p["eta"], seed=seed)
        e = acboost_train(
            train, cfg, prune_cfg=prune_cfg, mining_cfg=mining_cfg, heuristic=h
        )
    else:
        raise ValueError(f"unknown algorithm {algo!r} (one of {ALGORITHMS})")
    total = sum(len(l.model.rules) for l in e.learners)
    return (
        (lambda inst: ensemble_predict(e, inst, uc)),
        total,
        total / len(e.learners),
    )


def cross_validate(
    d: Dataset,
    algo: str,
    params: Mapping | None = None,
    k: int = 10,
    seed: int = 0,
    dataset_name: str = "data",
    clock: Callable[[], float] | None = None,
) -> EvalReport:
    """Stratified k-fold evaluation of one algorithm on one dataset.

    Fold ``f`` trains with derived seed ``seed + f`` on the other folds and
    is timed around its whole train-plus-predict span.  ``clock`` replaces
    ``time.perf_counter`` where reports must be reproducible byte-for-byte.
    """
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r} (one of {ALGORITHMS})")
    p = _resolved_params(params)
    tick = clock if clock is not None else time.perf_counter
    folds = []
    member_means = []
    for fold_idx, (train_idx, test_idx) in enumerate(stratified_kfold(d, k, seed)):
        train = d.subset(train_idx)
        test = d.subset(test_idx)
        started = tick()
        predict_fn, n_rules, member_mean = _fit(algo, train, p, seed + fold_idx)
        predictions = [predict_fn(t.items) for t in test.transactions]
        elapsed = tick() - started
        folds.append(
            FoldResult(
                fold=fold_idx,
                accuracy=accuracy(predictions, [t.class_id for t in test.transactions]),
                n_rules=n_rules,
                seconds=elapsed,
            )
        )
        if member_mean is not None:
            member_means.append(member_mean)
    config = dict(p)
    config["heuristic"] = p["heuristic"].name
    config.update(k=k, seed=seed)
    return EvalReport(
        dataset=dataset_name,
        algo=algo,
        folds=tuple(folds),
        config=config,
        mean_member_rules=(
            sum(member_means) / len(member_means) if member_means else None
        ),
    )


# --------------------------------------------------------------------------
# report rendering

def _tsv_row(*cells) -> str:
    return "\t".join("" if c is None else str(c) for c in cells)


def render_report(report: EvalReport, fmt: str = "text") -> str:
    if fmt == "tsv":
        lines = [_tsv_row("dataset", "algo", "fold", "accuracy", "n_rules", "seconds")]
        for f in report.folds:
            lines.append(
                _tsv_row(report.dataset, report.algo, f.fold,
                         repr(f.accuracy), f.n_rules, repr(f.seconds))
            )
        lines.append(
            _tsv_row(report.dataset, report.algo, "mean",
                     repr(report.mean_accuracy), repr(report.mean_rules),
                     repr(report.mean_seconds))
        )
        return "\n".join(lines) + "\n"
    if fmt == "json-lines":
        lines = []
        for f in report.folds:
            lines.append(json.dumps({
                "dataset": report.dataset, "algo": report.algo, "fold": f.fold,
                "accuracy": f.accuracy, "n_rules": f.n_rules,
                "seconds": f.seconds,
            }))
        lines.append(json.dumps({
            "dataset": report.dataset, "algo": report.algo, "fold": "mean",
            "accuracy": report.mean_accuracy, "n_rules": report.mean_rules,
            "seconds": report.mean_seconds,
        }))
        return "\n".join(lines) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = [
        f"== {report.dataset} / {report.algo} ==",
        "fold  accuracy%  rules  seconds",
    ]
    for f in report.folds:
        lines.append(
            f"{f.fold:>4}  {100 * f.accuracy:>9.2f}  {f.n_rules:>5}  {f.seconds:.3f}"
        )
    lines.append(
        f"mean  {100 * report.mean_accuracy:>9.2f}  {report.mean_rules:>5.2f}"
        f"  {report.mean_seconds:.3f}"
    )
    if report.mean_member_rules is not None:
        lines.append(f"mean rules per ensemble member: {report.mean_member_rules:.2f}")
    cfg = " ".join(f"{k}={v}" for k, v in sorted(report.config.items()))
    lines.append(f"config: {cfg}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# comparison tables and the statistical report

@dataclass(frozen=True)
class ComparisonTable:
    datasets: tuple[str, ...]
    algorithms: tuple[str, ...]
    accuracies: tuple[tuple[float, ...], ...]  # rows follow ``datasets``

    def __post_init__(self) -> None:
        if len(self.algorithms) < 2:
            raise ValueError("need at least 2 algorithm columns")
        if len(self.accuracies) != len(self.datasets):
            raise ValueError("row count does not match dataset names")
        if any(len(row) != len(self.algorithms) for row in self.accuracies):
            raise ValueError("ragged accuracy table")

    def column(self, j: int) -> list[float]:
        return [row[j] for row in self.accuracies]


def parse_comparison_table(text: str) -> ComparisonTable:
    """Tab-separated table: header `name<TAB>algo...`, one dataset per row."""
    rows = [
        line.split("\t")
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if len(rows) < 2:
        raise DataError("comparison table needs a header row and data rows")
    algorithms = tuple(cell.strip() for cell in rows[0][1:])
    datasets = []
    accuracies = []
    for cells in rows[1:]:
        datasets.append(cells[0].strip())
        try:
            accuracies.append(tuple(float(c) for c in cells[1:]))
        except ValueError:
            raise DataError(f"non-numeric accuracy in row {cells[0]!r}") from None
    try:
        return ComparisonTable(
            datasets=tuple(datasets),
            algorithms=algorithms,
            accuracies=tuple(accuracies),
        )
    except ValueError as exc:
        raise DataError(str(exc)) from None


def render_comparison(table: ComparisonTable, fmt: str = "text") -> str:
    """Friedman over the whole table plus Wilcoxon for each algorithm pair."""
    friedman = None
    if len(table.datasets) >= 2:
        friedman = friedman_test(table.accuracies)
    pair_rows = []
    for i in range(len(table.algorithms)):
        for j in range(i + 1, len(table.algorithms)):
            name = f"{table.algorithms[i]} vs {table.algorithms[j]}"
            a, b = table.column(i), table.column(j)
            try:
                z, p, wins, losses, ties = wilcoxon_signed_ranks(a, b)
                pair_rows.append((name, z, p, wins, losses, ties))
            except ValueError:
                pair_rows.append((name, None, None, 0, 0, len(a)))

    if fmt == "tsv":
        lines = [_tsv_row("test", "pair", "statistic", "p_value",
                          "wins", "losses", "ties")]
        if friedman is not None:
            lines.append(_tsv_row("friedman", "all", repr(friedman[0]),
                                  repr(friedman[1]), None, None, None))
        for name, z, p, wins, losses, ties in pair_rows:
            lines.append(_tsv_row(
                "wilcoxon", name,
                None if z is None else repr(z),
                None if p is None else repr(p),
                wins, losses, ties,
            ))
        return "\n".join(lines) + "\n"
    if fmt == "json-lines":
        lines = []
        if friedman is not None:
            lines.append(json.dumps({
                "test": "friedman", "pair": "all",
                "statistic": friedman[0], "p_value": friedman[1],
            }))
        for name, z, p, wins, losses, ties in pair_rows:
            lines.append(json.dumps({
                "test": "wilcoxon", "pair": name, "statistic": z, "p_value": p,
                "wins": wins, "losses": losses, "ties": ties,
            }))
        return "\n".join(lines) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = [
        f"algorithms: {', '.join(table.algorithms)}",
        f"datasets: {len(table.datasets)}",
    ]
    if friedman is not None:
        lines.append(
            f"friedman: chi2={friedman[0]:.4f} p={friedman[1]:.6f}"
        )
    for name, z, p, wins, losses, ties in pair_rows:
        if z is None:
            lines.append(f"wilcoxon {name}: all differences zero "
                         f"(wins={wins} losses={losses} ties={ties})")
        else:
            lines.append(
                f"wilcoxon {name}: z={z:.4f} p={p:.6f} "
                f"wins={wins} losses={losses} ties={ties}"
            )
    return "\n".join(lines) + "\n"
