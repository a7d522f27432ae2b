"""Command-line front end.

Subcommands:

* ``mine``         transaction file -> significant rule list
* ``train``        transaction file -> serialized model (any algorithm)
* ``predict``      model + instance file -> one class id per line
* ``cv``           cross-validated evaluation report
* ``compare``      mean-accuracy table -> Friedman / Wilcoxon report
* ``render-rules`` rule list or model + encoding map -> readable rules
* ``encode``       categorical CSV -> transaction file + encoding map

File arguments accept ``-`` for stdin.  Ids in a transaction file are
remapped to dense 0-based ids for training (a file that already uses dense
ids is unchanged); instance files for ``predict`` are taken verbatim in the
model's id space.

Exit codes: 0 success, 2 usage problems, 3 bad input data, 4 training
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (
    ALGORITHMS,
    cross_validate,
    parse_comparison_table,
    render_comparison,
    render_report,
)
from .classifier import Heuristic, WeakenConfig, predict, render_rules, train_sigd2, train_wsigdirect
from .data import (
    parse_encoding_map,
    parse_transactions,
    read_csv,
    serialize_encoding_map,
    serialize_transactions,
)
from .ensemble import (
    BoostConfig,
    acbag_train,
    acboost_train,
    ensemble_predict,
    parse_ensemble,
    serialize_ensemble,
)
from .errors import DataError, TrainingError
from .mining import MiningConfig, generate_rules, parse_rules, serialize_rules
from .pruning import PruneConfig, parse_model, serialize_model

__all__ = ["build_parser", "main"]


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _add_mining_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.05,
                   help="significance level (default 0.05)")
    p.add_argument("--max-len", type=int, default=None, metavar="N",
                   help="cap on antecedent length (default unlimited)")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    _add_mining_flags(p)
    p.add_argument("--conf-threshold", type=float, default=0.50,
                   help="pruning confidence threshold (default 0.5)")
    p.add_argument("--heuristic", choices=["s1", "s2", "s3"], default="s1",
                   help="prediction scoring rule (default s1)")
    p.add_argument("--use-counts", action="store_true",
                   help="weight prediction terms by rule selection counts")
    p.add_argument("--eta", type=int, default=10,
                   help="rules kept per class in the weak learner (default 10)")
    p.add_argument("--estimators", type=int, default=15,
                   help="boosting rounds (default 15)")
    p.add_argument("--bag-size", type=int, default=10,
                   help="bagging ensemble size (default 10)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--stage2-on-train", action="store_true",
                   help="run the stage-2 credit pass over the full training "
                        "set instead of the prune portion")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigd2",
        description="Statistically significant associative classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="mine significant rules from transactions")
    p.add_argument("input", help="transaction file (- for stdin)")
    _add_mining_flags(p)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("train", help="train and serialize a model")
    p.add_argument("input", help="transaction file (- for stdin)")
    p.add_argument("--algo", choices=list(ALGORITHMS), default="sigd2")
    _add_model_flags(p)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("predict", help="classify instances with a saved model")
    p.add_argument("input", help="instance file: item ids per line (- for stdin)")
    p.add_argument("--model", required=True, help="serialized model file")
    p.add_argument("--heuristic", choices=["s1", "s2", "s3"], default="s1",
                   help="scoring rule for plain models (ensembles carry "
                        "their own; default s1)")
    p.add_argument("--use-counts", action="store_true")
    p.add_argument("--labeled", action="store_true",
                   help="lines end with a true class id; report accuracy too")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("cv", help="cross-validated evaluation")
    p.add_argument("input", help="transaction file (- for stdin)")
    p.add_argument("--algo", choices=list(ALGORITHMS), default="sigd2")
    _add_model_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--format", choices=["text", "tsv", "json-lines"],
                   default="text")
    p.add_argument("--clock", choices=["wall", "fixed"], default="wall",
                   help="fixed reports 0.0 seconds, for reproducible bytes")
    p.add_argument("--name", default=None,
                   help="dataset name in the report (default: file stem)")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("compare", help="statistical comparison of a table")
    p.add_argument("input", help="accuracy table: name<TAB>algo columns")
    p.add_argument("--format", choices=["text", "tsv", "json-lines"],
                   default="text")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("render-rules", help="rules through an encoding map")
    p.add_argument("input", help="rule list or model file (- for stdin)")
    p.add_argument("--map", required=True, dest="map_file",
                   help="encoding map file (from `encode --map-out`)")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("encode", help="categorical CSV to transactions")
    p.add_argument("input", help="CSV file with a header row (- for stdin)")
    p.add_argument("--class-column", required=True)
    p.add_argument("--map-out", default=None,
                   help="also write the id/label map to this file")
    p.add_argument("-o", "--output", default=None)

    return parser


def _parse_instances(
    text: str, labeled: bool
) -> tuple[list[tuple[int, ...]], list[int]]:
    instances: list[tuple[int, ...]] = []
    truth: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            tokens = [int(tok) for tok in stripped.split()]
        except ValueError:
            raise DataError(f"line {lineno}: non-integer token") from None
        if any(t < 0 for t in tokens):
            raise DataError(f"line {lineno}: negative id")
        if labeled:
            if len(tokens) < 1:
                raise DataError(f"line {lineno}: missing class label")
            truth.append(tokens.pop())
        instances.append(tuple(sorted(set(tokens))))
    if not instances:
        raise DataError("no instances found")
    return instances, truth


def _cv_params(args: argparse.Namespace) -> dict:
    return {
        "alpha": args.alpha,
        "conf_threshold": args.conf_threshold,
        "heuristic": args.heuristic,
        "use_counts": args.use_counts,
        "eta": args.eta,
        "estimators": args.estimators,
        "bag_size": args.bag_size,
        "max_len": args.max_len,
        "stage2_on_train": args.stage2_on_train,
    }


def _cmd_mine(args: argparse.Namespace) -> int:
    d = parse_transactions(_read(args.input))
    rules = generate_rules(
        d, MiningConfig(alpha=args.alpha, max_antecedent_len=args.max_len)
    )
    _write(args.output, serialize_rules(rules))
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    d = parse_transactions(_read(args.input))
    mining_cfg = MiningConfig(alpha=args.alpha, max_antecedent_len=args.max_len)
    prune_cfg = PruneConfig(conf_threshold=args.conf_threshold)
    h = Heuristic[args.heuristic.upper()]
    if args.algo == "sigd2":
        model = train_sigd2(d, mining_cfg, prune_cfg, seed=args.seed,
                            stage2_on_train=args.stage2_on_train)
        out = serialize_model(model)
    elif args.algo == "wsigdirect":
        model = train_wsigdirect(d, mining_cfg, prune_cfg,
                                 WeakenConfig(eta=args.eta), seed=args.seed)
        out = serialize_model(model)
    elif args.algo == "acbag":
        e = acbag_train(d, B=args.bag_size, eta=args.eta, prune_cfg=prune_cfg,
                        seed=args.seed, mining_cfg=mining_cfg, heuristic=h)
        out = serialize_ensemble(e)
    else:
        cfg = BoostConfig(n_estimators=args.estimators, eta=args.eta,
                          seed=args.seed)
        e = acboost_train(d, cfg, prune_cfg=prune_cfg, mining_cfg=mining_cfg,
                          heuristic=h)
        out = serialize_ensemble(e)
    _write(args.output, out)
    return 0


def _first_payload_line(text: str) -> str:
    for line in text.splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            return stripped
    return ""


def _cmd_predict(args: argparse.Namespace) -> int:
    model_text = _read(args.model)
    instances, truth = _parse_instances(_read(args.input), args.labeled)
    head = _first_payload_line(model_text)
    if head.startswith("mode="):
        e = parse_ensemble(model_text)
        predictions = [
            ensemble_predict(e, inst, args.use_counts) for inst in instances
        ]
    else:
        model = parse_model(model_text)
        h = Heuristic[args.heuristic.upper()]
        predictions = [
            predict(model, inst, h, args.use_counts) for inst in instances
        ]
    lines = [str(p) for p in predictions]
    if args.labeled:
        hits = sum(1 for p, t in zip(predictions, truth) if p == t)
        lines.append(f"# accuracy={hits / len(truth)!r}")
    _write(args.output, "\n".join(lines) + "\n")
    return 0


def _cmd_cv(args: argparse.Namespace) -> int:
    d = parse_transactions(_read(args.input))
    name = args.name
    if name is None:
        name = "data" if args.input == "-" else Path(args.input).stem
    report = cross_validate(
        d,
        args.algo,
        _cv_params(args),
        k=args.folds,
        seed=args.seed,
        dataset_name=name,
        clock=(lambda: 0.0) if args.clock == "fixed" else None,
    )
    _write(args.output, render_report(report, args.format))
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    table = parse_comparison_table(_read(args.input))
    _write(args.output, render_comparison(table, args.format))
    return 0


def _cmd_render_rules(args: argparse.Namespace) -> int:
    text = _read(args.input)
    item_names, class_names = parse_encoding_map(_read(args.map_file))
    head = _first_payload_line(text)
    if head.startswith("mode="):
        raise DataError("render-rules expects a rule list or a plain model, "
                        "not an ensemble")
    rules = parse_model(text).rules if head.startswith("fallback=") \
        else parse_rules(text)
    for rule in rules:
        if rule.class_id >= len(class_names) or (
            rule.antecedent and rule.antecedent[-1] >= len(item_names)
        ):
            raise DataError("rule ids exceed the encoding map")
    _write(args.output, render_rules(rules, item_names, class_names))
    return 0


def _cmd_encode(args: argparse.Namespace) -> int:
    d = read_csv(_read(args.input), args.class_column)
    _write(args.output, serialize_transactions(d))
    if args.map_out:
        _write(args.map_out, serialize_encoding_map(d))
    return 0


_COMMANDS = {
    "mine": _cmd_mine,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "cv": _cmd_cv,
    "compare": _cmd_compare,
    "render-rules": _cmd_render_rules,
    "encode": _cmd_encode,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage/help
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TrainingError as exc:
        print(f"training error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
