"""Transaction datasets: parsing, CSV encoding, splits, folds, resampling.

File format (one transaction per line)::

    item item item ... class

All tokens are integers, the last one is the class id, ``#`` starts a
comment line and blank lines are ignored.  Parsing remaps the ids found in
the file onto dense 0-based ranges (sorted original order); the original
tokens are kept as names for reporting.

Transaction-id sets are kept as int bitmasks (bit t = transaction t), which
makes support counting and coverage bookkeeping cheap enough that the rest
of the package never needs an array library.
"""

from __future__ import annotations

import csv
import io
from bisect import bisect_right
from dataclasses import dataclass
from random import Random
from typing import Iterable, Mapping, Sequence

from .errors import DataError

__all__ = [
    "Dataset",
    "SplitPlan",
    "Transaction",
    "bootstrap_sample",
    "encode_csv",
    "parse_encoding_map",
    "parse_transactions",
    "read_csv",
    "serialize_encoding_map",
    "serialize_transactions",
    "split_train_prune",
    "stratified_kfold",
]


@dataclass(frozen=True)
class Transaction:
    """One record: a sorted tuple of distinct item ids plus a class id."""

    items: tuple[int, ...]
    class_id: int


class Dataset:
    """Immutable transaction collection over dense item/class universes.

    ``num_items``/``num_classes`` describe the id universe, which may be
    wider than what the transactions actually touch (subsets and bootstrap
    samples keep their parent's universe so ids stay meaningful).
    ``item_names``/``class_names`` map dense ids back to the original
    tokens or ``column=value`` labels; they are reporting metadata and do
    not take part in equality.
    """

    __slots__ = (
        "transactions",
        "num_items",
        "num_classes",
        "item_support",
        "class_support",
        "item_tids",
        "class_tids",
        "item_names",
        "class_names",
    )

    def __init__(
        self,
        transactions: Iterable[Transaction],
        num_items: int | None = None,
        num_classes: int | None = None,
        item_names: Sequence[str] | None = None,
        class_names: Sequence[str] | None = None,
    ) -> None:
        txs = tuple(transactions)
        max_item = max((t.items[-1] for t in txs if t.items), default=-1)
        max_class = max((t.class_id for t in txs), default=-1)
        self.transactions = txs
        self.num_items = num_items if num_items is not None else max_item + 1
        self.num_classes = num_classes if num_classes is not None else max_class + 1
        if max_item >= self.num_items:
            raise ValueError(f"item id {max_item} outside universe of {self.num_items}")
        if max_class >= self.num_classes or (txs and max_class < 0):
            raise ValueError(f"class id {max_class} outside universe of {self.num_classes}")

        item_support = [0] * self.num_items
        class_support = [0] * self.num_classes
        item_tids = [0] * self.num_items
        class_tids = [0] * self.num_classes
        for tid, t in enumerate(txs):
            bit = 1 << tid
            for i in t.items:
                item_support[i] += 1
                item_tids[i] |= bit
            class_support[t.class_id] += 1
            class_tids[t.class_id] |= bit
        self.item_support = item_support
        self.class_support = class_support
        self.item_tids = item_tids
        self.class_tids = class_tids
        self.item_names = list(item_names) if item_names is not None else None
        self.class_names = list(class_names) if class_names is not None else None

    def __len__(self) -> int:
        return len(self.transactions)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.transactions == other.transactions
            and self.num_items == other.num_items
            and self.num_classes == other.num_classes
        )

    def __hash__(self) -> int:  # consistent with __eq__
        return hash((self.transactions, self.num_items, self.num_classes))

    def __repr__(self) -> str:
        return (
            f"Dataset({len(self.transactions)} transactions, "
            f"{self.num_items} items, {self.num_classes} classes)"
        )

    def subset(self, indices: Iterable[int]) -> "Dataset":
        """New dataset over the same universe, keeping ``indices`` in order."""
        txs = self.transactions
        return Dataset(
            (txs[i] for i in indices),
            num_items=self.num_items,
            num_classes=self.num_classes,
            item_names=self.item_names,
            class_names=self.class_names,
        )

    def majority_class(self) -> int:
        """Most frequent class id; ties go to the smallest id."""
        best = 0
        for c in range(1, self.num_classes):
            if self.class_support[c] > self.class_support[best]:
                best = c
        return best


@dataclass(frozen=True)
class SplitPlan:
    """Index lists of a train/prune split (both ascending)."""

    train_indices: tuple[int, ...]
    prune_indices: tuple[int, ...]


def parse_transactions(text: str) -> Dataset:
    """Parse the transaction file format into a dense-id :class:`Dataset`."""
    raw: list[tuple[tuple[int, ...], int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            tokens = [int(tok) for tok in stripped.split()]
        except ValueError:
            raise DataError(f"line {lineno}: non-integer token in {stripped!r}") from None
        if any(tok < 0 for tok in tokens):
            raise DataError(f"line {lineno}: negative id in {stripped!r}")
        *items, class_id = tokens
        raw.append((tuple(sorted(set(items))), class_id))
    if not raw:
        raise DataError("no transactions found")

    item_ids = sorted({i for items, _ in raw for i in items})
    class_ids = sorted({c for _, c in raw})
    item_map = {orig: dense for dense, orig in enumerate(item_ids)}
    class_map = {orig: dense for dense, orig in enumerate(class_ids)}
    return Dataset(
        (
            Transaction(tuple(item_map[i] for i in items), class_map[c])
            for items, c in raw
        ),
        num_items=len(item_ids),
        num_classes=len(class_ids),
        item_names=[str(i) for i in item_ids],
        class_names=[str(c) for c in class_ids],
    )


def serialize_transactions(d: Dataset) -> str:
    """Canonical text form: dense ids, items ascending, class last."""
    lines = [
        " ".join([*map(str, t.items), str(t.class_id)]) for t in d.transactions
    ]
    return "\n".join(lines) + "\n"


def encode_csv(rows: Iterable[Mapping[str, str]], class_column: str) -> Dataset:
    """Encode categorical CSV rows as transactions.

    Every distinct ``(column, value)`` pair becomes an item (first-appearance
    order, row-major), every distinct class label a class id.  The labels are
    retained as ``column=value`` item names and plain class names.
    """
    item_ids: dict[tuple[str, str], int] = {}
    class_ids: dict[str, int] = {}
    txs: list[Transaction] = []
    for rowno, row in enumerate(rows, start=1):
        if class_column not in row:
            raise DataError(f"row {rowno}: missing class column {class_column!r}")
        items = []
        for col, value in row.items():
            if col == class_column:
                continue
            key = (col, value)
            if key not in item_ids:
                item_ids[key] = len(item_ids)
            items.append(item_ids[key])
        label = row[class_column]
        if label not in class_ids:
            class_ids[label] = len(class_ids)
        txs.append(Transaction(tuple(sorted(set(items))), class_ids[label]))
    if not txs:
        raise DataError("no rows found")
    return Dataset(
        txs,
        num_items=len(item_ids),
        num_classes=len(class_ids),
        item_names=[f"{col}={value}" for col, value in item_ids],
        class_names=list(class_ids),
    )


def read_csv(text: str, class_column: str) -> Dataset:
    """Convenience wrapper: CSV text with a header row -> :func:`encode_csv`."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise DataError("empty csv input")
    return encode_csv(reader, class_column)


def serialize_encoding_map(d: Dataset) -> str:
    """Id-to-label map file: ``id<TAB>label`` lines in two commented sections."""
    if d.item_names is None or d.class_names is None:
        raise ValueError("dataset carries no encoding names")
    lines = ["# items"]
    lines += [f"{i}\t{name}" for i, name in enumerate(d.item_names)]
    lines.append("# classes")
    lines += [f"{c}\t{name}" for c, name in enumerate(d.class_names)]
    return "\n".join(lines) + "\n"


def parse_encoding_map(text: str) -> tuple[list[str], list[str]]:
    """Parse the encoding-map file back into (item_names, class_names)."""
    sections: dict[str, list[tuple[int, str]]] = {"items": [], "classes": []}
    current: list[tuple[int, str]] | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            name = stripped.lstrip("#").strip()
            if name in sections:
                current = sections[name]
            continue
        if current is None:
            raise DataError(f"line {lineno}: entry before a section header")
        ident, sep, label = stripped.partition("\t")
        if not sep:
            raise DataError(f"line {lineno}: expected id<TAB>label")
        try:
            idx = int(ident)
        except ValueError:
            raise DataError(f"line {lineno}: non-integer id {ident!r}") from None
        current.append((idx, label))

    def dense(pairs: list[tuple[int, str]], kind: str) -> list[str]:
        pairs.sort()
        if [i for i, _ in pairs] != list(range(len(pairs))):
            raise DataError(f"{kind} ids are not dense 0..{len(pairs) - 1}")
        return [label for _, label in pairs]

    return dense(sections["items"], "item"), dense(sections["classes"], "class")


def split_train_prune(d: Dataset, seed: int) -> SplitPlan:
    """Shuffle and split: first 2/3 (rounded up) train, floor(n/3) prune."""
    n = len(d.transactions)
    if n < 3:
        raise DataError(f"need at least 3 transactions to split, got {n}")
    order = list(range(n))
    Random(seed).shuffle(order)
    n_prune = n // 3
    return SplitPlan(
        train_indices=tuple(sorted(order[: n - n_prune])),
        prune_indices=tuple(sorted(order[n - n_prune:])),
    )


def stratified_kfold(
    d: Dataset, k: int, seed: int
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """k stratified (train, test) index splits.

    Per class the test counts across folds differ by at most one, so fold
    sizes differ by at most the number of classes.
    """
    n = len(d.transactions)
    if k < 2:
        raise DataError(f"need at least 2 folds, got {k}")
    if k > n:
        raise DataError(f"cannot make {k} folds from {n} transactions")
    rng = Random(seed)
    fold_test: list[list[int]] = [[] for _ in range(k)]
    for c in range(d.num_classes):
        members = [i for i, t in enumerate(d.transactions) if t.class_id == c]
        rng.shuffle(members)
        base, extra = divmod(len(members), k)
        pos = 0
        for f in range(k):
            take = base + (1 if f < extra else 0)
            fold_test[f].extend(members[pos: pos + take])
            pos += take
    out = []
    for f in range(k):
        test = sorted(fold_test[f])
        test_set = set(test)
        train = tuple(i for i in range(n) if i not in test_set)
        out.append((train, tuple(test)))
    return out


def bootstrap_sample(
    d: Dataset, weights: Sequence[float] | None, seed: int
) -> Dataset:
    """n draws with replacement, uniform or by the given weight vector.

    Passing ``None`` and passing explicit uniform weights produce the same
    sample for the same seed (a single sampling path is used for both).
    """
    n = len(d.transactions)
    if n == 0:
        raise ValueError("cannot resample an empty dataset")
    if weights is None:
        weights = [1.0 / n] * n
    else:
        if len(weights) != n:
            raise ValueError(f"{len(weights)} weights for {n} transactions")
        if any(w < 0 for w in weights):
            raise ValueError("negative sampling weight")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {sum(weights)!r}, expected 1")
    cumulative = []
    acc = 0.0
    for w in weights:
        acc += w
        cumulative.append(acc)
    rng = Random(seed)
    last = n - 1
    indices = [min(bisect_right(cumulative, rng.random()), last) for _ in range(n)]
    return d.subset(indices)
