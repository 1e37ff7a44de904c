"""Tabular ingestion: schema-driven CSV loading, scaling, one-hot encoding, folds.

Numeric features are min-max scaled to [0, 1] using bounds from the full
dataset, so the input box is fixed across folds (the small leakage this
implies is a deliberate trade for a stable solver domain). Categorical
features are one-hot expanded and appended after the numeric block; one-hot
columns are never monotone features. Rows with missing cells are dropped and
counted.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SchemaError
from .network import (
    BINARY_LOGIT,
    DECREASING,
    INCREASING,
    REGRESSION,
    InputBox,
    MonotoneFeature,
    MonotoneSpec,
)
from .training import LabeledDataset

KIND_NUMERIC = "numeric"
KIND_CATEGORICAL = "categorical"
KIND_TARGET = "target"

MISSING_TOKENS = frozenset({"", "?"})


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    kind: str
    monotone_direction: str | None = None

    def __post_init__(self):
        if self.kind not in (KIND_NUMERIC, KIND_CATEGORICAL, KIND_TARGET):
            raise SchemaError(f"columns[{self.name}].kind", f"unknown kind {self.kind!r}")
        if self.monotone_direction is not None:
            if self.kind != KIND_NUMERIC:
                raise SchemaError(
                    f"columns[{self.name}].monotone",
                    "monotone direction is only allowed on numeric columns",
                )
            if self.monotone_direction not in (INCREASING, DECREASING):
                raise SchemaError(
                    f"columns[{self.name}].monotone",
                    f"must be {INCREASING!r} or {DECREASING!r}",
                )


def validate_schema(columns) -> tuple[ColumnSchema, ...]:
    columns = tuple(columns)
    names = [c.name for c in columns]
    if len(set(names)) != len(names):
        raise SchemaError("columns", "duplicate column names")
    targets = [c for c in columns if c.kind == KIND_TARGET]
    if len(targets) != 1:
        raise SchemaError("columns", f"exactly one target column required, found {len(targets)}")
    return columns


@dataclass(frozen=True)
class FeatureScale:
    name: str
    lo: float
    hi: float

    def normalize(self, values):
        span = self.hi - self.lo
        if span == 0.0:
            return np.zeros_like(np.asarray(values, dtype=float))
        return (np.asarray(values, dtype=float) - self.lo) / span

    def denormalize(self, values):
        return self.lo + np.asarray(values, dtype=float) * (self.hi - self.lo)


@dataclass(frozen=True)
class NormalizationParams:
    """Invertible transforms: feature min-max bounds plus target mean/scale.

    target_mean/target_scale are None for classification targets, which pass
    through untouched.
    """

    features: tuple[FeatureScale, ...]
    target_mean: float | None
    target_scale: float | None

    def normalize_target(self, values):
        if self.target_mean is None:
            return np.asarray(values, dtype=float)
        return (np.asarray(values, dtype=float) - self.target_mean) / self.target_scale

    def denormalize_target(self, values):
        if self.target_mean is None:
            return np.asarray(values, dtype=float)
        return np.asarray(values, dtype=float) * self.target_scale + self.target_mean


def denormalize_prediction(value, params: NormalizationParams):
    """Inverse of the target transform; identity for classification."""
    out = params.denormalize_target(value)
    return float(out) if np.ndim(value) == 0 else out


@dataclass(frozen=True)
class LoadedData:
    dataset: LabeledDataset
    normalization: NormalizationParams
    input_box: InputBox
    monotone_spec: MonotoneSpec
    feature_names: tuple[str, ...]
    n_dropped: int


def _parse_cell(raw: str, row_num: int, col_name: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise SchemaError(
            f"row {row_num}, column {col_name!r}", f"cell {raw!r} does not parse as a number"
        ) from None


def load_csv(source, schema, output_kind: str = REGRESSION) -> LoadedData:
    """Read an RFC-4180 CSV (header row required) into a normalized dataset.

    source may be a path or an open text file. The header must match the
    schema column names in order.
    """
    schema = validate_schema(schema)
    if output_kind not in (REGRESSION, BINARY_LOGIT):
        raise InvalidInputError(f"unknown output kind {output_kind!r}")
    if hasattr(source, "read"):
        rows = list(csv.reader(source))
    else:
        with open(source, newline="") as fh:
            rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError("header", "file is empty")
    header = [h.strip() for h in rows[0]]
    expected = [c.name for c in schema]
    if header != expected:
        raise SchemaError("header", f"expected columns {expected}, found {header}")

    kept: list[tuple[int, list[str]]] = []
    n_dropped = 0
    row_num = 0
    for row in rows[1:]:
        if not row:
            continue
        row_num += 1
        if len(row) != len(schema):
            raise SchemaError(f"row {row_num}", f"expected {len(schema)} cells, found {len(row)}")
        cells = [c.strip() for c in row]
        if any(c in MISSING_TOKENS for c in cells):
            n_dropped += 1
            continue
        kept.append((row_num, cells))
    if not kept:
        raise InvalidInputError("no usable rows after dropping missing values")

    numeric_cols = [i for i, c in enumerate(schema) if c.kind == KIND_NUMERIC]
    cat_cols = [i for i, c in enumerate(schema) if c.kind == KIND_CATEGORICAL]
    target_col = next(i for i, c in enumerate(schema) if c.kind == KIND_TARGET)

    blocks: list[np.ndarray] = []
    names: list[str] = []
    scales: list[FeatureScale] = []
    monotone: list[MonotoneFeature] = []
    for i in numeric_cols:
        col = schema[i]
        raw = np.array([_parse_cell(cells[i], num, col.name) for num, cells in kept])
        scale = FeatureScale(col.name, float(raw.min()), float(raw.max()))
        scales.append(scale)
        if col.monotone_direction is not None:
            monotone.append(MonotoneFeature(len(names), col.monotone_direction))
        names.append(col.name)
        blocks.append(scale.normalize(raw)[:, None])
    for i in cat_cols:
        col = schema[i]
        raw = [cells[i] for _, cells in kept]
        categories = sorted(set(raw))
        onehot = np.zeros((len(raw), len(categories)))
        index = {cat: j for j, cat in enumerate(categories)}
        for k, v in enumerate(raw):
            onehot[k, index[v]] = 1.0
        names.extend(f"{col.name}={cat}" for cat in categories)
        blocks.append(onehot)

    X = np.hstack(blocks) if blocks else np.zeros((len(kept), 0))
    if X.shape[1] == 0:
        raise InvalidInputError("schema defines no feature columns")
    raw_targets = np.array(
        [_parse_cell(cells[target_col], num, schema[target_col].name) for num, cells in kept]
    )
    if output_kind == BINARY_LOGIT:
        if not np.all(np.isin(raw_targets, (0.0, 1.0))):
            raise InvalidInputError("classification targets must be 0 or 1")
        params = NormalizationParams(tuple(scales), None, None)
    else:
        std = float(raw_targets.std())
        params = NormalizationParams(tuple(scales), float(raw_targets.mean()), std if std > 0 else 1.0)

    d = X.shape[1]
    return LoadedData(
        dataset=LabeledDataset(X, params.normalize_target(raw_targets)),
        normalization=params,
        input_box=InputBox(np.zeros(d), np.ones(d)),
        monotone_spec=MonotoneSpec(tuple(monotone)),
        feature_names=tuple(names),
        n_dropped=n_dropped,
    )


def make_folds(n: int, n_folds: int, train_fraction: float, seed: int):
    """Independent seeded shuffles, each split train_fraction/(1 - train_fraction).

    Train size is floor(train_fraction * n). Returns (train_indices,
    test_indices) pairs, both sorted; each fold's test set is disjoint from
    its own train set.
    """
    if n_folds < 1:
        raise InvalidInputError("n_folds must be at least 1")
    if not 0.0 < train_fraction < 1.0:
        raise InvalidInputError("train_fraction must lie strictly between 0 and 1")
    n_train = int(np.floor(train_fraction * n + 1e-9))
    if not 1 <= n_train <= n - 1:
        raise InvalidInputError(f"split {n_train}/{n - n_train} of {n} rows leaves an empty side")
    folds = []
    for child in np.random.SeedSequence(seed).spawn(n_folds):
        perm = np.random.default_rng(child).permutation(n)
        folds.append((np.sort(perm[:n_train]), np.sort(perm[n_train:])))
    return folds


# ---------------------------------------------------------------------------
# schema JSON: {"columns": [{"name", "kind", "monotone"}], "target": name}


def schema_from_json(doc: dict) -> tuple[ColumnSchema, ...]:
    if not isinstance(doc, dict) or "columns" not in doc:
        raise SchemaError("columns", "missing")
    if "target" not in doc or not isinstance(doc["target"], str):
        raise SchemaError("target", "missing or not a string")
    target = doc["target"]
    columns = []
    seen_target = False
    for k, entry in enumerate(doc["columns"]):
        if not isinstance(entry, dict) or "name" not in entry:
            raise SchemaError(f"columns[{k}]", "each column needs at least a name")
        name = entry["name"]
        kind = entry.get("kind", KIND_NUMERIC)
        if name == target:
            kind = KIND_TARGET
            seen_target = True
        direction = entry.get("monotone")
        columns.append(ColumnSchema(name, kind, direction))
    if not seen_target:
        raise SchemaError("target", f"target column {target!r} not present in columns")
    return validate_schema(columns)


def schema_to_json(columns) -> dict:
    columns = validate_schema(columns)
    target = next(c.name for c in columns if c.kind == KIND_TARGET)
    return {
        "columns": [
            {"name": c.name, "kind": c.kind, "monotone": c.monotone_direction} for c in columns
        ],
        "target": target,
    }


def read_schema(path) -> tuple[ColumnSchema, ...]:
    with open(path) as fh:
        return schema_from_json(json.load(fh))
