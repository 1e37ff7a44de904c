"""Counterexample-guided learning: alternate fine-tuning with envelope
counterexample generation until a budget of outer iterations is spent, then
pick the best iterate.

Counterexamples are regenerated fresh from the current model each iteration;
originals always re-enter the loop with their ground-truth labels, and the
regression relabeling applies only within one iteration's augmented set.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass

import numpy as np

from .envelope import LOWER, UPPER, count_counterexamples, envelope_query
from .errors import DivergenceError, InvalidInputError
from .network import BINARY_LOGIT, MonotoneSpec, Network, forward
from .solver import SolverConfig
from .training import LabeledDataset, TrainConfig, dataset_loss, train

log = logging.getLogger(__name__)

LABEL_REGRESSION_AVERAGE = "regression-average"
LABEL_CLASSIFICATION_COPY = "classification-copy"
SELECT_MIN_TRAIN_ERROR = "min-train-error"
SELECT_MIN_COUNTEREXAMPLES = "min-counterexamples"

ORIGIN_ORIGINAL = "original"
ORIGIN_UPPER_CE = "upper-ce"
ORIGIN_LOWER_CE = "lower-ce"


@dataclass(frozen=True)
class CglConfig:
    T: int
    labeling: str
    selection: str
    solver: SolverConfig
    retrain: TrainConfig

    def __post_init__(self):
        if self.T < 0:
            raise InvalidInputError("T must be nonnegative")
        if self.labeling not in (LABEL_REGRESSION_AVERAGE, LABEL_CLASSIFICATION_COPY):
            raise InvalidInputError(f"unknown labeling rule {self.labeling!r}")
        if self.selection not in (SELECT_MIN_TRAIN_ERROR, SELECT_MIN_COUNTEREXAMPLES):
            raise InvalidInputError(f"unknown selection rule {self.selection!r}")


@dataclass(frozen=True)
class AugmentedPoint:
    input: np.ndarray
    label: float
    origin: str
    parent_index: int

    def __post_init__(self):
        if self.origin not in (ORIGIN_ORIGINAL, ORIGIN_UPPER_CE, ORIGIN_LOWER_CE):
            raise InvalidInputError(f"unknown origin {self.origin!r}")
        if self.parent_index < 0:
            raise InvalidInputError("parent_index must reference an original point")
        object.__setattr__(self, "input", np.asarray(self.input, dtype=float))


@dataclass(frozen=True)
class CglIteration:
    iteration: int
    train_error: float
    train_ce_count: int
    test_ce_count: int | None
    wall_time: float
    skipped: bool = False


def generate_augmentation(
    net: Network,
    spec: MonotoneSpec,
    data: LabeledDataset,
    cfg: CglConfig,
) -> list[AugmentedPoint]:
    """Query both envelopes at every training point and build the augmented set.

    Regression: when at least one counterexample exists for a point, the mean
    of the model values {f(x), f(upper-ce), f(lower-ce)} (over existing
    members) becomes the label of the point and of each counterexample.
    Classification: counterexamples copy the point's ground-truth label.
    Points whose searches find nothing keep their ground-truth label;
    incomplete searches are logged.
    """
    originals: list[AugmentedPoint] = []
    extras: list[AugmentedPoint] = []
    n_incomplete = 0
    for i in range(len(data)):
        x = data.inputs[i]
        ces = {}
        for mode, origin in ((UPPER, ORIGIN_UPPER_CE), (LOWER, ORIGIN_LOWER_CE)):
            _, res, is_ce = envelope_query(net, spec, x, mode, cfg.solver)
            if is_ce:
                ces[origin] = res
            elif res.incomplete:
                n_incomplete += 1
        if not ces:
            originals.append(AugmentedPoint(x, float(data.targets[i]), ORIGIN_ORIGINAL, i))
            continue
        if cfg.labeling == LABEL_REGRESSION_AVERAGE:
            members = [forward(net, x)] + [r.witness_value for r in ces.values()]
            label = float(np.mean(members))
            originals.append(AugmentedPoint(x, label, ORIGIN_ORIGINAL, i))
            for origin, res in ces.items():
                extras.append(AugmentedPoint(res.witness, label, origin, i))
        else:
            truth = float(data.targets[i])
            originals.append(AugmentedPoint(x, truth, ORIGIN_ORIGINAL, i))
            for origin, res in ces.items():
                extras.append(AugmentedPoint(res.witness, truth, origin, i))
    if n_incomplete:
        log.info("augmentation: %d envelope queries hit the node budget", n_incomplete)
    return originals + extras


def _augmented_dataset(points: list[AugmentedPoint], data: LabeledDataset) -> LabeledDataset:
    X = np.stack([p.input for p in points])
    y = np.array([p.label for p in points])
    w = np.array([data.weights[p.parent_index] for p in points])  # ces inherit weight
    return LabeledDataset(X, y, w)


def _flagged_parent_count(points: list[AugmentedPoint]) -> int:
    return len({p.parent_index for p in points if p.origin != ORIGIN_ORIGINAL})


def cgl_train(
    net: Network,
    spec: MonotoneSpec,
    data: LabeledDataset,
    cfg: CglConfig,
    eval_data: LabeledDataset | None = None,
) -> tuple[Network, list[CglIteration]]:
    """Run T augment-and-fine-tune iterations and return the selected iterate.

    The baseline network is iteration 0 and competes in selection. A
    divergent fine-tune marks its iteration skipped (excluded from selection)
    and the loop continues from the previous weights. eval_data, when given,
    fills the test counterexample column of the history.
    """
    if cfg.T == 0:
        return net, []
    if cfg.labeling == LABEL_CLASSIFICATION_COPY and net.output_kind != BINARY_LOGIT:
        raise InvalidInputError("classification-copy labeling requires a binary-logit network")
    t_start = time.perf_counter()

    def test_count(model: Network) -> int | None:
        if eval_data is None:
            return None
        count, _, _ = count_counterexamples(model, spec, eval_data.inputs, cfg.solver)
        return count

    models = [net]
    history: list[CglIteration] = []
    current = net
    pending_augmentation = generate_augmentation(current, spec, data, cfg)
    history.append(
        CglIteration(
            iteration=0,
            train_error=dataset_loss(current, data, cfg.retrain.loss),
            train_ce_count=_flagged_parent_count(pending_augmentation),
            test_ce_count=test_count(current),
            wall_time=time.perf_counter() - t_start,
        )
    )
    for it in range(1, cfg.T + 1):
        augmented = _augmented_dataset(pending_augmentation, data)
        skipped = False
        try:
            current = train(current, augmented, cfg.retrain)
        except DivergenceError as exc:
            log.warning("iteration %d diverged and is excluded from selection: %s", it, exc)
            skipped = True
        models.append(current)
        pending_augmentation = generate_augmentation(current, spec, data, cfg)
        history.append(
            CglIteration(
                iteration=it,
                train_error=dataset_loss(current, data, cfg.retrain.loss),
                train_ce_count=_flagged_parent_count(pending_augmentation),
                test_ce_count=test_count(current),
                wall_time=time.perf_counter() - t_start,
                skipped=skipped,
            )
        )
    best = select_best(history, cfg.selection)
    return models[best.iteration], history


def select_best(history: list[CglIteration], selection: str) -> CglIteration:
    """The row the selection rule picks: lowest train error or lowest
    counterexample count over non-skipped iterations, earliest on ties."""
    if selection == SELECT_MIN_TRAIN_ERROR:
        key = lambda row: row.train_error
    else:
        key = lambda row: row.train_ce_count
    candidates = [row for row in history if not row.skipped]
    if not candidates:
        raise InvalidInputError("every iteration was skipped; nothing to select")
    return min(candidates, key=key)  # min() keeps the earliest on ties


@dataclass(frozen=True)
class CeReductionReport:
    train_before: int
    train_after: int
    train_reduction_pct: float
    test_before: int
    test_after: int
    test_reduction_pct: float


def _reduction_pct(before: int, after: int) -> float:
    if before == 0:
        return 0.0
    return 100.0 * (before - after) / before


def ce_reduction_report(
    before: Network,
    after: Network,
    spec: MonotoneSpec,
    train_points: np.ndarray,
    test_points: np.ndarray,
    cfg: SolverConfig,
) -> CeReductionReport:
    """Flagged-point counts for both models on both point sets, with % reduction."""
    train_b, _, _ = count_counterexamples(before, spec, train_points, cfg)
    train_a, _, _ = count_counterexamples(after, spec, train_points, cfg)
    test_b, _, _ = count_counterexamples(before, spec, test_points, cfg)
    test_a, _, _ = count_counterexamples(after, spec, test_points, cfg)
    return CeReductionReport(
        train_before=train_b,
        train_after=train_a,
        train_reduction_pct=_reduction_pct(train_b, train_a),
        test_before=test_b,
        test_after=test_a,
        test_reduction_pct=_reduction_pct(test_b, test_a),
    )


def write_cgl_history(path, history: list[CglIteration], include_times: bool = False) -> None:
    """CSV: iteration, train_error, train_ce_count, test_ce_count, wall_time.

    Wall times are written as 0.0 unless include_times is set, so reruns of a
    seeded pipeline produce byte-identical files.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "train_error", "train_ce_count", "test_ce_count", "wall_time"])
        for row in history:
            writer.writerow(
                [
                    row.iteration,
                    repr(row.train_error),
                    row.train_ce_count,
                    "" if row.test_ce_count is None else row.test_ce_count,
                    repr(row.wall_time) if include_times else "0.0",
                ]
            )


def write_augmentation(path, points: list[AugmentedPoint]) -> None:
    """CSV dump of an augmented set: origin, parent_index, label, input cells."""
    if not points:
        raise InvalidInputError("no augmented points to write")
    dim = len(points[0].input)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["origin", "parent_index", "label", *[f"x{j}" for j in range(dim)]])
        for p in points:
            writer.writerow([p.origin, p.parent_index, repr(p.label), *[repr(v) for v in p.input]])
