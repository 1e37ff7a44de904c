"""From-scratch MLP training: weighted losses, Adam, minibatching, grid search.

Everything is seeded and deterministic: a given (init seed, TrainConfig) pair
reproduces the weight trajectory bit for bit.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DivergenceError, InvalidInputError
from .network import (
    BINARY_LOGIT,
    LINEAR,
    REGRESSION,
    RELU,
    InputBox,
    Layer,
    Network,
    forward_batch,
)

LOSS_MSE = "mse"
LOSS_BCE = "binary-cross-entropy"

METRIC_MSE = "mse"
METRIC_ACCURACY = "accuracy"


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int
    epochs: int
    learning_rate: float
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    loss: str = LOSS_MSE

    def __post_init__(self):
        if self.batch_size < 1:
            raise InvalidInputError("batch_size must be at least 1")
        if self.epochs < 0:
            raise InvalidInputError("epochs must be nonnegative")
        if not self.learning_rate > 0:
            raise InvalidInputError("learning_rate must be positive")
        for name in ("adam_beta1", "adam_beta2"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise InvalidInputError(f"{name} must lie in [0, 1)")
        if not self.adam_eps > 0:
            raise InvalidInputError("adam_eps must be positive")
        if self.loss not in (LOSS_MSE, LOSS_BCE):
            raise InvalidInputError(f"loss must be '{LOSS_MSE}' or '{LOSS_BCE}', got {self.loss!r}")


class LabeledDataset:
    """Inputs, scalar targets, and optional per-example weights."""

    def __init__(self, inputs, targets, weights=None):
        self.inputs = np.array(inputs, dtype=float)
        self.targets = np.array(targets, dtype=float)
        if self.inputs.ndim != 2:
            raise InvalidInputError(f"inputs must be 2d, got shape {self.inputs.shape}")
        if self.targets.shape != (len(self.inputs),):
            raise InvalidInputError("targets must be one scalar per input row")
        if not np.all(np.isfinite(self.inputs)):
            raise InvalidInputError("inputs contain non-finite values")
        if not np.all(np.isfinite(self.targets)):
            raise InvalidInputError("targets contain non-finite values")
        if weights is None:
            self.weights = np.ones(len(self.inputs))
        else:
            self.weights = np.array(weights, dtype=float)
            if self.weights.shape != (len(self.inputs),):
                raise InvalidInputError("weights must be one scalar per input row")
            if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
                raise InvalidInputError("weights must be finite and nonnegative")

    def __len__(self) -> int:
        return len(self.inputs)

    @property
    def input_dim(self) -> int:
        return self.inputs.shape[1]

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=int)
        return LabeledDataset(self.inputs[idx], self.targets[idx], self.weights[idx])


@dataclass(frozen=True)
class GridSpec:
    architectures: tuple[tuple[int, ...], ...]
    configs: tuple[TrainConfig, ...]

    def __post_init__(self):
        if not self.architectures or not self.configs:
            raise InvalidInputError("grid must contain at least one architecture and one config")
        for arch in self.architectures:
            if not all(int(w) >= 1 for w in arch):
                raise InvalidInputError(f"bad architecture {arch}: widths must be >= 1")


@dataclass(frozen=True)
class GridResult:
    hidden_sizes: tuple[int, ...]
    config: TrainConfig
    mean_train_error: float


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    wall_time: float


def init_network(
    input_dim: int,
    hidden_sizes: tuple[int, ...],
    input_box: InputBox,
    output_kind: str = REGRESSION,
    seed: int = 0,
) -> Network:
    """Seeded He-style uniform init (scale sqrt(6/fan_in)), zero biases."""
    rng = np.random.default_rng(seed)
    sizes = [input_dim, *hidden_sizes, 1]
    layers = []
    for k in range(len(sizes) - 1):
        fan_in = sizes[k]
        limit = np.sqrt(6.0 / fan_in)
        W = rng.uniform(-limit, limit, size=(sizes[k + 1], fan_in))
        act = RELU if k < len(sizes) - 2 else LINEAR
        layers.append(Layer(W, np.zeros(sizes[k + 1]), act))
    return Network(input_dim, input_box, output_kind, tuple(layers))


# ---------------------------------------------------------------------------
# loss and gradients on raw parameter lists (acts may deviate from Network's
# relu-hidden rule here; the gradient-check rig relies on that)


def _forward_store(W, b, acts, X):
    post = [X]
    pre = []
    a = X
    for Wk, bk, act in zip(W, b, acts):
        z = a @ Wk.T + bk
        pre.append(z)
        a = np.maximum(z, 0.0) if act == RELU else z
        post.append(a)
    return pre, post


def _loss_terms(out, y, loss):
    """Per-example loss values and d(loss_i)/d(out_i)."""
    if loss == LOSS_MSE:
        r = out - y
        return r * r, 2.0 * r
    # stable binary cross-entropy on the logit: softplus(z) - y z
    sp = np.maximum(out, 0.0) + np.log1p(np.exp(-np.abs(out)))
    p = np.where(out >= 0.0, 1.0 / (1.0 + np.exp(-out)), np.exp(out) / (1.0 + np.exp(out)))
    return sp - y * out, p - y


def _loss_and_grads(W, b, acts, X, y, w, loss):
    # overflow here is how divergence manifests; the caller checks finiteness
    with np.errstate(over="ignore", invalid="ignore"):
        return _loss_and_grads_inner(W, b, acts, X, y, w, loss)


def _loss_and_grads_inner(W, b, acts, X, y, w, loss):
    pre, post = _forward_store(W, b, acts, X)
    out = post[-1][:, 0]
    terms, dout = _loss_terms(out, y, loss)
    total_w = float(np.sum(w))
    loss_val = float(np.sum(w * terms) / total_w)
    delta = (w * dout / total_w)[:, None]
    gW = [None] * len(W)
    gb = [None] * len(W)
    for k in range(len(W) - 1, -1, -1):
        gW[k] = delta.T @ post[k]
        gb[k] = delta.sum(axis=0)
        if k > 0:
            delta = delta @ W[k]
            if acts[k - 1] == RELU:
                delta = delta * (pre[k - 1] > 0.0)  # subgradient 0 at the kink
    return loss_val, gW, gb


def dataset_loss(net: Network, data: LabeledDataset, loss: str | None = None) -> float:
    """Weighted mean loss of the network on the dataset."""
    if loss is None:
        loss = LOSS_BCE if net.output_kind == BINARY_LOGIT else LOSS_MSE
    if loss not in (LOSS_MSE, LOSS_BCE):
        raise InvalidInputError(f"unknown loss {loss!r}")
    with np.errstate(over="ignore", invalid="ignore"):
        out = forward_batch(net, data.inputs, check=False)
        terms, _ = _loss_terms(out, data.targets, loss)
        return float(np.sum(data.weights * terms) / np.sum(data.weights))


def train_with_history(
    net: Network, data: LabeledDataset, cfg: TrainConfig
) -> tuple[Network, list[EpochStats]]:
    """Adam minibatch training. Returns the trained network and per-epoch log.

    The logged loss is the full-dataset loss after each epoch's updates.
    Raises DivergenceError as soon as the loss or any parameter goes
    non-finite.
    """
    if len(data) == 0:
        raise InvalidInputError("training data is empty")
    if data.input_dim != net.input_dim:
        raise InvalidInputError(
            f"data has {data.input_dim} features, network expects {net.input_dim}"
        )
    if cfg.epochs == 0:
        return net, []
    W = [l.weights.copy() for l in net.layers]
    b = [l.biases.copy() for l in net.layers]
    acts = [l.activation for l in net.layers]
    mW = [np.zeros_like(x) for x in W]
    vW = [np.zeros_like(x) for x in W]
    mb = [np.zeros_like(x) for x in b]
    vb = [np.zeros_like(x) for x in b]
    rng = np.random.default_rng(cfg.seed)
    n = len(data)
    beta1, beta2, eps = cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps
    t = 0
    t_start = time.perf_counter()
    history: list[EpochStats] = []
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            loss_val, gW, gb = _loss_and_grads(
                W, b, acts, data.inputs[idx], data.targets[idx], data.weights[idx], cfg.loss
            )
            if not np.isfinite(loss_val):
                raise DivergenceError(
                    f"loss became non-finite at epoch {epoch}, step {t}: {loss_val}"
                )
            t += 1
            c1 = 1.0 - beta1**t
            c2 = 1.0 - beta2**t
            for params, grads, m, v in ((W, gW, mW, vW), (b, gb, mb, vb)):
                for k in range(len(params)):
                    m[k] = beta1 * m[k] + (1.0 - beta1) * grads[k]
                    v[k] = beta2 * v[k] + (1.0 - beta2) * grads[k] * grads[k]
                    params[k] = params[k] - cfg.learning_rate * (m[k] / c1) / (
                        np.sqrt(v[k] / c2) + eps
                    )
        if not all(np.all(np.isfinite(x)) for x in W + b):
            raise DivergenceError(f"parameters became non-finite during epoch {epoch}")
        epoch_net = Network(
            net.input_dim,
            net.input_box,
            net.output_kind,
            tuple(Layer(Wk, bk, a) for Wk, bk, a in zip(W, b, acts)),
        )
        epoch_loss = dataset_loss(epoch_net, data, cfg.loss)
        if not np.isfinite(epoch_loss):
            raise DivergenceError(f"training loss became non-finite after epoch {epoch}")
        history.append(
            EpochStats(
                epoch=epoch,
                train_loss=epoch_loss,
                wall_time=time.perf_counter() - t_start,
            )
        )
    return epoch_net, history


def train(net: Network, data: LabeledDataset, cfg: TrainConfig) -> Network:
    trained, _ = train_with_history(net, data, cfg)
    return trained


def write_training_log(path, history: list[EpochStats], include_times: bool = False) -> None:
    """Write an epoch log as CSV with columns epoch, train_loss, wall_time.

    Wall times are written as 0.0 unless include_times is set, so a rerun of
    the same seeded job produces a byte-identical file.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "wall_time"])
        for row in history:
            wall = repr(row.wall_time) if include_times else "0.0"
            writer.writerow([row.epoch, repr(row.train_loss), wall])


def evaluate(
    net: Network,
    data: LabeledDataset,
    metric: str,
    denormalize=None,
) -> float:
    """MSE (optionally after denormalizing predictions) or 0.5-threshold accuracy."""
    preds = forward_batch(net, data.inputs, check=False)
    if metric == METRIC_MSE:
        if net.output_kind != REGRESSION:
            raise InvalidInputError("mse applies to regression networks")
        if denormalize is not None:
            preds = np.asarray(denormalize(preds), dtype=float)
        r = preds - data.targets
        return float(np.mean(r * r))
    if metric == METRIC_ACCURACY:
        if net.output_kind != BINARY_LOGIT:
            raise InvalidInputError("accuracy applies to binary-logit networks")
        # logit >= 0 means probability >= 0.5, which maps to class 1
        predicted = preds >= 0.0
        return float(np.mean(predicted == (data.targets >= 0.5)))
    raise InvalidInputError(f"metric must be '{METRIC_MSE}' or '{METRIC_ACCURACY}', got {metric!r}")


def grid_search(
    grid: GridSpec,
    data: LabeledDataset,
    folds,
    input_box: InputBox | None = None,
    output_kind: str = REGRESSION,
) -> tuple[Network, TrainConfig, list[GridResult]]:
    """Mean-train-error selection over architectures x configs.

    folds is a sequence of (train_indices, test_indices) pairs; each candidate
    is trained once per fold and scored by its mean final training loss
    (divergent runs score infinity). Ties keep the earliest candidate in grid
    order. The winner is retrained on the full dataset and returned.
    """
    if input_box is None:
        input_box = InputBox(data.inputs.min(axis=0), data.inputs.max(axis=0))
    folds = list(folds)
    if not folds:
        raise InvalidInputError("at least one fold is required")
    results: list[GridResult] = []
    for arch in grid.architectures:
        for cfg in grid.configs:
            errors = []
            for train_idx, _ in folds:
                net0 = init_network(data.input_dim, arch, input_box, output_kind, cfg.seed)
                try:
                    trained = train(net0, data.subset(train_idx), cfg)
                    errors.append(dataset_loss(trained, data.subset(train_idx), cfg.loss))
                except DivergenceError:
                    errors.append(np.inf)
            results.append(GridResult(tuple(arch), cfg, float(np.mean(errors))))
    best_idx = int(np.argmin([r.mean_train_error for r in results]))
    best = results[best_idx]
    final_net = train(
        init_network(data.input_dim, best.hidden_sizes, input_box, output_kind, best.config.seed),
        data,
        best.config,
    )
    return final_net, best.config, results


def _gradient_check_raw(W, b, acts, X, y, w, loss, h=1e-5):
    _, gW, gb = _loss_and_grads(W, b, acts, X, y, w, loss)
    worst = 0.0
    for params, grads in ((W, gW), (b, gb)):
        for k in range(len(params)):
            flat = params[k].reshape(-1)
            gflat = grads[k].reshape(-1)
            for j in range(flat.size):
                keep = flat[j]
                flat[j] = keep + h
                up, _, _ = _loss_and_grads(W, b, acts, X, y, w, loss)
                flat[j] = keep - h
                down, _, _ = _loss_and_grads(W, b, acts, X, y, w, loss)
                flat[j] = keep
                numeric = (up - down) / (2.0 * h)
                denom = max(abs(gflat[j]), abs(numeric), 1.0)
                worst = max(worst, abs(gflat[j] - numeric) / denom)
    return worst


def gradient_check(net: Network, data: LabeledDataset, cfg: TrainConfig) -> float:
    """Max relative gap between backprop and central finite differences."""
    if net.n_parameters > 200:
        raise InvalidInputError("gradient check is meant for small networks (<= 200 parameters)")
    W = [l.weights.copy() for l in net.layers]
    b = [l.biases.copy() for l in net.layers]
    acts = [l.activation for l in net.layers]
    return _gradient_check_raw(W, b, acts, data.inputs, data.targets, data.weights, cfg.loss)
