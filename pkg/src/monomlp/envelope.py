"""Monotone prediction by on-the-fly envelope correction.

The upper envelope of f at x, for monotone feature set S, is the larger of
f(x) and the maximum of f over the region dominated by x (coordinates in S
relaxed toward their monotone-smaller end, everything else pinned). The lower
envelope mirrors it. Dominated regions nest as x grows, so both envelopes are
monotone in every coordinate of S even when f is not. Nothing is materialized:
each prediction issues one certified solver query.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .network import BINARY_LOGIT, INCREASING, MonotoneSpec, Network, forward
from .solver import BoxQuery, ExtremumResult, SolverConfig, maximize, minimize

SOURCE_ORIGINAL = "original"
SOURCE_COUNTEREXAMPLE = "counterexample"


@dataclass(frozen=True)
class EnvelopeMode:
    kind: str

    def __post_init__(self):
        if self.kind not in ("upper", "lower"):
            raise InvalidInputError(f"envelope kind must be 'upper' or 'lower', got {self.kind!r}")


UPPER = EnvelopeMode("upper")
LOWER = EnvelopeMode("lower")


@dataclass(frozen=True)
class EnvelopePrediction:
    """One envelope-corrected prediction.

    value is on the network's output scale (the logit for binary-logit nets).
    When the solver result was complete: source = "counterexample" implies
    witness is present and value = forward(witness); source = "original"
    implies value = forward(x) exactly. An incomplete search instead reports
    the certified bound as the value (sound but possibly loose) and sets the
    incomplete flag.
    """

    value: float
    source: str
    witness: np.ndarray | None
    solver_gap: float
    query_time: float
    incomplete: bool = False
    nodes_explored: int = 0


def _dominated_query(
    net: Network, spec: MonotoneSpec, x: np.ndarray, mode: EnvelopeMode
) -> BoxQuery:
    box = net.input_box
    free: dict[int, tuple[float, float]] = {}
    for feat in spec.features:
        i = feat.index
        toward_lower = (mode.kind == "upper") == (feat.direction == INCREASING)
        if toward_lower:
            free[i] = (float(box.lower[i]), float(x[i]))
        else:
            free[i] = (float(x[i]), float(box.upper[i]))
    return BoxQuery.around_point(x, free)


def envelope_query(
    net: Network,
    spec: MonotoneSpec,
    x: np.ndarray,
    mode: EnvelopeMode,
    cfg: SolverConfig,
) -> tuple[float, ExtremumResult, bool]:
    """Run the dominated-region search. Returns (f(x), result, is_counterexample)."""
    spec.validate_for_dim(net.input_dim)
    if not spec.features:
        raise InvalidInputError("monotone feature set is empty")
    x = np.asarray(x, dtype=float)
    fx = forward(net, x)
    query = _dominated_query(net, spec, x, mode)
    if mode.kind == "upper":
        res = maximize(net, query, cfg)
        is_ce = res.witness_value > fx + cfg.delta
    else:
        res = minimize(net, query, cfg)
        is_ce = res.witness_value < fx - cfg.delta
    return fx, res, is_ce


def envelope_counterexample(
    net: Network,
    spec: MonotoneSpec,
    x: np.ndarray,
    mode: EnvelopeMode = UPPER,
    cfg: SolverConfig = SolverConfig(),
) -> ExtremumResult | None:
    """Extremum over the region dominated by x, if it beats f(x) by delta.

    Upper mode looks for a dominated point with a strictly larger output
    (which witnesses a monotonicity violation at x); lower mode is the dual.
    Returns None when no such point exists.
    """
    _, res, is_ce = envelope_query(net, spec, x, mode, cfg)
    return res if is_ce else None


def predict(
    net: Network,
    spec: MonotoneSpec,
    x: np.ndarray,
    mode: EnvelopeMode = UPPER,
    cfg: SolverConfig = SolverConfig(),
) -> EnvelopePrediction:
    """Envelope-corrected prediction at x on the network's output scale."""
    t0 = time.perf_counter()
    fx, res, is_ce = envelope_query(net, spec, x, mode, cfg)
    elapsed = time.perf_counter() - t0
    source = SOURCE_COUNTEREXAMPLE if is_ce else SOURCE_ORIGINAL
    witness = res.witness.copy() if is_ce else None
    if res.incomplete:
        # keep the guarantee sound at the cost of over/under-prediction
        if mode.kind == "upper":
            value = max(fx, res.certified_bound)
        else:
            value = min(fx, res.certified_bound)
        return EnvelopePrediction(
            value=value,
            source=source,
            witness=witness,
            solver_gap=res.gap,
            query_time=elapsed,
            incomplete=True,
            nodes_explored=res.nodes_explored,
        )
    value = res.witness_value if is_ce else fx
    return EnvelopePrediction(
        value=value,
        source=source,
        witness=witness,
        solver_gap=res.gap,
        query_time=elapsed,
        nodes_explored=res.nodes_explored,
    )


def predict_batch(
    net: Network,
    spec: MonotoneSpec,
    X: np.ndarray,
    mode: EnvelopeMode = UPPER,
    cfg: SolverConfig = SolverConfig(),
) -> list[EnvelopePrediction]:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InvalidInputError(f"expected a 2d batch, got shape {X.shape}")
    return [predict(net, spec, x, mode, cfg) for x in X]


def _sigmoid(v: float) -> float:
    if v >= 0.0:
        return 1.0 / (1.0 + np.exp(-v))
    e = np.exp(v)
    return e / (1.0 + e)


def predict_probability(
    net: Network,
    spec: MonotoneSpec,
    x: np.ndarray,
    mode: EnvelopeMode = UPPER,
    cfg: SolverConfig = SolverConfig(),
) -> float:
    """Sigmoid of the envelope-corrected logit, for binary-logit networks."""
    if net.output_kind != BINARY_LOGIT:
        raise InvalidInputError("probabilities are defined only for binary-logit networks")
    return _sigmoid(predict(net, spec, x, mode, cfg).value)


def count_counterexamples(
    net: Network,
    spec: MonotoneSpec,
    points: np.ndarray,
    cfg: SolverConfig = SolverConfig(),
) -> tuple[int, float, np.ndarray]:
    """How many points have an upper or a lower envelope counterexample.

    A point with both counts once. Returns (count, fraction, per-point flags).
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise InvalidInputError(f"expected a 2d batch, got shape {points.shape}")
    flags = np.zeros(len(points), dtype=bool)
    for k, x in enumerate(points):
        if envelope_counterexample(net, spec, x, UPPER, cfg) is not None:
            flags[k] = True
        elif envelope_counterexample(net, spec, x, LOWER, cfg) is not None:
            flags[k] = True
    count = int(flags.sum())
    fraction = count / len(points) if len(points) else 0.0
    return count, fraction, flags


def envelope_violations_on_grid(
    net: Network,
    spec: MonotoneSpec,
    anchor: np.ndarray,
    axis_grids: dict[int, np.ndarray],
    mode: EnvelopeMode = UPPER,
    cfg: SolverConfig = SolverConfig(),
    tolerance: float | None = None,
) -> tuple[int, np.ndarray, np.ndarray]:
    """Sampled monotonicity check of the envelope itself.

    Evaluates the envelope on a grid over the monotone axes (other coordinates
    pinned at anchor) and flags grid points whose value moves the wrong way
    relative to an adjacent dominated neighbor by more than the tolerance
    (2 epsilon by default, matching the certification slack of two queries).
    Returns (flagged count, flags, values) with grid-shaped arrays.
    """
    spec.validate_for_dim(net.input_dim)
    anchor = np.asarray(anchor, dtype=float)
    axes = sorted(axis_grids)
    if not axes or any(i not in spec.indices for i in axes):
        raise InvalidInputError("axis grids must cover a subset of the monotone features")
    tol = 2.0 * cfg.epsilon if tolerance is None else tolerance
    shape = tuple(len(axis_grids[i]) for i in axes)
    values = np.empty(shape)
    for idx in np.ndindex(shape):
        x = anchor.copy()
        for ax_pos, i in enumerate(axes):
            x[i] = axis_grids[i][idx[ax_pos]]
        values[idx] = predict(net, spec, x, mode, cfg).value
    flags = np.zeros(shape, dtype=bool)
    for ax_pos, i in enumerate(axes):
        diffs = np.diff(values, axis=ax_pos)
        increasing = spec.direction_of(i) == INCREASING
        bad = diffs < -tol if increasing else diffs > tol
        # a negative step flags the point on the dominated-larger side
        grow = [(0, 0)] * values.ndim
        grow[ax_pos] = (1, 0)
        flags |= np.pad(bad, grow)
    return int(flags.sum()), flags, values
