"""Feed-forward ReLU networks with box-bounded inputs.

A network here is a plain value object: a stack of dense layers (ReLU on every
hidden layer, linear output with a single unit), the axis-aligned box the inputs
live in, and a tag saying whether the scalar output is a regression value or a
binary logit. Everything downstream (solver, envelopes, training) works on this
one representation.

Direction handling is normalized once, up front: ``canonicalize`` rewrites a
network so that every constrained feature is increasing, by negating the
corresponding first-layer columns and reflecting the box interval. All other
modules may then assume increasing monotonicity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericError, SchemaError

RELU = "relu"
LINEAR = "linear"
REGRESSION = "regression"
BINARY_LOGIT = "binary-logit"

INCREASING = "increasing"
DECREASING = "decreasing"

BOX_TOLERANCE = 1e-9


def _as_float_array(value, name: str, ndim: int) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise InvalidInputError(f"{name} is not a well-formed numeric array: {exc}") from exc
    if arr.ndim != ndim:
        raise InvalidInputError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Layer:
    """One dense layer: ``z = weights @ x + biases`` followed by ``activation``."""

    weights: np.ndarray  # (out, in), row-major
    biases: np.ndarray  # (out,)
    activation: str

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_float_array(self.weights, "weights", 2))
        object.__setattr__(self, "biases", _as_float_array(self.biases, "biases", 1))
        if self.activation not in (RELU, LINEAR):
            raise InvalidInputError(f"unknown activation {self.activation!r}")
        if self.weights.shape[0] != self.biases.shape[0]:
            raise InvalidInputError(
                f"layer has {self.weights.shape[0]} weight rows but {self.biases.shape[0]} biases"
            )

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True, eq=False)
class InputBox:
    """Axis-aligned box of admissible inputs, closed on both ends."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", _as_float_array(self.lower, "lower", 1))
        object.__setattr__(self, "upper", _as_float_array(self.upper, "upper", 1))
        if self.lower.shape != self.upper.shape:
            raise InvalidInputError("box lower/upper length mismatch")
        if np.any(self.lower > self.upper):
            raise InvalidInputError("box has lower > upper")

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def contains(self, x: np.ndarray, tol: float = BOX_TOLERANCE) -> bool:
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)


@dataclass(frozen=True)
class MonotoneFeature:
    index: int
    direction: str

    def __post_init__(self):
        if self.direction not in (INCREASING, DECREASING):
            raise InvalidInputError(f"unknown direction {self.direction!r}")
        if int(self.index) != self.index or self.index < 0:
            raise InvalidInputError(f"feature index must be a nonnegative integer, got {self.index}")
        object.__setattr__(self, "index", int(self.index))


@dataclass(frozen=True)
class MonotoneSpec:
    """The set of features the model must be monotone in, with directions."""

    features: tuple[MonotoneFeature, ...]

    def __post_init__(self):
        feats = tuple(sorted(self.features, key=lambda f: f.index))
        indices = [f.index for f in feats]
        if len(set(indices)) != len(indices):
            raise InvalidInputError("duplicate feature index in monotone spec")
        object.__setattr__(self, "features", feats)

    @classmethod
    def from_mapping(cls, mapping: dict[int, str]) -> "MonotoneSpec":
        return cls(tuple(MonotoneFeature(i, d) for i, d in mapping.items()))

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(f.index for f in self.features)

    @property
    def decreasing_indices(self) -> tuple[int, ...]:
        return tuple(f.index for f in self.features if f.direction == DECREASING)

    def direction_of(self, index: int) -> str:
        for f in self.features:
            if f.index == index:
                return f.direction
        raise InvalidInputError(f"feature {index} is not in the monotone spec")

    def validate_for_dim(self, dim: int) -> None:
        for f in self.features:
            if f.index >= dim:
                raise InvalidInputError(
                    f"monotone feature index {f.index} out of range for {dim} inputs"
                )


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable ReLU MLP with a scalar output."""

    input_dim: int
    input_box: InputBox
    output_kind: str
    layers: tuple[Layer, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.output_kind not in (REGRESSION, BINARY_LOGIT):
            raise InvalidInputError(f"unknown output kind {self.output_kind!r}")
        if not self.layers:
            raise InvalidInputError("network needs at least one layer")
        if self.input_box.dim != self.input_dim:
            raise InvalidInputError("input box dimension does not match input_dim")
        expected = self.input_dim
        for k, layer in enumerate(self.layers):
            if layer.in_dim != expected:
                raise InvalidInputError(
                    f"layer {k} expects {layer.in_dim} inputs but receives {expected}"
                )
            expected = layer.out_dim
        last = self.layers[-1]
        if last.activation != LINEAR or last.out_dim != 1:
            raise InvalidInputError("final layer must be linear with a single output unit")
        for k, layer in enumerate(self.layers[:-1]):
            if layer.activation != RELU:
                raise InvalidInputError(f"hidden layer {k} must use relu")

    @property
    def hidden_sizes(self) -> tuple[int, ...]:
        return tuple(layer.out_dim for layer in self.layers[:-1])

    @property
    def n_parameters(self) -> int:
        return sum(layer.weights.size + layer.biases.size for layer in self.layers)


def _check_point(net: Network, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise InvalidInputError(f"expected point of shape ({net.input_dim},), got {x.shape}")
    if not net.input_box.contains(x):
        raise InvalidInputError("point lies outside the network input box")
    return x


def forward(net: Network, x: np.ndarray, check: bool = True) -> float:
    """Evaluate the network at a single point, returning the scalar output."""
    if check:
        x = _check_point(net, x)
    y = x
    for layer in net.layers:
        y = layer.weights @ y + layer.biases
        if layer.activation == RELU:
            y = np.maximum(y, 0.0)
    out = float(y[0])
    if not np.isfinite(out):
        raise NumericError("forward pass produced a non-finite output")
    return out


def forward_batch(net: Network, X: np.ndarray, check: bool = True) -> np.ndarray:
    """Evaluate the network at each row of ``X``. Returns shape ``(n,)``."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise InvalidInputError(f"expected (n, {net.input_dim}) batch, got {X.shape}")
    if check and X.size:
        lo, hi = net.input_box.lower, net.input_box.upper
        if np.any(X < lo - BOX_TOLERANCE) or np.any(X > hi + BOX_TOLERANCE):
            raise InvalidInputError("batch contains points outside the network input box")
    Y = X
    for layer in net.layers:
        Y = Y @ layer.weights.T + layer.biases
        if layer.activation == RELU:
            np.maximum(Y, 0.0, out=Y)
    out = Y[:, 0]
    if out.size and not np.all(np.isfinite(out)):
        raise NumericError("forward pass produced non-finite outputs")
    return out


def forward_trace(net: Network, x: np.ndarray, check: bool = True):
    """Evaluate at a point and also return per-neuron preactivations.

    Returns ``(output, preactivations)`` where preactivations is one array per
    ReLU layer, in layer order. The linear output layer carries no activation
    pattern, so it is not included.
    """
    if check:
        x = _check_point(net, x)
    preacts: list[np.ndarray] = []
    y = np.asarray(x, dtype=np.float64)
    for layer in net.layers:
        z = layer.weights @ y + layer.biases
        if not np.all(np.isfinite(z)):
            raise NumericError("forward pass produced a non-finite intermediate")
        if layer.activation == RELU:
            preacts.append(z)
            y = np.maximum(z, 0.0)
        else:
            y = z
    return float(y[0]), preacts


def canonicalize(net: Network, spec: MonotoneSpec) -> tuple[Network, MonotoneSpec]:
    """Rewrite the network so every constrained feature is increasing.

    For each decreasing feature i the first-layer column i is negated and the
    box interval [L, U] becomes [-U, -L]. For any point x, running the result
    on x with coordinate i negated reproduces the original network's output.
    """
    spec.validate_for_dim(net.input_dim)
    dec = spec.decreasing_indices
    if not dec:
        return net, spec
    first = net.layers[0]
    W = first.weights.copy()
    W[:, list(dec)] *= -1.0
    lower = net.input_box.lower.copy()
    upper = net.input_box.upper.copy()
    for i in dec:
        lower[i], upper[i] = -net.input_box.upper[i], -net.input_box.lower[i]
    new_layers = (Layer(W, first.biases, first.activation),) + net.layers[1:]
    new_net = Network(net.input_dim, InputBox(lower, upper), net.output_kind, new_layers)
    new_spec = MonotoneSpec(tuple(MonotoneFeature(f.index, INCREASING) for f in spec.features))
    return new_net, new_spec


def reflect_points(spec: MonotoneSpec, X: np.ndarray) -> np.ndarray:
    """Map original-space points into canonical coordinates (negate decreasing
    features). Works on a single point or a batch; returns a copy."""
    X = np.array(X, dtype=np.float64, copy=True)
    dec = list(spec.decreasing_indices)
    if dec:
        X[..., dec] *= -1.0
    return X


# ---------------------------------------------------------------------------
# serialization


def network_to_dict(net: Network) -> dict:
    return {
        "input_dim": net.input_dim,
        "input_box": {
            "lower": net.input_box.lower.tolist(),
            "upper": net.input_box.upper.tolist(),
        },
        "output_kind": net.output_kind,
        "layers": [
            {
                "weights": layer.weights.tolist(),
                "biases": layer.biases.tolist(),
                "activation": layer.activation,
            }
            for layer in net.layers
        ],
    }


def save_network(net: Network, path) -> None:
    """Write the network as JSON. Floats round-trip exactly (shortest repr)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_dict(net), fh, indent=2)
        fh.write("\n")


def _require(doc: dict, key: str, path: str):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"{path}.{key}" if path else key, "missing required field")
    return doc[key]


def network_from_dict(doc: dict) -> Network:
    input_dim = _require(doc, "input_dim", "")
    if not isinstance(input_dim, int) or input_dim < 1:
        raise SchemaError("input_dim", "must be a positive integer")
    box_doc = _require(doc, "input_box", "")
    lower = _require(box_doc, "lower", "input_box")
    upper = _require(box_doc, "upper", "input_box")
    output_kind = _require(doc, "output_kind", "")
    if output_kind not in (REGRESSION, BINARY_LOGIT):
        raise SchemaError("output_kind", f"must be {REGRESSION!r} or {BINARY_LOGIT!r}")
    layers_doc = _require(doc, "layers", "")
    if not isinstance(layers_doc, list) or not layers_doc:
        raise SchemaError("layers", "must be a non-empty list")
    layers = []
    for k, ld in enumerate(layers_doc):
        where = f"layers[{k}]"
        weights = _require(ld, "weights", where)
        biases = _require(ld, "biases", where)
        activation = _require(ld, "activation", where)
        try:
            layers.append(Layer(weights, biases, activation))
        except InvalidInputError as exc:
            raise SchemaError(where, str(exc)) from exc
    try:
        box = InputBox(lower, upper)
        return Network(input_dim, box, output_kind, tuple(layers))
    except InvalidInputError as exc:
        raise SchemaError("network", str(exc)) from exc


def load_network(path) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("document", f"not valid JSON: {exc}") from exc
    return network_from_dict(doc)


def save_monotone_spec(spec: MonotoneSpec, path) -> None:
    doc = {"features": [{"index": f.index, "direction": f.direction} for f in spec.features]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_monotone_spec(path) -> MonotoneSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("document", f"not valid JSON: {exc}") from exc
    feats_doc = _require(doc, "features", "")
    if not isinstance(feats_doc, list):
        raise SchemaError("features", "must be a list")
    feats = []
    for k, fd in enumerate(feats_doc):
        where = f"features[{k}]"
        index = _require(fd, "index", where)
        direction = _require(fd, "direction", where)
        try:
            feats.append(MonotoneFeature(index, direction))
        except InvalidInputError as exc:
            raise SchemaError(where, str(exc)) from exc
    try:
        return MonotoneSpec(tuple(feats))
    except InvalidInputError as exc:
        raise SchemaError("features", str(exc)) from exc
