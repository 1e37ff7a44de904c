"""Scikit-learn style estimator facade over the functional core.

Trains a ReLU MLP with Adam and, when a monotone feature mapping is given,
serves predictions through the certified envelope so the fitted model is
monotone in those features by construction. Parameters mirror the functional
API one-to-one; everything here delegates.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin

from .envelope import LOWER, UPPER, predict as envelope_predict, predict_probability
from .errors import InvalidInputError
from .network import BINARY_LOGIT, REGRESSION, InputBox, MonotoneSpec, forward_batch
from .solver import SolverConfig
from .training import LOSS_BCE, LOSS_MSE, LabeledDataset, TrainConfig, init_network, train

_MODES = {"upper": UPPER, "lower": LOWER}


class _MonotoneMLPBase(BaseEstimator):
    def __init__(
        self,
        hidden_sizes=(16,),
        monotone=None,
        envelope="upper",
        batch_size=32,
        epochs=200,
        learning_rate=1e-3,
        seed=0,
        solver=None,
    ):
        self.hidden_sizes = hidden_sizes
        self.monotone = monotone
        self.envelope = envelope
        self.batch_size = batch_size
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed
        self.solver = solver

    _output_kind = REGRESSION
    _loss = LOSS_MSE

    def _check_fitted(self):
        if not hasattr(self, "network_"):
            raise InvalidInputError("estimator is not fitted yet; call fit first")

    def _validate_xy(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2:
            raise InvalidInputError(f"X must be 2d, got shape {X.shape}")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise InvalidInputError("y must be 1d with one entry per row of X")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise InvalidInputError("X and y must be finite")
        return X, y

    def _fit_core(self, X, y):
        if self.envelope not in ("upper", "lower", "off"):
            raise InvalidInputError(
                f"envelope must be 'upper', 'lower', or 'off', got {self.envelope!r}"
            )
        mapping = dict(self.monotone or {})
        spec = MonotoneSpec.from_mapping(mapping)
        spec.validate_for_dim(X.shape[1])
        # the box is the data's bounding box; predictions are clipped into it
        box = InputBox(X.min(axis=0), X.max(axis=0))
        net = init_network(
            X.shape[1], tuple(self.hidden_sizes), box, output_kind=self._output_kind,
            seed=self.seed,
        )
        cfg = TrainConfig(
            batch_size=self.batch_size,
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            loss=self._loss,
            seed=self.seed,
        )
        self.network_ = train(net, LabeledDataset(X, y), cfg)
        self.spec_ = spec
        self.input_box_ = box
        self.solver_ = self.solver if self.solver is not None else SolverConfig()
        self.n_features_in_ = X.shape[1]
        return self

    def _raw_outputs(self, X):
        """Network-scale outputs (envelope-corrected unless disabled)."""
        self._check_fitted()
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise InvalidInputError(
                f"X must have shape (n, {self.n_features_in_}), got {X.shape}"
            )
        X = np.clip(X, self.input_box_.lower, self.input_box_.upper)
        if self.envelope == "off" or not self.spec_.features:
            return forward_batch(self.network_, X)
        mode = _MODES[self.envelope]
        return np.array(
            [envelope_predict(self.network_, self.spec_, x, mode, self.solver_).value for x in X]
        )


class MonotoneMLPRegressor(_MonotoneMLPBase, RegressorMixin):
    """MLP regressor whose predictions are monotone in the given features.

    monotone maps feature index to "increasing" or "decreasing". With the
    default envelope="upper" every prediction is the certified upper envelope
    of the trained net; "lower" picks the other side; "off" serves the raw
    net. Inputs outside the training bounding box are clipped to it.
    """

    def fit(self, X, y):
        X, y = self._validate_xy(X, y)
        return self._fit_core(X, y)

    def predict(self, X):
        return self._raw_outputs(X)


class MonotoneMLPClassifier(_MonotoneMLPBase, ClassifierMixin):
    """Binary classifier on a logit-output MLP with envelope-monotone scores.

    Targets must be 0/1. predict_proba applies the sigmoid to the
    envelope-corrected logit, so the class-1 probability inherits the
    monotonicity guarantee.
    """

    _output_kind = BINARY_LOGIT
    _loss = LOSS_BCE

    def fit(self, X, y):
        X, y = self._validate_xy(X, y)
        values = np.unique(y)
        if not np.isin(values, (0.0, 1.0)).all():
            raise InvalidInputError("classifier targets must be 0 or 1")
        self.classes_ = np.array([0, 1])
        return self._fit_core(X, y)

    def predict_proba(self, X):
        self._check_fitted()
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise InvalidInputError(
                f"X must have shape (n, {self.n_features_in_}), got {X.shape}"
            )
        X = np.clip(X, self.input_box_.lower, self.input_box_.upper)
        if self.envelope == "off" or not self.spec_.features:
            logits = forward_batch(self.network_, X)
            p1 = np.where(logits >= 0, 1.0 / (1.0 + np.exp(-logits)),
                          np.exp(logits) / (1.0 + np.exp(logits)))
        else:
            mode = _MODES[self.envelope]
            p1 = np.array(
                [
                    predict_probability(self.network_, self.spec_, x, mode, self.solver_)
                    for x in X
                ]
            )
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        return self.classes_[(self.predict_proba(X)[:, 1] >= 0.5).astype(int)]
