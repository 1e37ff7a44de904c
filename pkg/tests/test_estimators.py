import numpy as np
import pytest
from sklearn.base import clone

from monomlp.errors import InvalidInputError
from monomlp.estimators import MonotoneMLPClassifier, MonotoneMLPRegressor
from monomlp.network import forward_batch
from monomlp.solver import SolverConfig


def _noisy_monotone(n=60, seed=3):
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 1.0, size=(n, 1))
    y = X[:, 0] + 0.4 * rng.normal(size=n)
    return X, y


def test_regressor_envelope_predictions_are_monotone():
    # few points plus heavy noise so the net overfits into wiggles
    rng = np.random.default_rng(42)
    X = rng.uniform(0.0, 1.0, size=(12, 1))
    y = X[:, 0] + 0.5 * rng.normal(size=12)
    est = MonotoneMLPRegressor(
        hidden_sizes=(32,), monotone={0: "increasing"}, epochs=2000,
        learning_rate=0.01, batch_size=2, seed=3,
    )
    est.fit(X, y)
    grid = np.linspace(X.min(), X.max(), 40).reshape(-1, 1)
    preds = est.predict(grid)
    assert np.all(np.diff(preds) >= -2e-6)
    # the raw net actually needed correcting somewhere, or the test is vacuous
    raw = forward_batch(est.network_, grid)
    assert np.any(np.diff(raw) < -2e-6)


def test_regressor_decreasing_direction():
    X, y = _noisy_monotone()
    est = MonotoneMLPRegressor(
        hidden_sizes=(8,), monotone={0: "decreasing"}, epochs=400,
        learning_rate=0.01, batch_size=8, seed=1,
    )
    est.fit(X, -y)
    grid = np.linspace(0.0, 1.0, 25).reshape(-1, 1)
    preds = est.predict(grid)
    assert np.all(np.diff(preds) <= 2e-6)


def test_regressor_envelope_off_matches_raw_network():
    X, y = _noisy_monotone(n=30)
    est = MonotoneMLPRegressor(hidden_sizes=(6,), envelope="off", epochs=50, seed=0)
    est.fit(X, y)
    grid = np.linspace(X.min(), X.max(), 11).reshape(-1, 1)
    assert est.predict(grid) == pytest.approx(forward_batch(est.network_, grid))


def test_regressor_clips_out_of_box_inputs():
    X, y = _noisy_monotone(n=30)
    est = MonotoneMLPRegressor(hidden_sizes=(6,), envelope="off", epochs=50, seed=0)
    est.fit(X, y)
    inside = est.predict(np.array([[X[:, 0].max()]]))
    outside = est.predict(np.array([[X[:, 0].max() + 5.0]]))
    assert outside == pytest.approx(inside)


def test_params_roundtrip_and_clone():
    est = MonotoneMLPRegressor(
        hidden_sizes=(4, 4), monotone={0: "increasing"}, epochs=7,
        solver=SolverConfig(max_nodes=5000),
    )
    params = est.get_params()
    assert params["epochs"] == 7
    assert params["monotone"] == {0: "increasing"}
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(epochs=9)
    assert est.get_params()["epochs"] == 9


def test_fit_validation_errors():
    est = MonotoneMLPRegressor(epochs=5)
    with pytest.raises(InvalidInputError):
        est.fit(np.zeros(4), np.zeros(4))  # X not 2d
    with pytest.raises(InvalidInputError):
        est.fit(np.zeros((4, 2)), np.zeros(3))  # length mismatch
    with pytest.raises(InvalidInputError):
        MonotoneMLPRegressor(monotone={5: "increasing"}, epochs=5).fit(
            np.zeros((4, 2)), np.zeros(4)
        )  # monotone index out of range
    with pytest.raises(InvalidInputError):
        MonotoneMLPRegressor(envelope="sideways", epochs=5).fit(
            np.zeros((4, 2)), np.zeros(4)
        )
    with pytest.raises(InvalidInputError):
        est.predict(np.zeros((2, 1)))  # not fitted


def test_predict_rejects_wrong_width():
    X, y = _noisy_monotone(n=20)
    est = MonotoneMLPRegressor(hidden_sizes=(4,), epochs=20, envelope="off").fit(X, y)
    with pytest.raises(InvalidInputError):
        est.predict(np.zeros((3, 2)))


def test_classifier_proba_monotone_and_valid():
    rng = np.random.default_rng(7)
    X = rng.uniform(0.0, 1.0, size=(80, 1))
    y = (X[:, 0] + 0.35 * rng.normal(size=80) > 0.5).astype(float)
    est = MonotoneMLPClassifier(
        hidden_sizes=(12,), monotone={0: "increasing"}, epochs=600,
        learning_rate=0.02, batch_size=8, seed=2,
    )
    est.fit(X, y)
    grid = np.linspace(0.0, 1.0, 30).reshape(-1, 1)
    proba = est.predict_proba(grid)
    assert proba.shape == (30, 2)
    assert np.all(proba >= 0.0) and np.all(proba <= 1.0)
    assert np.allclose(proba.sum(axis=1), 1.0)
    assert np.all(np.diff(proba[:, 1]) >= -1e-6)
    labels = est.predict(grid)
    assert set(labels.tolist()) <= {0, 1}
    assert (labels == (proba[:, 1] >= 0.5).astype(int)).all()


def test_classifier_rejects_nonbinary_targets():
    with pytest.raises(InvalidInputError):
        MonotoneMLPClassifier(epochs=5).fit(np.zeros((4, 1)), np.array([0.0, 1.0, 2.0, 1.0]))
