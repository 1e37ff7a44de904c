import json

import numpy as np
import pytest

import fixture_nets
from monomlp.errors import InvalidInputError, NumericError, SchemaError
from monomlp.network import (
    InputBox,
    Layer,
    MonotoneFeature,
    MonotoneSpec,
    Network,
    canonicalize,
    forward,
    forward_batch,
    forward_trace,
    load_monotone_spec,
    load_network,
    network_from_dict,
    network_to_dict,
    reflect_points,
    save_monotone_spec,
    save_network,
)


def test_ramp_trace(ramp):
    out, pre = forward_trace(ramp, np.array([-1.0]))
    assert out == 0.0
    assert len(pre) == 1
    np.testing.assert_array_equal(pre[0], [-1.0])


def test_tent1d_trace(tent1d):
    out, pre = forward_trace(tent1d, np.array([0.5]))
    assert out == 0.5
    np.testing.assert_array_equal(pre[0], [0.5, -0.5])

    out, pre = forward_trace(tent1d, np.array([2.0]))
    assert out == 0.0
    np.testing.assert_array_equal(pre[0], [2.0, 1.0])


def test_house1d_hits_all_knots(house1d):
    for x, y in fixture_nets.HOUSE1D_POINTS:
        assert forward(house1d, np.array([x])) == pytest.approx(y, abs=1e-12)


def test_forward_batch_matches_forward(rng, tent2d):
    X = rng.random((50, 2)) * 2.0
    batch = forward_batch(tent2d, X)
    single = np.array([forward(tent2d, x) for x in X])
    # batch path uses BLAS gemm, so agreement is to rounding, not bitwise
    np.testing.assert_allclose(batch, single, rtol=0, atol=1e-12)


def test_forward_rejects_dimension_mismatch(tent1d):
    with pytest.raises(InvalidInputError):
        forward(tent1d, np.array([0.5, 0.5]))


def test_forward_rejects_out_of_box(tent1d):
    with pytest.raises(InvalidInputError):
        forward(tent1d, np.array([2.5]))
    # tolerance: 1e-10 past the edge is accepted
    assert forward(tent1d, np.array([2.0 + 1e-10])) == pytest.approx(0.0, abs=1e-9)


def test_forward_raises_numeric_error_on_overflow():
    big = Network(
        input_dim=1,
        input_box=InputBox([-1e200], [1e200]),
        output_kind="regression",
        layers=(
            Layer([[1e200]], [0.0], "relu"),
            Layer([[1e200]], [0.0], "linear"),
        ),
    )
    with pytest.raises(NumericError):
        forward(big, np.array([1e200]))


def test_network_structure_validation():
    box = InputBox([0.0], [1.0])
    with pytest.raises(InvalidInputError):
        # hidden layer must be relu
        Network(1, box, "regression", (Layer([[1.0]], [0.0], "linear"), Layer([[1.0]], [0.0], "linear")))
    with pytest.raises(InvalidInputError):
        # final layer must be linear
        Network(1, box, "regression", (Layer([[1.0]], [0.0], "relu"),))
    with pytest.raises(InvalidInputError):
        # final layer must have one unit
        Network(1, box, "regression", (Layer([[1.0], [1.0]], [0.0, 0.0], "linear"),))
    with pytest.raises(InvalidInputError):
        # shape chain must match
        Network(1, box, "regression", (Layer([[1.0, 2.0]], [0.0], "linear"),))
    with pytest.raises(InvalidInputError):
        Layer([[1.0, 2.0], [3.0]], [0.0, 0.0], "relu")
    with pytest.raises(InvalidInputError):
        Layer([[np.inf]], [0.0], "relu")


def test_box_validation():
    with pytest.raises(InvalidInputError):
        InputBox([1.0], [0.0])
    box = InputBox([0.0, 0.0], [1.0, 2.0])
    assert box.contains(np.array([0.5, 1.5]))
    assert not box.contains(np.array([0.5, 2.5]))


def test_monotone_spec_validation():
    with pytest.raises(InvalidInputError):
        MonotoneSpec((MonotoneFeature(0, "increasing"), MonotoneFeature(0, "decreasing")))
    with pytest.raises(InvalidInputError):
        MonotoneFeature(0, "sideways")
    spec = MonotoneSpec.from_mapping({2: "decreasing", 0: "increasing"})
    assert spec.indices == (0, 2)
    assert spec.direction_of(2) == "decreasing"
    with pytest.raises(InvalidInputError):
        spec.validate_for_dim(2)


def test_canonicalize_neg(neg):
    spec = MonotoneSpec.from_mapping({0: "decreasing"})
    canon, canon_spec = canonicalize(neg, spec)
    assert canon_spec.features[0].direction == "increasing"
    np.testing.assert_array_equal(canon.input_box.lower, [-1.0])
    np.testing.assert_array_equal(canon.input_box.upper, [0.0])
    # g(t) = relu(1 + t)
    assert forward(canon, np.array([-0.25])) == 0.75
    rng = np.random.default_rng(7)
    for _ in range(100):
        x = rng.random(1)
        assert forward(canon, -x) == forward(neg, x)


def test_canonicalize_is_involutive(rng):
    net = fixture_nets.random_network(rng, 3, (5, 4), box=(-1.0, 2.0))
    spec = MonotoneSpec.from_mapping({0: "decreasing", 2: "decreasing"})
    canon, _ = canonicalize(net, spec)
    back, _ = canonicalize(canon, spec)
    for la, lb in zip(net.layers, back.layers):
        np.testing.assert_array_equal(la.weights, lb.weights)
        np.testing.assert_array_equal(la.biases, lb.biases)
    np.testing.assert_array_equal(net.input_box.lower, back.input_box.lower)
    np.testing.assert_array_equal(net.input_box.upper, back.input_box.upper)


def test_reflect_points():
    spec = MonotoneSpec.from_mapping({1: "decreasing"})
    X = np.array([[1.0, 2.0], [3.0, -4.0]])
    R = reflect_points(spec, X)
    np.testing.assert_array_equal(R, [[1.0, -2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(X, [[1.0, 2.0], [3.0, -4.0]])  # input untouched


def test_save_load_round_trip(tmp_path, rng):
    net = fixture_nets.random_network(rng, 3, (7, 5), box=(-0.5, 1.5), output_kind="binary-logit")
    path = tmp_path / "net.json"
    save_network(net, path)
    loaded = load_network(path)
    assert loaded.output_kind == "binary-logit"
    for la, lb in zip(net.layers, loaded.layers):
        np.testing.assert_array_equal(la.weights, lb.weights)
        np.testing.assert_array_equal(la.biases, lb.biases)
    for _ in range(100):
        x = fixture_nets.random_point(rng, net)
        assert forward(net, x) == forward(loaded, x)


def test_load_rejects_bad_documents(tmp_path):
    doc = network_to_dict(fixture_nets.tent1d())
    doc["layers"][0]["weights"] = [[1.0], [1.0, 2.0]]  # ragged row
    with pytest.raises(SchemaError) as exc:
        network_from_dict(doc)
    assert "layers[0]" in str(exc.value)

    doc = network_to_dict(fixture_nets.tent1d())
    del doc["input_box"]
    with pytest.raises(SchemaError) as exc:
        network_from_dict(doc)
    assert "input_box" in str(exc.value)

    doc = network_to_dict(fixture_nets.tent1d())
    doc["output_kind"] = "multiclass"
    with pytest.raises(SchemaError):
        network_from_dict(doc)

    doc = network_to_dict(fixture_nets.tent1d())
    doc["layers"][0]["activation"] = "linear"  # hidden layer must stay relu
    with pytest.raises(SchemaError):
        network_from_dict(doc)

    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        load_network(p)


def test_monotone_spec_file_round_trip(tmp_path):
    spec = MonotoneSpec.from_mapping({0: "increasing", 3: "decreasing"})
    path = tmp_path / "spec.json"
    save_monotone_spec(spec, path)
    loaded = load_monotone_spec(path)
    assert loaded == spec
    doc = json.loads(path.read_text())
    assert doc == {
        "features": [
            {"index": 0, "direction": "increasing"},
            {"index": 3, "direction": "decreasing"},
        ]
    }


def test_load_monotone_spec_rejects_bad_direction(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text('{"features": [{"index": 0, "direction": "up"}]}')
    with pytest.raises(SchemaError) as exc:
        load_monotone_spec(path)
    assert "features[0]" in str(exc.value)
