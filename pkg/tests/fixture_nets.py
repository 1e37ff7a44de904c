"""Hand-built networks with known closed forms, shared across the test suite."""

from __future__ import annotations

import numpy as np

from monomlp.network import (
    BINARY_LOGIT,
    LINEAR,
    RELU,
    InputBox,
    Layer,
    Network,
)


def ramp() -> Network:
    # f(x) = relu(x)
    return Network(
        input_dim=1,
        input_box=InputBox([-2.0], [4.0]),
        output_kind="regression",
        layers=(
            Layer([[1.0]], [0.0], RELU),
            Layer([[1.0]], [0.0], LINEAR),
        ),
    )


def tent1d() -> Network:
    # f(x) = relu(x) - 2*relu(x - 1): tent with apex (1, 1) on [0, 2]
    return Network(
        input_dim=1,
        input_box=InputBox([0.0], [2.0]),
        output_kind="regression",
        layers=(
            Layer([[1.0], [1.0]], [0.0, -1.0], RELU),
            Layer([[1.0, -2.0]], [0.0], LINEAR),
        ),
    )


def tent2d() -> Network:
    # f(x1, x2) = tent(x1) + tent(x2) on [0, 2]^2
    return Network(
        input_dim=2,
        input_box=InputBox([0.0, 0.0], [2.0, 2.0]),
        output_kind="regression",
        layers=(
            Layer(
                [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]],
                [0.0, -1.0, 0.0, -1.0],
                RELU,
            ),
            Layer([[1.0, -2.0, 1.0, -2.0]], [0.0], LINEAR),
        ),
    )


def neg() -> Network:
    # f(x) = relu(1 - x): decreasing on [0, 1]
    return Network(
        input_dim=1,
        input_box=InputBox([0.0], [1.0]),
        output_kind="regression",
        layers=(
            Layer([[-1.0]], [1.0], RELU),
            Layer([[1.0]], [0.0], LINEAR),
        ),
    )


# Piecewise-linear interpolant through the seven price points
# (1,7) (2,13) (3,11) (4,9) (5,10) (6,18) (7,20), one hinge per knot 1..6.
HOUSE1D_POINTS = [(1.0, 7.0), (2.0, 13.0), (3.0, 11.0), (4.0, 9.0), (5.0, 10.0), (6.0, 18.0), (7.0, 20.0)]


def house1d() -> Network:
    return Network(
        input_dim=1,
        input_box=InputBox([1.0], [7.0]),
        output_kind="regression",
        layers=(
            Layer(
                [[1.0]] * 6,
                [-1.0, -2.0, -3.0, -4.0, -5.0, -6.0],
                RELU,
            ),
            Layer([[6.0, -8.0, 0.0, 3.0, 7.0, -6.0]], [7.0], LINEAR),
        ),
    )


def bump2d() -> Network:
    """Three disjoint L1 bumps on [0, 8]^2.

    Heights 10, 8, 6 at centers (3,3), (1,5), (7,2), each with L1 radius 1.5.
    Along the slice x2=5 the max is 8 at x1=1; along x1=3, t<=5 the max is 10
    at t=3; along x1=7, t<=5 the max is 6 at t=2. Per-dimension upper-envelope
    search therefore disagrees with the joint search between (3,5) and (7,5).
    """
    centers = [(3.0, 3.0), (1.0, 5.0), (7.0, 2.0)]
    heights = [10.0, 8.0, 6.0]
    radius = 1.5
    w1, b1 = [], []
    for c1, c2 in centers:
        w1 += [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
        b1 += [-c1, c1, -c2, c2]
    w2 = np.zeros((3, 12))
    for k in range(3):
        w2[k, 4 * k : 4 * k + 4] = -1.0 / radius
    return Network(
        input_dim=2,
        input_box=InputBox([0.0, 0.0], [8.0, 8.0]),
        output_kind="regression",
        layers=(
            Layer(w1, b1, RELU),
            Layer(w2, [1.0, 1.0, 1.0], RELU),
            Layer([[10.0, 8.0, 6.0]], [0.0], LINEAR),
        ),
    )


def random_network(
    rng: np.random.Generator,
    input_dim: int,
    hidden_sizes: tuple[int, ...],
    box=(0.0, 1.0),
    output_kind: str = "regression",
    scale: float = 1.5,
) -> Network:
    """Random network with O(1) outputs; generally not monotone in anything."""
    sizes = [input_dim, *hidden_sizes, 1]
    layers = []
    for k in range(len(sizes) - 1):
        fan_in = sizes[k]
        W = rng.normal(0.0, scale / np.sqrt(fan_in), size=(sizes[k + 1], fan_in))
        b = rng.normal(0.0, 0.3, size=sizes[k + 1])
        layers.append(Layer(W, b, RELU if k < len(sizes) - 2 else LINEAR))
    lo, hi = box
    return Network(
        input_dim=input_dim,
        input_box=InputBox([lo] * input_dim, [hi] * input_dim),
        output_kind=output_kind,
        layers=tuple(layers),
    )


def random_point(rng: np.random.Generator, net: Network) -> np.ndarray:
    lo, hi = net.input_box.lower, net.input_box.upper
    return lo + (hi - lo) * rng.random(net.input_dim)
