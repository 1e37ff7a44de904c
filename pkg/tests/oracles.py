"""Independent reference implementations used to freeze expected values.

Everything here avoids the solver's code paths on purpose: dense grids and
numeric root-finding only, built on the public forward functions.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from monomlp.network import Network, forward_batch, forward_trace


def grid_max(net: Network, fixed: dict[int, float], free: dict[int, tuple[float, float]],
             n_per_axis: int, chunk: int = 2_000_000):
    """Dense-grid maximum over the query box. Returns (value, argmax point)."""
    d = net.input_dim
    base = np.zeros(d)
    for i, v in fixed.items():
        base[i] = v
    free_idx = sorted(free)
    axes = [np.linspace(free[i][0], free[i][1], n_per_axis) for i in free_idx]
    total = int(np.prod([a.size for a in axes]))
    best_val = -np.inf
    best_x = None
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        idx = np.arange(start, stop)
        X = np.tile(base, (stop - start, 1))
        rem = idx
        for ax_pos in range(len(axes) - 1, -1, -1):
            ax = axes[ax_pos]
            X[:, free_idx[ax_pos]] = ax[rem % ax.size]
            rem = rem // ax.size
        vals = forward_batch(net, X, check=False)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val = float(vals[k])
            best_x = X[k].copy()
    return best_val, best_x


def grid_min(net, fixed, free, n_per_axis, chunk: int = 2_000_000):
    neg = _negated(net)
    val, x = grid_max(neg, fixed, free, n_per_axis, chunk)
    return -val, x


def _negated(net: Network) -> Network:
    from monomlp.network import Layer, LINEAR

    last = net.layers[-1]
    return Network(
        net.input_dim,
        net.input_box,
        net.output_kind,
        net.layers[:-1] + (Layer(-last.weights, -last.biases, LINEAR),),
    )


def _preact_along_line(net: Network, x0: np.ndarray, coord: int, t: float) -> np.ndarray:
    x = x0.copy()
    x[coord] = t
    _, pre = forward_trace(net, x, check=False)
    return np.concatenate(pre)


def line_breakpoints_numeric(net: Network, x0: np.ndarray, coord: int,
                             lo: float, hi: float, n_scan: int = 4001) -> np.ndarray:
    """Zero crossings of every ReLU preactivation along the segment, found by
    scanning plus brentq refinement. Half-open: roots in [lo, hi)."""
    ts = np.linspace(lo, hi, n_scan)
    vals = np.array([_preact_along_line(net, x0, coord, t) for t in ts])  # (n_scan, n_neurons)
    roots: list[float] = []
    n_neurons = vals.shape[1]
    for j in range(n_neurons):
        v = vals[:, j]
        exact = ts[v == 0.0]
        roots.extend(float(t) for t in exact)
        sign_change = np.flatnonzero(v[:-1] * v[1:] < 0.0)
        for k in sign_change:
            f = lambda t: float(_preact_along_line(net, x0, coord, t)[j])
            roots.append(float(brentq(f, ts[k], ts[k + 1], xtol=1e-13)))
    roots = sorted(r for r in roots if lo <= r < hi)
    dedup: list[float] = []
    tol = 1e-9 * max(1.0, abs(lo), abs(hi))
    for r in roots:
        if not dedup or r - dedup[-1] > tol:
            dedup.append(r)
    return np.array(dedup)


def line_extremum_numeric(net: Network, x0: np.ndarray, coord: int,
                          lo: float, hi: float, sense: str = "max"):
    """Exact line extremum via the numeric breakpoint enumeration: piecewise
    linear functions attain extrema at breakpoints or endpoints."""
    breaks = line_breakpoints_numeric(net, x0, coord, lo, hi)
    cand = np.unique(np.concatenate([[lo, hi], breaks]))
    X = np.tile(x0, (cand.size, 1))
    X[:, coord] = cand
    vals = forward_batch(net, X, check=False)
    k = int(np.argmax(vals)) if sense == "max" else int(np.argmin(vals))
    return float(vals[k]), float(cand[k])


def pair_max_violation_grid(net: Network, feature: int, n_axis: int = 2001,
                            n_shared: int = 7):
    """Brute-force max of f(x) - f(x') over x[feature]=t <= t'=x'[feature],
    other coordinates shared, on a dense grid. Returns (violation, t, t', shared)."""
    d = net.input_dim
    box = net.input_box
    ts = np.linspace(box.lower[feature], box.upper[feature], n_axis)
    shared_idx = [i for i in range(d) if i != feature]
    if shared_idx:
        axes = [np.linspace(box.lower[i], box.upper[i], n_shared) for i in shared_idx]
        mesh = np.meshgrid(*axes, indexing="ij")
        shared_points = np.stack([m.ravel() for m in mesh], axis=1)
    else:
        shared_points = np.zeros((1, 0))
    best = (-np.inf, None, None, None)
    for sp in shared_points:
        X = np.tile(np.zeros(d), (n_axis, 1))
        for k, i in enumerate(shared_idx):
            X[:, i] = sp[k]
        X[:, feature] = ts
        f = forward_batch(net, X, check=False)
        run_max = np.maximum.accumulate(f)  # max over t <= t'
        viol = run_max - f
        j = int(np.argmax(viol))
        if viol[j] > best[0]:
            i_best = int(np.argmax(f[: j + 1]))
            best = (float(viol[j]), float(ts[i_best]), float(ts[j]), sp.copy())
    return best
