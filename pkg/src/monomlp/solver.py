"""Certified extremum search over ReLU networks on axis-aligned boxes.

The engine is branch and bound. Each box is bounded by interval propagation
through the layers; the widest free interval is split at its midpoint. A box
on which every ReLU neuron is stable (its preactivation interval excludes
zero) makes the restriction affine, so its exact extremum sits at a corner
and the box can be closed outright. A neuron whose preactivation interval
still straddles zero is pinned to the side it leans toward, and the induced
output uncertainty (deficit times the downstream absolute-weight chain) is
added to the bound; the uncertainty shrinks with the box, which guarantees
termination on kinks that sit exactly at an optimum. Boxes whose free
intervals are all narrower than ``neuron_stability_slack`` are closed on the
current bound rather than split further.

Two extras live here as well: an exact walk along a single free coordinate
(the restriction is piecewise affine, so its breakpoints can be enumerated),
and a global pairwise monotonicity search that runs the same engine over a
doubled "pair network" computing f(x) - f(x') with the ordering constraint
t <= t' on the varied feature.
"""

from __future__ import annotations

import heapq
import time
import weakref
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .network import LINEAR, RELU, InputBox, Layer, Network, forward

MODE_ANY = "any"
MODE_MAXIMAL = "maximal"

STATUS_MONOTONE = "monotone"
STATUS_COUNTEREXAMPLE = "counterexample"
STATUS_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-6  # target certification gap
    delta: float = 1e-9  # margin standing in for strict inequalities
    max_nodes: int = 10**6
    neuron_stability_slack: float = 1e-12

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidInputError("epsilon must be positive")
        if self.delta < 0:
            raise InvalidInputError("delta must be nonnegative")
        if self.max_nodes < 1:
            raise InvalidInputError("max_nodes must be at least 1")
        if self.neuron_stability_slack <= 0:
            raise InvalidInputError("neuron_stability_slack must be positive")


@dataclass(frozen=True)
class BoxQuery:
    """Search region: some coordinates pinned, the rest ranging over intervals."""

    fixed: dict[int, float]
    free: dict[int, tuple[float, float]]

    @classmethod
    def around_point(cls, x: np.ndarray, free: dict[int, tuple[float, float]]) -> "BoxQuery":
        fixed = {i: float(v) for i, v in enumerate(np.asarray(x, dtype=float)) if i not in free}
        return cls(fixed=fixed, free=dict(free))

    @classmethod
    def whole_box(cls, box: InputBox) -> "BoxQuery":
        return cls(fixed={}, free={i: (float(box.lower[i]), float(box.upper[i])) for i in range(box.dim)})

    def bounds(self, net: Network) -> tuple[np.ndarray, np.ndarray]:
        """Validate against the network and return (lo, hi) vectors."""
        d = net.input_dim
        seen = sorted(list(self.fixed) + list(self.free))
        if seen != list(range(d)):
            raise InvalidInputError(
                f"fixed and free index sets must partition 0..{d - 1}, got {seen}"
            )
        lo = np.empty(d)
        hi = np.empty(d)
        for i, v in self.fixed.items():
            lo[i] = hi[i] = v
        for i, (a, b) in self.free.items():
            if not a <= b:
                raise InvalidInputError(f"free interval for feature {i} has lo > hi")
            lo[i], hi[i] = a, b
        box = net.input_box
        tol = 1e-9
        if np.any(lo < box.lower - tol) or np.any(hi > box.upper + tol):
            raise InvalidInputError("query box leaves the network input box")
        return lo, hi


@dataclass(frozen=True)
class ExtremumResult:
    witness: np.ndarray
    witness_value: float
    certified_bound: float
    gap: float  # bound - value for max, value - bound for min
    nodes_explored: int
    wall_time: float
    incomplete: bool = False


@dataclass(frozen=True)
class PairCounterexample:
    x: np.ndarray
    x_prime: np.ndarray
    feature: int
    violation: float  # f(x) - f(x_prime), positive


@dataclass(frozen=True)
class PairSearchResult:
    """Outcome of the global pairwise search.

    status is one of: "monotone" (certified: no pair with violation above
    delta exists), "counterexample" (pair holds one), "inconclusive" (node
    budget ran out before either could be established).
    """

    status: str
    pair: PairCounterexample | None
    certified_bound: float  # sound upper bound on the supremum violation
    nodes_explored: int
    wall_time: float
    incomplete: bool = False


@dataclass(frozen=True)
class IntervalBounds:
    preactivation: tuple[tuple[np.ndarray, np.ndarray], ...]  # per relu layer (lo, hi)
    post: tuple[tuple[np.ndarray, np.ndarray], ...]  # same, after the ReLU clamp
    output: tuple[float, float]


class _Ctx:
    """Per-network precomputation shared by every box the engine visits."""

    def __init__(self, net: Network):
        self.net = net
        self.W = [l.weights for l in net.layers]
        self.b = [l.biases for l in net.layers]
        self.relu = [l.activation == RELU for l in net.layers]
        if any(self.relu[-1:]) or not all(self.relu[:-1]):
            raise InvalidInputError("solver expects relu hidden layers and a linear output layer")
        self.Wpos = [np.maximum(W, 0.0) for W in self.W]
        self.Wneg = [np.minimum(W, 0.0) for W in self.W]
        self.Wabs = [np.abs(W) for W in self.W]
        # per-input Lipschitz factors (relu is 1-Lipschitz)
        chain = np.abs(self.W[-1])[0]
        for l in range(len(self.W) - 2, -1, -1):
            chain = chain @ self.Wabs[l]
        self.input_sens = chain

    def forward_raw(self, x: np.ndarray) -> float:
        y = x
        for W, b, relu in zip(self.W, self.b, self.relu):
            y = W @ y + b
            if relu:
                y = np.maximum(y, 0.0)
        return float(y[0])

    def ibp(self, lo: np.ndarray, hi: np.ndarray):
        """Preactivation intervals per relu layer plus the output interval."""
        pre = []
        lo_c, hi_c = lo, hi
        for Wp, Wn, b, relu in zip(self.Wpos, self.Wneg, self.b, self.relu):
            z_lo = Wp @ lo_c + Wn @ hi_c + b
            z_hi = Wp @ hi_c + Wn @ lo_c + b
            if relu:
                pre.append((z_lo, z_hi))
                lo_c = np.maximum(z_lo, 0.0)
                hi_c = np.maximum(z_hi, 0.0)
            else:
                lo_c, hi_c = z_lo, z_hi
        return pre, float(lo_c[0]), float(hi_c[0])

    def node_eval(self, lo: np.ndarray, hi: np.ndarray, center: np.ndarray):
        """Fused per-box evaluation for the search loop.

        Forward pass: interval preactivation bounds per relu layer (mid/radius
        form, algebraically equal to the two-sided product form) plus the
        plain interval output bound. Backward pass: a single affine function
        of the input that dominates the network on the box, built by replacing
        each relu with its chord (when the accumulated coefficient is
        nonnegative, the chord is the exact convex hull) or with a lower
        secant pinned to the side the interval leans toward (when the
        coefficient is negative, any line below the relu is sound). Stable
        neurons pass through exactly, so the bound collapses to the true
        affine piece once every neuron is stable.

        Returns (interval upper bound, dominating-affine value at the box
        center, its gradient, relaxation slack, dominant first-layer straddler
        as (slack share, neuron, center preactivation) or None).
        """
        mid = center
        rad = 0.5 * (hi - lo)
        pre = []
        zc0 = None
        out_hi = None
        for k, (W, b, relu) in enumerate(zip(self.W, self.b, self.relu)):
            zm = W @ mid + b
            zr = self.Wabs[k] @ rad
            if not relu:
                out_hi = float(zm[0] + zr[0])
                break
            z_lo = zm - zr
            z_hi = zm + zr
            if k == 0:
                zc0 = zm  # first-layer preactivations at the box center
            pre.append((z_lo, z_hi))
            p_lo = np.maximum(z_lo, 0.0)
            p_hi = np.maximum(z_hi, 0.0)
            mid = 0.5 * (p_lo + p_hi)
            rad = 0.5 * (p_hi - p_lo)
        if out_hi is None:
            raise AssertionError("network must end in a linear layer")

        A = self.W[-1][0].copy()
        c = float(self.b[-1][0])
        slack = 0.0
        first = None
        for k in range(len(pre) - 1, -1, -1):
            z_lo, z_hi = pre[k]
            straddle = (z_lo < 0.0) & (z_hi > 0.0)
            alpha = (z_lo >= 0.0).astype(float)
            if straddle.any():
                up = straddle & (A > 0.0)
                dn = straddle & ~up
                contrib = np.zeros_like(A)
                if up.any():
                    a_up = z_hi[up] / (z_hi[up] - z_lo[up])
                    alpha[up] = a_up
                    consts = A[up] * a_up * (-z_lo[up])
                    c += float(consts.sum())
                    contrib[up] = consts
                if dn.any():
                    alpha[dn] = (z_hi[dn] >= -z_lo[dn]).astype(float)
                    contrib[dn] = -A[dn] * np.minimum(-z_lo[dn], z_hi[dn])
                slack += float(contrib.sum())
                if k == 0:
                    j = int(np.argmax(contrib))
                    first = (float(contrib[j]), j, float(zc0[j]))
            A = A * alpha
            if k > 0:
                c += float(A @ self.b[k])
                A = A @ self.W[k]
        if pre:
            grad = A @ self.W[0]
            c += float(A @ self.b[0])
        else:
            grad = A  # no relu layers: the network is affine already
        return out_hi, c + float(grad @ center), grad, slack, first


_ctx_cache: "weakref.WeakKeyDictionary[Network, _Ctx]" = weakref.WeakKeyDictionary()


def _ctx(net: Network) -> _Ctx:
    ctx = _ctx_cache.get(net)
    if ctx is None:
        ctx = _Ctx(net)
        _ctx_cache[net] = ctx
    return ctx


def interval_bounds(net: Network, query: BoxQuery) -> IntervalBounds:
    """Sound per-neuron preactivation intervals and output interval."""
    lo, hi = query.bounds(net)
    pre, out_lo, out_hi = _ctx(net).ibp(lo, hi)
    post = tuple((np.maximum(a, 0.0), np.maximum(b, 0.0)) for a, b in pre)
    return IntervalBounds(preactivation=tuple(pre), post=post, output=(out_lo, out_hi))


_neg_cache: "weakref.WeakKeyDictionary[Network, Network]" = weakref.WeakKeyDictionary()


def _negate_output(net: Network) -> Network:
    cached = _neg_cache.get(net)
    if cached is None:
        last = net.layers[-1]
        neg = Layer(-last.weights, -last.biases, LINEAR)
        cached = Network(net.input_dim, net.input_box, net.output_kind, net.layers[:-1] + (neg,))
        _neg_cache[net] = cached
    return cached


def _trapezoid_max(vc, grad, center, lo, hi, i_t, i_tp):
    """Max of the affine form over box cut by x[i_t] <= x[i_tp], with argmax.

    Free coordinates other than the pair are optimized by gradient sign; the
    (t, t') rectangle intersected with the half-plane is handled by vertex
    enumeration.
    """
    corner = center.copy()
    base = vc
    d = len(center)
    for i in range(d):
        if i in (i_t, i_tp):
            continue
        g = grad[i]
        if g > 0.0:
            corner[i] = hi[i]
        elif g < 0.0:
            corner[i] = lo[i]
        base += grad[i] * (corner[i] - center[i])
    a, b = grad[i_t], grad[i_tp]
    tlo, thi = lo[i_t], hi[i_t]
    plo, phi = lo[i_tp], hi[i_tp]
    cands = []
    for t, p in ((tlo, plo), (tlo, phi), (thi, plo), (thi, phi)):
        if t <= p:
            cands.append((t, p))
    dlo, dhi = max(tlo, plo), min(thi, phi)
    if dlo <= dhi:  # diagonal t == t' clipped to the rectangle
        cands.append((dlo, dlo))
        cands.append((dhi, dhi))
    best = None
    for t, p in cands:
        val = base + a * (t - center[i_t]) + b * (p - center[i_tp])
        if best is None or val > best[0]:
            best = (val, t, p)
    val, t, p = best
    corner[i_t], corner[i_tp] = t, p
    return val, corner


def _bnb(
    net: Network,
    lo0: np.ndarray,
    hi0: np.ndarray,
    cfg: SolverConfig,
    pair: tuple[int, int] | None = None,
    pair_mode: str = MODE_MAXIMAL,
):
    """Shared maximization engine. Returns
    (best_x, best_val, certified, nodes, wall, incomplete)."""
    ctx = _ctx(net)
    t_start = time.perf_counter()
    eps = cfg.epsilon
    slack = cfg.neuron_stability_slack
    delta = cfg.delta

    best_val = -np.inf
    best_x: np.ndarray | None = None
    sealed = -np.inf
    heap: list = []
    push_seq = 0
    nodes = 0
    incomplete = False

    free_idx = np.flatnonzero(hi0 > lo0)

    def consider(x: np.ndarray):
        nonlocal best_val, best_x
        v = ctx.forward_raw(x)
        if v > best_val:
            best_val = v
            best_x = x.copy()

    if pair is not None:
        # the pair network vanishes on t == t', so its value over a box is at
        # most the feature's Lipschitz factor times the feasible (t, t') span
        pair_lip = min(ctx.input_sens[pair[0]], ctx.input_sens[pair[1]])

    def split_hint(lo, hi, center, relax_slack, first):
        """Choose (axis, point). When the first layer's dominant straddler
        carries most of the relaxation slack, cut at its hinge along the axis
        feeding it the most width (stabilizing it in both children); otherwise
        bisect the axis with the largest width-times-sensitivity product."""
        widths = hi - lo
        if first is not None and first[0] > 0.0 and first[0] >= 0.5 * relax_slack:
            _, neuron, zc = first
            row = ctx.W[0][neuron]
            scores = np.abs(row) * widths
            i = int(np.argmax(scores))
            if scores[i] > 0.0:
                w = widths[i]
                t = center[i] - zc / row[i]
                # keep the cut interior so widths decay geometrically
                t = min(max(t, lo[i] + 0.1 * w), hi[i] - 0.1 * w)
                return i, float(t)
        scores = widths * ctx.input_sens
        i = int(np.argmax(scores))
        if scores[i] <= 0.0:
            i = int(np.argmax(widths))
        return i, 0.5 * float(lo[i] + hi[i])

    def process(lo: np.ndarray, hi: np.ndarray):
        nonlocal sealed, push_seq
        if pair is not None and lo[pair[0]] > hi[pair[1]]:
            return  # entirely outside t <= t'
        center = 0.5 * (lo + hi)
        out_hi, vc, grad, relax_slack, first = ctx.node_eval(lo, hi, center)
        ub = out_hi
        if pair is not None:
            ub = min(ub, pair_lip * (hi[pair[1]] - lo[pair[0]]))
        floor = max(best_val, delta) if pair is not None else best_val
        if ub <= floor:
            if ub > sealed:
                sealed = ub
            return
        # the relaxed affine dominates f on the box, so its maximum there is
        # itself a sound upper bound, and its argmax is the witness candidate
        if pair is not None:
            val, corner = _trapezoid_max(vc, grad, center, lo, hi, pair[0], pair[1])
        else:
            corner = np.where(grad > 0.0, hi, lo)
            val = vc + float(grad @ (corner - center))
        consider(corner)  # may raise best_val, hence the recomputed floor
        ub = min(ub, val)
        floor = max(best_val, delta) if pair is not None else best_val
        if ub <= floor or float(np.max(hi - lo)) <= slack:
            if ub > sealed:
                sealed = ub
            return
        heapq.heappush(heap, (-ub, push_seq, lo, hi, split_hint(lo, hi, center, relax_slack, first)))
        push_seq += 1

    # a couple of cheap witnesses before anything else
    if pair is None:
        consider(hi0.copy())
        if free_idx.size:
            consider(lo0.copy())
    process(lo0, hi0)

    while heap:
        ub_top = -heap[0][0]
        if pair is not None:
            if best_val > delta and (pair_mode == MODE_ANY or ub_top - best_val <= eps):
                break
            if best_val <= delta and ub_top <= delta:
                break
        else:
            if ub_top - best_val <= eps:
                break
        if nodes >= cfg.max_nodes:
            incomplete = True
            break
        nodes += 1
        _, _, lo, hi, (j, t) = heapq.heappop(heap)
        left_hi = hi.copy()
        left_hi[j] = t
        right_lo = lo.copy()
        right_lo[j] = t
        process(lo, left_hi)
        process(right_lo, hi)

    certified = max(sealed, best_val)
    if heap:
        certified = max(certified, -heap[0][0])
    wall = time.perf_counter() - t_start
    return best_x, best_val, certified, nodes, wall, incomplete


def maximize(net: Network, query: BoxQuery, cfg: SolverConfig = SolverConfig()) -> ExtremumResult:
    """Certified maximum of the network over the query box."""
    lo, hi = query.bounds(net)
    x, val, bound, nodes, wall, incomplete = _bnb(net, lo, hi, cfg)
    return ExtremumResult(
        witness=x,
        witness_value=float(val),
        certified_bound=float(bound),
        gap=float(bound - val),
        nodes_explored=nodes,
        wall_time=wall,
        incomplete=incomplete,
    )


def minimize(net: Network, query: BoxQuery, cfg: SolverConfig = SolverConfig()) -> ExtremumResult:
    """Certified minimum; runs maximize on the output-negated network."""
    lo, hi = query.bounds(net)
    x, val, bound, nodes, wall, incomplete = _bnb(_negate_output(net), lo, hi, cfg)
    return ExtremumResult(
        witness=x,
        witness_value=float(-val),
        certified_bound=float(-bound),
        gap=float(bound - val),
        nodes_explored=nodes,
        wall_time=wall,
        incomplete=incomplete,
    )


# ---------------------------------------------------------------------------
# exact search along one free coordinate


def _line_affine(ctx: _Ctx, x0: np.ndarray, coord: int, t: float, upto: int):
    """(value, slope) in t of layer ``upto``'s preactivations, with earlier
    layers' activation patterns read off at the probe point t."""
    v = x0.copy()
    v[coord] = t
    s = np.zeros_like(x0)
    s[coord] = 1.0
    for k in range(upto):
        v = ctx.W[k] @ v + ctx.b[k]
        s = ctx.W[k] @ s
        m = v > 0.0
        v = v * m
        s = s * m
    return ctx.W[upto] @ v + ctx.b[upto], ctx.W[upto] @ s


def line_breakpoints(net: Network, query: BoxQuery) -> np.ndarray:
    """Parameters in [lo, hi) where some ReLU preactivation crosses zero along
    the single free coordinate. Sorted, deduplicated."""
    lo_vec, hi_vec = query.bounds(net)
    if len(query.free) != 1:
        raise InvalidInputError("line search requires exactly one free coordinate")
    coord = next(iter(query.free))
    lo, hi = float(lo_vec[coord]), float(hi_vec[coord])
    x0 = lo_vec.copy()
    ctx = _ctx(net)
    span = max(hi - lo, 1e-30)
    tol = 1e-12 * max(1.0, abs(lo), abs(hi))

    boundaries = [lo, hi]
    crossings: list[float] = []
    relu_layers = [k for k, r in enumerate(ctx.relu) if r]
    for layer in relu_layers:
        new_cross = []
        pts = sorted(set(boundaries))
        for a, b in zip(pts[:-1], pts[1:]):
            if b - a <= tol:
                continue
            m = 0.5 * (a + b)
            vals, slopes = _line_affine(ctx, x0, coord, m, layer)
            for v, s in zip(vals, slopes):
                if s != 0.0:
                    r = m - v / s
                    if a - tol <= r < b - tol and lo <= r < hi:
                        new_cross.append(min(max(r, a), b))
        boundaries.extend(new_cross)
        crossings.extend(new_cross)
    # roots sitting exactly on the left endpoint count; dedupe the rest
    out = sorted(c for c in crossings if lo <= c < hi)
    dedup: list[float] = []
    for c in out:
        if not dedup or c - dedup[-1] > tol:
            dedup.append(c)
    return np.array(dedup)


def line_extremum_exact(net: Network, query: BoxQuery, sense: str = "max") -> ExtremumResult:
    """Exact extremum along a single free coordinate.

    The restriction is piecewise affine; the extremum sits at a breakpoint or
    an endpoint, so evaluating those finitely many candidates is exact (up to
    round-off, <= 1e-9).
    """
    if sense not in ("max", "min"):
        raise InvalidInputError(f"sense must be 'max' or 'min', got {sense!r}")
    t_start = time.perf_counter()
    lo_vec, hi_vec = query.bounds(net)
    if len(query.free) != 1:
        raise InvalidInputError("line search requires exactly one free coordinate")
    coord = next(iter(query.free))
    lo, hi = float(lo_vec[coord]), float(hi_vec[coord])
    breaks = line_breakpoints(net, query)
    cand = np.unique(np.concatenate([[lo, hi], breaks]))
    ctx = _ctx(net)
    X = np.tile(lo_vec, (cand.size, 1))
    X[:, coord] = cand
    Y = X
    for W, b, relu in zip(ctx.W, ctx.b, ctx.relu):
        Y = Y @ W.T + b
        if relu:
            np.maximum(Y, 0.0, out=Y)
    vals = Y[:, 0]
    k = int(np.argmax(vals)) if sense == "max" else int(np.argmin(vals))
    witness = X[k]
    value = float(vals[k])
    wall = time.perf_counter() - t_start
    return ExtremumResult(
        witness=witness,
        witness_value=value,
        certified_bound=value,
        gap=0.0,
        nodes_explored=int(cand.size),
        wall_time=wall,
    )


# ---------------------------------------------------------------------------
# global pairwise monotonicity search


def make_pair_network(net: Network, feature: int) -> Network:
    """Network over (x with feature=t, extra coordinate t') computing
    f(x|feature=t) - f(x|feature=t')."""
    if not 0 <= feature < net.input_dim:
        raise InvalidInputError(f"feature {feature} out of range")
    d = net.input_dim
    box = net.input_box
    lower = np.concatenate([box.lower, [box.lower[feature]]])
    upper = np.concatenate([box.upper, [box.upper[feature]]])
    first = net.layers[0]
    W1 = first.weights
    if len(net.layers) == 1:
        # f(x) - f(x'): shared coords cancel, only the varied feature survives
        w = np.zeros((1, d + 1))
        w[0, feature] = W1[0, feature]
        w[0, d] = -W1[0, feature]
        return Network(d + 1, InputBox(lower, upper), net.output_kind, (Layer(w, [0.0], LINEAR),))
    h = W1.shape[0]
    top = np.hstack([W1, np.zeros((h, 1))])
    bot = np.hstack([W1, np.zeros((h, 1))])
    bot[:, d] = W1[:, feature]
    bot[:, feature] = 0.0
    layers = [Layer(np.vstack([top, bot]), np.concatenate([first.biases, first.biases]), RELU)]
    for layer in net.layers[1:-1]:
        W = layer.weights
        m, n = W.shape
        Wb = np.zeros((2 * m, 2 * n))
        Wb[:m, :n] = W
        Wb[m:, n:] = W
        layers.append(Layer(Wb, np.concatenate([layer.biases, layer.biases]), RELU))
    last = net.layers[-1]
    w_out = np.hstack([last.weights, -last.weights])
    layers.append(Layer(w_out, [0.0], LINEAR))
    return Network(d + 1, InputBox(lower, upper), net.output_kind, tuple(layers))


def find_pair_counterexample(
    net: Network,
    feature: int,
    cfg: SolverConfig = SolverConfig(),
    mode: str = MODE_MAXIMAL,
) -> PairSearchResult:
    """Search the whole input box for x, x' equal everywhere but ``feature``,
    with x[feature] <= x'[feature] and f(x) > f(x') + delta.

    Directions are assumed canonicalized to increasing beforehand.
    """
    if mode not in (MODE_ANY, MODE_MAXIMAL):
        raise InvalidInputError(f"mode must be 'any' or 'maximal', got {mode!r}")
    pair_net = make_pair_network(net, feature)
    d = net.input_dim
    lo = pair_net.input_box.lower.copy()
    hi = pair_net.input_box.upper.copy()
    w, val, bound, nodes, wall, incomplete = _bnb(
        pair_net, lo, hi, cfg, pair=(feature, d), pair_mode=mode
    )
    pair = None
    if w is not None and val > cfg.delta:
        x = w[:d].copy()
        x_prime = x.copy()
        x_prime[feature] = w[d]
        violation = forward(net, x, check=False) - forward(net, x_prime, check=False)
        if violation > cfg.delta:
            pair = PairCounterexample(x=x, x_prime=x_prime, feature=feature, violation=violation)
    if pair is not None:
        status = STATUS_COUNTEREXAMPLE
    elif incomplete:
        status = STATUS_INCONCLUSIVE
    elif bound <= cfg.delta:
        status = STATUS_MONOTONE
    else:
        status = STATUS_INCONCLUSIVE
    return PairSearchResult(
        status=status,
        pair=pair,
        certified_bound=float(bound),
        nodes_explored=nodes,
        wall_time=wall,
        incomplete=incomplete,
    )
