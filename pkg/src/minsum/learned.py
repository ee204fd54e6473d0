"""Clustering from noisy predicted labels.

Centers are estimated per cluster and per coordinate from the densest
window of ``ceil((1 - alpha) |P_i|)`` sorted values, which discards up to
an alpha fraction of mislabelled points on each side. Points are then
reassigned by a min-cost flow in which center ``i`` must receive between
``ceil((1 - alpha) |P_i|)`` and ``floor(|P_i| / (1 - alpha))`` points and
each point pays ``|P_i| / (1 - alpha) * ||x - c_i||^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundsRoundingConflict, EmptyPredictedCluster, InvalidAlpha, Mismatch
from .flow import FlowNetwork, solve_min_cost_flow
from .geometry import CandidateCenters, CostReport, Labeling, as_centers, as_dataset, as_labeling, cost_report

_FTOL = 1e-9


def _ceil(x):
    return math.ceil(x - _FTOL * max(1.0, abs(x)))


def _floor(x):
    return math.floor(x + _FTOL * max(1.0, abs(x)))


def check_alpha(alpha):
    if not (0.0 <= alpha < 0.5) or math.isnan(alpha):
        raise InvalidAlpha(f"alpha must lie in [0, 1/2), got {alpha}")
    return float(alpha)


@dataclass(frozen=True)
class LabelPrediction:
    labels: Labeling
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "labels", as_labeling(self.labels))
        object.__setattr__(self, "alpha", check_alpha(self.alpha))


def gamma_alpha(alpha):
    """Per-cluster constant of the learned-center bound."""
    alpha = check_alpha(alpha)
    if alpha < 1.0 / 7.0:
        return 7.7
    return (5 * alpha - 2 * alpha**2) / ((1 - 2 * alpha) * (1 - alpha))


def approx_bound(alpha):
    """Approximation factor ``(1 + gamma * alpha) / (1 - alpha)^2``."""
    return (1 + gamma_alpha(alpha) * alpha) / (1 - alpha) ** 2


def window_size(size, alpha):
    return max(1, _ceil((1 - alpha) * size))


def window_costs(values, m):
    """1-means cost of every contiguous window of length m in sorted values."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    v = v - v[len(v) // 2]
    s = np.concatenate([[0.0], np.cumsum(v)])
    q = np.concatenate([[0.0], np.cumsum(v * v)])
    sums = s[m:] - s[:-m]
    sqs = q[m:] - q[:-m]
    return np.maximum(sqs - sums * sums / m, 0.0)


def robust_coordinate(values, m):
    """Mean of the length-m window of sorted values with least spread."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    a = int(np.argmin(window_costs(v, m)))
    return float(v[a : a + m].mean())


def learned_centers(ds, pred: LabelPrediction) -> CandidateCenters:
    """Robust center per predicted cluster.

    Raises
    ------
    EmptyPredictedCluster
        If some predicted cluster has no points.
    """
    ds = as_dataset(ds)
    lab = pred.labels
    if lab.n != ds.n:
        raise Mismatch(f"{lab.n} labels for {ds.n} points")
    C = np.empty((lab.k, ds.d))
    for i in range(lab.k):
        P = ds.points[lab.labels == i]
        if P.shape[0] == 0:
            raise EmptyPredictedCluster(f"predicted cluster {i} is empty")
        m = window_size(P.shape[0], pred.alpha)
        for j in range(ds.d):
            C[i, j] = robust_coordinate(P[:, j], m)
    return CandidateCenters(C, ("learned",) * lab.k)


def size_window(size, alpha):
    """Allowed output size range for a predicted cluster of the given size."""
    return _ceil((1 - alpha) * size), _floor(size / (1 - alpha))


def build_flow(ds, pred: LabelPrediction, centers) -> FlowNetwork:
    """Assignment network: source -> point -> center -> sink.

    Nodes are ``0`` (source), ``1..n`` (points), ``n+1..n+k`` (centers) and
    ``n+k+1`` (sink). Empty predicted clusters get no point arcs and zero
    capacity. If the rounded lower bounds sum past n, the lower bounds of
    the largest clusters are decreased one at a time; each change is logged
    in ``net.notes``.
    """
    ds = as_dataset(ds)
    C = as_centers(centers)
    lab = pred.labels
    k, n, alpha = lab.k, ds.n, pred.alpha
    if C.shape[0] != k:
        raise Mismatch(f"{C.shape[0]} centers for k = {k}")
    sizes = lab.sizes()
    lo = np.zeros(k, dtype=np.int64)
    hi = np.zeros(k, dtype=np.int64)
    for i in range(k):
        if sizes[i]:
            lo[i], hi[i] = size_window(int(sizes[i]), alpha)
    notes = []
    order = sorted(range(k), key=lambda i: (-sizes[i], i))
    while lo.sum() > n:
        changed = False
        for i in order:
            if lo.sum() <= n:
                break
            if lo[i] > 0:
                lo[i] -= 1
                notes.append(f"lower bound of cluster {i} decreased to {lo[i]}")
                changed = True
        if not changed:
            raise BoundsRoundingConflict(f"lower bounds sum to {lo.sum()} > n = {n}")

    net = FlowNetwork(n + k + 2, [], 0, n + k + 1, n, notes)
    for x in range(n):
        net.add_arc(0, 1 + x, 1, 0, 0.0)
    live = [i for i in range(k) if sizes[i]]
    diff = ds.points[:, None, :] - C[None, live, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    scale = sizes[live] / (1 - alpha)
    for x in range(n):
        for col, i in enumerate(live):
            net.add_arc(1 + x, 1 + n + i, 1, 0, float(scale[col] * d2[x, col]))
    for i in range(k):
        net.add_arc(1 + n + i, n + k + 1, int(hi[i]), int(lo[i]), 0.0)
    return net


@dataclass
class LearnedResult:
    labeling: Labeling
    report: CostReport
    flow_cost: float
    centers: CandidateCenters | None
    alpha_used: float
    flags: list = field(default_factory=list)


def _extract(net, sol, n, k):
    labels = np.full(n, -1, dtype=np.int64)
    for a, f in zip(net.arcs, sol.flow):
        if f and 1 <= a.tail <= n and n + 1 <= a.head <= n + k:
            if labels[a.tail - 1] != -1:
                raise AssertionError(f"point {a.tail - 1} received two labels")
            labels[a.tail - 1] = a.head - n - 1
    if np.any(labels < 0):
        raise AssertionError("some point received no label")
    return labels


def solve_learned(ds, pred: LabelPrediction, escalation=(0.05, 0.1, 0.15, 0.2)) -> LearnedResult:
    """Learned centers, flow assignment, exact cost of the resulting labeling.

    If the flow is infeasible, alpha is raised by each step of
    ``escalation`` (capped below 1/2) and the flow rebuilt; if every
    attempt fails the predicted labeling itself is returned and flagged.
    """
    ds = as_dataset(ds)
    lab = pred.labels
    if lab.n != ds.n:
        raise Mismatch(f"{lab.n} labels for {ds.n} points")
    flags = []
    sizes = lab.sizes()
    if np.any(sizes == 0):
        flags.append(f"empty_predicted_clusters={np.flatnonzero(sizes == 0).tolist()}")
    tries = [pred.alpha] + [min(0.49, pred.alpha + s) for s in escalation if pred.alpha + s < 0.5]
    for a in dict.fromkeys(tries):
        p = LabelPrediction(lab, a)
        C = _centers_allow_empty(ds, p)
        net = build_flow(ds, p, C)
        sol = solve_min_cost_flow(net)
        if not sol.feasible:
            flags.append(f"flow_infeasible_at_alpha={a:g}")
            continue
        if a != pred.alpha:
            flags.append(f"alpha_escalated_to={a:g}")
        flags += [f"bounds_adjusted: {s}" for s in net.notes]
        out = Labeling(_extract(net, sol, ds.n, lab.k), lab.k)
        return LearnedResult(out, cost_report(ds, out), sol.total_cost, C, a, flags)
    flags.append("naive_fallback")
    return LearnedResult(lab, cost_report(ds, lab), math.inf, None, pred.alpha, flags)


def _centers_allow_empty(ds, pred):
    lab = pred.labels
    sizes = lab.sizes()
    if np.all(sizes > 0):
        return learned_centers(ds, pred)
    live = np.flatnonzero(sizes > 0)
    remap = np.full(lab.k, -1)
    remap[live] = np.arange(live.size)
    sub = LabelPrediction(Labeling(remap[lab.labels], live.size), pred.alpha)
    C = np.zeros((lab.k, ds.d))
    C[live] = learned_centers(ds, sub).centers
    return CandidateCenters(C, ("learned",) * lab.k)


def alpha_grid(n, lam=2.0, top=0.49):
    """Decreasing guesses top, top/lam, ... ; ceil(log_lam(top * n)) of them."""
    count = max(1, math.ceil(math.log(top * n) / math.log(lam) - 1e-12)) if top * n > 1 else 1
    return [top / lam**j for j in range(count)]


@dataclass
class SweepResult:
    best: LearnedResult
    guesses: list
    costs: list


def alpha_sweep(ds, labels, lam=2.0) -> SweepResult:
    """Run the pipeline for every alpha guess and keep the cheapest labeling.

    Ties go to the earlier (larger) guess.
    """
    ds = as_dataset(ds)
    labels = as_labeling(labels)
    guesses = alpha_grid(ds.n, lam)
    best, costs = None, []
    for a in guesses:
        res = solve_learned(ds, LabelPrediction(labels, a))
        costs.append(res.report.minsum_cost)
        if best is None or res.report.minsum_cost < best.report.minsum_cost:
            best = res
    return SweepResult(best, guesses, costs)
