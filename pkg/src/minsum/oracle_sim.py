"""Label predictors with a controlled per-cluster error rate, and audits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidLabeling, Mismatch
from .flow import FlowNetwork, solve_min_cost_flow
from .geometry import Labeling, as_labeling
from .learned import LabelPrediction, check_alpha


@dataclass
class CorruptionPlan:
    alpha_target: float
    alpha_achieved: float
    moves: list = field(default_factory=list)  # (point, from_cluster, to_cluster)

    def recompute(self, truth) -> float:
        truth = as_labeling(truth)
        sizes = truth.sizes()
        moved = np.zeros(truth.k, dtype=np.int64)
        for _, src, _ in self.moves:
            moved[src] += 1
        rates = np.divide(moved, sizes, out=np.zeros(truth.k), where=sizes > 0)
        return float(rates.max()) if rates.size else 0.0


def corrupt_labels(truth, alpha, rng=None):
    """Swap points between clusters so that each cluster loses at most alpha.

    Each swap exchanges one original member of cluster a with one original
    member of cluster b, so sizes never change and a cluster's error equals
    the fraction of its members moved out. Cluster i may lose at most
    ``floor(alpha * |P*_i|)`` members; swaps are drawn greedily between the
    two clusters with the most remaining budget (ties broken at random)
    until fewer than two clusters have budget left.

    Returns
    -------
    (LabelPrediction, CorruptionPlan)
    """
    alpha = check_alpha(alpha)
    truth = as_labeling(truth)
    rng = np.random.default_rng(rng)
    sizes = truth.sizes()
    if np.any(sizes == 0):
        raise InvalidLabeling("every truth cluster must be non-empty")
    budget = np.array([math.floor(alpha * s + 1e-9) for s in sizes], dtype=np.int64)
    pools = [list(rng.permutation(truth.members(i))) for i in range(truth.k)]
    labels = truth.labels.copy()
    moves = []
    while np.count_nonzero(budget) >= 2:
        tie = rng.random(truth.k)
        order = sorted(np.flatnonzero(budget), key=lambda i: (-budget[i], tie[i]))
        a, b = order[0], order[1]
        pa, pb = pools[a].pop(), pools[b].pop()
        labels[pa], labels[pb] = b, a
        moves += [(int(pa), int(a), int(b)), (int(pb), int(b), int(a))]
        budget[a] -= 1
        budget[b] -= 1
    out = Labeling(labels, truth.k)
    plan = CorruptionPlan(alpha, 0.0, moves)
    plan.alpha_achieved = plan.recompute(truth)
    return LabelPrediction(out, alpha), plan


def overlap_matrix(pred, truth) -> np.ndarray:
    k = max(pred.k, truth.k)
    M = np.zeros((k, k), dtype=np.int64)
    np.add.at(M, (pred.labels, truth.labels), 1)
    return M


def match_labels(pred, truth) -> np.ndarray:
    """Permutation perm with perm[pred_label] = truth_label maximising overlap.

    Solved as an assignment flow for k <= 50; larger k uses the Hungarian
    method from scipy.
    """
    M = overlap_matrix(pred, truth)
    k = M.shape[0]
    if k > 50:
        from scipy.optimize import linear_sum_assignment

        r, c = linear_sum_assignment(-M)
        perm = np.empty(k, dtype=np.int64)
        perm[r] = c
        return perm
    top = int(M.max())
    net = FlowNetwork(2 * k + 2, [], 0, 2 * k + 1, k)
    for a in range(k):
        net.add_arc(0, 1 + a, 1)
    for a in range(k):
        for b in range(k):
            net.add_arc(1 + a, 1 + k + b, 1, 0, float(top - M[a, b]))
    for b in range(k):
        net.add_arc(1 + k + b, 2 * k + 1, 1)
    sol = solve_min_cost_flow(net)
    perm = np.empty(k, dtype=np.int64)
    for arc, f in zip(net.arcs, sol.flow):
        if f and 1 <= arc.tail <= k and arc.head > k:
            perm[arc.tail - 1] = arc.head - k - 1
    return perm


def verify_error_rate(pred, truth, match=True) -> float:
    """Max over clusters of ``1 - |P_i & P*_i| / max(|P_i|, |P*_i|)``.

    With ``match`` the predicted labels are first relabelled by the
    maximum-overlap matching to the truth clusters.

    Raises
    ------
    Mismatch
        If the labelings have different lengths.
    """
    pred = as_labeling(pred)
    truth = as_labeling(truth)
    if pred.n != truth.n:
        raise Mismatch(f"{pred.n} predicted labels vs {truth.n} truth labels")
    k = max(pred.k, truth.k)
    p = pred.labels
    if match:
        p = match_labels(Labeling(p, k), Labeling(truth.labels, k))[p]
    M = np.zeros((k, k), dtype=np.int64)
    np.add.at(M, (p, truth.labels), 1)
    ps, ts = M.sum(axis=1), M.sum(axis=0)
    worst = 0.0
    for i in range(k):
        big = max(ps[i], ts[i])
        if big:
            worst = max(worst, 1.0 - M[i, i] / big)
    return float(worst)
