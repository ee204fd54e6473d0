"""Exhaustive solvers used as ground truth at small n."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, Mismatch, TooLarge
from .geometry import Labeling, as_centers, as_dataset, minsum_cost, sq_dists

DEFAULT_LIMIT = 13
FIXED_CENTERS_LIMIT = 10


@dataclass
class ExactResult:
    best_labeling: Labeling
    best_cost: float
    partitions_examined: int


def stirling2(n, k):
    """Stirling number of the second kind S(n, k)."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    row = [1] + [0] * k
    for i in range(1, n + 1):
        for j in range(min(i, k), 0, -1):
            row[j] = j * row[j] + row[j - 1]
        row[0] = 0
    return row[k]


def restricted_growth_strings(n, k):
    """Yield every partition of range(n) into at most k blocks, lexicographically.

    Each partition is a list a with a[0] = 0 and a[i] <= 1 + max(a[:i]).
    """
    a = [0] * n
    if n == 0:
        return
    yield list(a)
    # m[i] = max(a[:i+1])
    m = [0] * n
    while True:
        i = n - 1
        while i > 0 and (a[i] == k - 1 or a[i] > m[i - 1]):
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            m[j] = m[i]
        yield list(a)


def brute_force_minsum(ds, k, limit=DEFAULT_LIMIT) -> ExactResult:
    """Optimal min-sum clustering by enumerating all set partitions.

    Partitions into at most ``k`` blocks are visited as restricted growth
    strings in lexicographic order. Cluster costs are maintained
    incrementally from running sums, and a new string only replaces the
    incumbent when it is strictly cheaper (beyond a 1e-12 relative
    margin), so ties go to the lexicographically smallest string.

    Parameters
    ----------
    ds : Dataset or array-like
    k : int
        Maximum number of clusters, ``1 <= k <= n``.
    limit : int, default 13
        Refuse to run above this many points.

    Returns
    -------
    ExactResult

    Raises
    ------
    TooLarge
        If ``n > limit``.
    """
    ds = as_dataset(ds)
    n = ds.n
    if n > limit:
        raise TooLarge(f"n = {n} exceeds exhaustive limit {limit}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k = {k}, n = {n}")
    X = ds.points
    # Work relative to the centroid to keep the running-sum formula stable.
    X = X - X.mean(axis=0)
    sq = np.einsum("ij,ij->i", X, X).tolist()
    rows = [x for x in X.tolist()]
    d = X.shape[1]

    cnt = [0] * k
    sums = [[0.0] * d for _ in range(k)]
    sqs = [0.0] * k
    a = [0] * n
    best = [np.inf, None]
    examined = [0]

    def block_cost(j):
        s = sums[j]
        return cnt[j] * sqs[j] - sum(v * v for v in s)

    def place(i, j):
        cnt[j] += 1
        sqs[j] += sq[i]
        s = sums[j]
        r = rows[i]
        for t in range(d):
            s[t] += r[t]

    def unplace(i, j):
        cnt[j] -= 1
        sqs[j] -= sq[i]
        s = sums[j]
        r = rows[i]
        for t in range(d):
            s[t] -= r[t]

    # Depth-first over the growth strings; the lexicographic visit order is
    # the order children are tried (block 0 first).
    def rec(i, used):
        if i == n:
            examined[0] += 1
            total = 0.0
            for j in range(used):
                total += block_cost(j)
            if best[1] is None or total < best[0] - 1e-12 * max(1.0, abs(best[0])):
                best[0] = total
                best[1] = list(a)
            return
        top = min(used + 1, k)
        for j in range(top):
            a[i] = j
            place(i, j)
            rec(i + 1, max(used, j + 1))
            unplace(i, j)

    a[0] = 0
    place(0, 0)
    rec(1, 1)
    lab = Labeling(np.array(best[1], dtype=np.int64), k)
    return ExactResult(lab, minsum_cost(ds, lab), examined[0])


def brute_force_fixed_centers(ds, centers, size_bounds, weights=None, limit=FIXED_CENTERS_LIMIT):
    """Exhaustive weighted assignment to fixed centers under size windows.

    Minimises ``sum_i w_i * sum_{x -> i} ||x - c_i||^2`` subject to
    ``lo_i <= |{x -> i}| <= hi_i``. All ``k^n`` assignments are scored in
    vectorised chunks; ties go to the lexicographically smallest label
    vector.

    Raises
    ------
    TooLarge
        If ``n > limit``.
    Infeasible
        If no assignment meets the bounds.
    """
    ds = as_dataset(ds)
    C = as_centers(centers)
    k = C.shape[0]
    n = ds.n
    if n > limit:
        raise TooLarge(f"n = {n} exceeds exhaustive limit {limit}")
    bounds = np.asarray(size_bounds, dtype=np.int64).reshape(-1, 2)
    if bounds.shape[0] != k:
        raise Mismatch(f"{bounds.shape[0]} size bounds for {k} centers")
    w = np.ones(k) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != (k,):
        raise Mismatch(f"{w.shape[0]} weights for {k} centers")
    lo, hi = bounds[:, 0], bounds[:, 1]
    if lo.sum() > n or hi.sum() < n or np.any(lo > hi):
        raise Infeasible(f"size bounds {bounds.tolist()} cannot cover n = {n}")

    cost = sq_dists(ds.points, C) * w[None, :]
    best_cost, best_lab = np.inf, None
    chunk = max(1, 200_000 // max(1, n))
    combos = itertools.product(range(k), repeat=n)
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=np.int64)
        if block.size == 0:
            break
        block = block.reshape(-1, n)
        counts = np.stack([(block == i).sum(axis=1) for i in range(k)], axis=1)
        ok = np.all((counts >= lo) & (counts <= hi), axis=1)
        if not ok.any():
            continue
        block = block[ok]
        totals = cost[np.arange(n)[None, :], block].sum(axis=1)
        j = int(np.argmin(totals))
        if best_lab is None or totals[j] < best_cost - 1e-12 * max(1.0, abs(best_cost)):
            best_cost, best_lab = float(totals[j]), block[j]
    if best_lab is None:
        raise Infeasible("no assignment satisfies the size bounds")
    return Labeling(best_lab, k)
