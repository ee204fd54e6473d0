"""Approximation scheme for min-sum clustering via D^2-sampled candidate means.

Pipeline
--------
1. ``preprocess_partition`` splits the input into groups that are so far
   apart that no optimal cluster spans two of them.
2. ``candidate_tree`` builds sets of k candidate means. The first mean comes
   from subsets of a uniform sample; each further mean comes from subsets of
   a sample drawn from a pruned D^2 distribution (``d2_levels``), where the
   points far from the current centers are cut at a sequence of thresholds.
3. ``assign_by_buckets`` turns a set of centers into a clustering for a
   guess of the optimum: distances are rounded to powers of (1 + eps),
   cluster sizes are rounded up to powers of (1 + eps), and each size
   profile is solved as a transportation problem.
4. ``solve_ptas`` returns the labeling with the lowest exact min-sum cost.

The sample sizes that make the guarantees hold are astronomically large.
The config keeps them for reporting and runs with practical caps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateDistribution, GuessInfeasible
from .exact import brute_force_minsum
from .geometry import (
    CandidateCenters,
    CostReport,
    Labeling,
    as_centers,
    as_dataset,
    cost_report,
    minsum_cost,
    sq_dists,
)
from .kmeans import kmeans

PREPROCESS_MIN_N = 20


@dataclass
class PtasConfig:
    """Accuracy parameters and the caps that make the search runnable.

    ``max_sample``, ``max_subset`` and ``max_leaves`` bound the sample size,
    the subset size in mean extraction and the number of tree leaves. The
    remaining caps bound work the theory leaves unbounded: candidates per
    extraction, tree nodes expanded per depth, leaves sent to assignment
    and the resolution of the weight grid.
    """

    epsilon: float = 0.5
    delta: float = 0.1
    beta: float | None = None
    alpha_core: float | None = None
    max_sample: int = 200
    max_subset: int = 6
    max_leaves: int = 5000
    max_candidates: int = 128
    max_expand: int = 16
    max_assign_leaves: int = 8
    grid_resolution: int = 64
    exact_threshold: int = 13
    seed: int = 0

    def __post_init__(self):
        eps = self.epsilon
        if not 0 < eps < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.beta is None:
            self.beta = 2400.0 / eps**2
        if self.alpha_core is None:
            self.alpha_core = eps / 16.0
        if self.beta < 2400.0 / eps**2 * (1 - 1e-12):
            raise ValueError("beta must be at least 2400 / epsilon^2")
        if self.alpha_core > eps / 16.0 * (1 + 1e-12):
            raise ValueError("alpha_core must be at most epsilon / 16")
        for name in ("max_sample", "max_subset", "max_leaves", "max_candidates", "max_expand",
                     "max_assign_leaves", "grid_resolution"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def gamma(self) -> float:
        return math.sqrt(self.epsilon / (16 * (self.beta + self.alpha_core)))

    @property
    def practical_caps(self) -> dict:
        return {"max_sample": self.max_sample, "max_subset": self.max_subset, "max_leaves": self.max_leaves}

    def uniform_sample_size(self, k) -> int:
        """Sample size that makes the uniform sample a seeding set w.p. 1 - delta."""
        return math.ceil(32 * k / self.epsilon * math.log(1 / self.delta))

    def d2_sample_size(self, k) -> float:
        """Sample size behind the weighted-mean guarantee (a float: it overflows ints)."""
        return 17825792.0 * k * (self.beta ** (7 / 12) / self.epsilon) ** 6 * math.log(2 / self.delta)


@dataclass
class PruneLevel:
    i: int
    gamma_i: float
    member_mask: np.ndarray
    probs: np.ndarray
    mass: float

    @property
    def degenerate(self) -> bool:
        return not self.mass > 0


@dataclass(frozen=True)
class OptGuess:
    value: float
    index: int


@dataclass
class Preprocessed:
    components: list
    kmeans_estimate: float


@dataclass
class BucketAssignment:
    labeling: Labeling
    center_cost: float
    minsum: float
    estimate: float
    profile: tuple
    n_buckets: int
    opt_guess: OptGuess


@dataclass
class PtasResult:
    labeling: Labeling
    report: CostReport
    flags: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)


# ---------------------------------------------------------------- helpers


def core_mask(points, beta):
    """Points within squared distance beta * Delta of the mean."""
    P = np.asarray(points, dtype=np.float64)
    mu = P.mean(axis=0)
    d2 = np.einsum("ij,ij->i", P - mu, P - mu)
    delta = d2.mean()
    return d2 <= beta * delta


def eps_covered(ds, truth, centers, eps, opt=None) -> np.ndarray:
    """Per-cluster test ``|C|^2 min_m ||mu - m||^2 <= eps/2 (OPT/k + |C|^2 Delta)``.

    ``opt`` defaults to the min-sum cost of ``truth``. Empty clusters count as
    covered.
    """
    ds = as_dataset(ds)
    C = as_centers(centers)
    rep = cost_report(ds, truth)
    opt = rep.minsum_cost if opt is None else opt
    k = truth.k
    out = np.ones(k, dtype=bool)
    for i, st in enumerate(rep.per_cluster):
        if st.size == 0:
            continue
        gap = float(np.min(np.sum((C - st.mean) ** 2, axis=1)))
        out[i] = st.size**2 * gap <= eps / 2 * (opt / k + st.size**2 * st.delta) * (1 + 1e-12)
    return out


def _unique_rows(A):
    """Rows of A without repeats, in first-occurrence order."""
    if A.shape[0] == 0:
        return A, np.zeros(0, dtype=np.int64)
    _, first, inv = np.unique(A, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return A[np.sort(first)], rank[inv.ravel()]


def _n_distinct(X):
    return np.unique(X, axis=0).shape[0]


def _group_identical(X, k):
    _, inv = _unique_rows(X)
    return Labeling(inv, k)


# ---------------------------------------------------------------- stages


def preprocess_partition(ds, k, cfg: PtasConfig, rng=None) -> Preprocessed:
    """Split the point set into groups no optimal cluster crosses.

    A constant-factor k-means solution with cost T is computed; centers at
    squared distance at most ``20 n^7 T`` are joined, and each point follows
    its center's group. Below 21 points, or when T = 0, a single group is
    returned.
    """
    ds = as_dataset(ds)
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    C, lab, T = kmeans(ds, k, rng)
    everything = [np.arange(ds.n)]
    if T == 0 or ds.n <= PREPROCESS_MIN_N:
        return Preprocessed(everything, T)
    thr = 20.0 * float(ds.n) ** 7 * T
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    d2 = sq_dists(C, C)
    for a in range(k):
        for b in range(a + 1, k):
            if d2[a, b] <= thr:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    root = np.array([find(lab.labels[x]) for x in range(ds.n)])
    comps = [np.flatnonzero(root == r) for r in dict.fromkeys(root.tolist())]
    return Preprocessed(comps, T)


def uniform_seed(ds, k, cfg: PtasConfig, rng) -> np.ndarray:
    """Indices of min(theoretical size, max_sample) uniform draws with replacement."""
    ds = as_dataset(ds)
    count = min(cfg.uniform_sample_size(k), cfg.max_sample)
    return np.random.default_rng(rng).integers(ds.n, size=count)


def d2_levels(ds, M, cfg: PtasConfig, k=None) -> list:
    """Pruned D^2 distributions for level thresholds ``2^-i * sum D^2``.

    Level i keeps the points whose squared distance to M is at most
    Gamma_i and samples them proportionally to that distance; there are
    ``ceil(13 log2(n k / eps)) + 1`` levels.
    """
    ds = as_dataset(ds)
    C = as_centers(M)
    if C.shape[0] == 0:
        raise ValueError("d2_levels needs at least one center")
    k = C.shape[0] + 1 if k is None else k
    D = sq_dists(ds.points, C).min(axis=1)
    total = float(D.sum())
    top = math.ceil(13 * math.log2(ds.n * k / cfg.epsilon))
    out = []
    for i in range(top + 1):
        g = total * 2.0**-i
        mask = D <= g if i else np.ones(ds.n, dtype=bool)
        w = np.where(mask, D, 0.0)
        mass = float(w.sum())
        probs = w / mass if mass > 0 else np.zeros(ds.n)
        out.append(PruneLevel(i, g, mask, probs, mass))
    return out


def d2_sample(level: PruneLevel, count, rng) -> np.ndarray:
    """Indices of ``count`` i.i.d. draws from the level's distribution."""
    if level.degenerate:
        raise DegenerateDistribution(f"level {level.i} has no mass")
    rng = np.random.default_rng(rng)
    return rng.choice(level.probs.size, size=int(count), p=level.probs)


def _subsets(g, smax, budget, rng):
    total = sum(math.comb(g, s) for s in range(1, min(g, smax) + 1))
    if total <= budget:
        for s in range(1, min(g, smax) + 1):
            yield from itertools.combinations(range(g), s)
        return
    singles = min(g, max(1, budget // 4))
    yield from ((i,) for i in range(singles))
    seen = set()
    tries = 0
    want = budget - singles
    while len(seen) < want and tries < 20 * budget:
        tries += 1
        s = int(rng.integers(2, min(g, smax) + 1)) if min(g, smax) >= 2 else 1
        sub = tuple(sorted(rng.choice(g, size=s, replace=False).tolist()))
        if sub not in seen:
            seen.add(sub)
            yield sub


def extract_candidate_means(S, M, cfg: PtasConfig, rng=None, weights=None) -> np.ndarray:
    """Weighted averages of small subsets of the sample and current centers.

    Parameters
    ----------
    S : ndarray (m, d)
        Sampled points, repeats allowed.
    M : CandidateCenters or ndarray
        Current centers, also eligible subset members.
    weights : ndarray (m,), optional
        Importance weights of the sampled points (inverse sampling
        probability). Without them only uniform weights are used.

    Returns
    -------
    ndarray (c, d)
        Distinct candidate means. For every subset the uniform average is
        emitted; with weights, also the average under the weights rounded
        down to the grid ``{0, ..., R} * w_max / R`` with
        ``R = min(ceil(10 beta |S| / eps), grid_resolution)``. Weighted
        averages are computed after shifting by the anchor, the member
        closest to the sample centroid. If all subsets up to ``max_subset``
        exceed ``max_candidates``, singletons plus random subsets are used.
    """
    S = np.asarray(S, dtype=np.float64)
    Mc = as_centers(M) if M is not None else np.empty((0, S.shape[1] if S.ndim == 2 else 0))
    if S.size == 0 and Mc.size == 0:
        raise ValueError("extract_candidate_means needs a non-empty S or M")
    d = S.shape[1] if S.size else Mc.shape[1]
    S = S.reshape(-1, d)
    Mc = Mc.reshape(-1, d)
    distinct, inv = _unique_rows(S)
    if weights is not None:
        w = np.zeros(distinct.shape[0])
        np.add.at(w, inv, np.asarray(weights, dtype=np.float64))
    else:
        w = None
    ground = np.vstack([distinct, Mc])
    n_s = distinct.shape[0]
    centroid = S.mean(axis=0) if S.shape[0] else Mc.mean(axis=0)
    R = min(math.ceil(10 * cfg.beta * max(1, S.shape[0]) / cfg.epsilon), cfg.grid_resolution)
    rng = np.random.default_rng(0 if rng is None else rng)
    wg = None
    if w is not None:
        wg = np.concatenate([w, np.full(Mc.shape[0], np.nan)])
    by_size = {}
    for sub in _subsets(ground.shape[0], cfg.max_subset, cfg.max_candidates, rng):
        by_size.setdefault(len(sub), []).append(sub)
    out = []
    for size in sorted(by_size):
        idx = np.array(by_size[size], dtype=np.int64)
        P = ground[idx]
        near = np.argmin(np.sum((P - centroid) ** 2, axis=2), axis=1)
        anchor = P[np.arange(idx.shape[0]), near]
        Y = P - anchor[:, None, :]
        out.append(Y.mean(axis=1) + anchor)
        if wg is None or size < 2:
            continue
        ws = wg[idx]
        known = ~np.isnan(ws)
        keep = known.any(axis=1)
        if not keep.any():
            continue
        ws, Y, anchor = ws[keep], Y[keep], anchor[keep]
        wmax = np.nanmax(ws, axis=1)
        ws = np.where(np.isnan(ws), wmax[:, None], ws)
        q = np.floor(ws / wmax[:, None] * R + 1e-9)
        ok = (q.sum(axis=1) > 0) & np.any(q != q[:, :1], axis=1)
        if ok.any():
            q, Y, anchor = q[ok], Y[ok], anchor[ok]
            out.append(np.einsum("ms,msd->md", q, Y) / q.sum(axis=1)[:, None] + anchor)
    cands, _ = _unique_rows(np.vstack(out))
    return cands


def _lookahead_cost(X, D, cands, steps):
    """k-means cost after adding each candidate and then ``steps`` farthest points."""
    Dc = np.minimum(D[None, :], sq_dists(cands, X))
    for _ in range(steps):
        far = X[np.argmax(Dc, axis=1)]
        diff = X[None, :, :] - far[:, None, :]
        Dc = np.minimum(Dc, np.einsum("ijk,ijk->ij", diff, diff))
    return Dc.sum(axis=1)


def candidate_tree(ds, k, cfg: PtasConfig, rng=None, stats=None) -> list:
    """Leaves (sets of k candidate means) of the sampling tree.

    Depth one holds the means extracted from a uniform sample. Each further
    depth expands the ``max_expand`` best nodes: for every distinct
    non-degenerate D^2 level a sample is drawn and every extracted mean
    becomes a child. Nodes are ranked by k-means cost after completing them
    greedily with farthest points (at depth k this is their own k-means
    cost); at most ``max_leaves`` survive each depth. Ties go to the smaller
    branch id. Random streams are derived from the branch id, so results do
    not depend on evaluation order.
    """
    ds = as_dataset(ds)
    X = ds.points
    n = ds.n
    root_seed = int(np.random.default_rng(cfg.seed if rng is None else rng).integers(2**63))

    def stream(*path):
        return np.random.default_rng(np.random.SeedSequence(root_seed, spawn_key=tuple(path)))

    st = stats if stats is not None else {}
    st.setdefault("generated", [])
    st.setdefault("truncated", False)
    theory_u = cfg.uniform_sample_size(k)
    theory_d2 = cfg.d2_sample_size(k)
    st["uniform_sample"] = {"theory": theory_u, "used": min(theory_u, cfg.max_sample)}
    st["d2_sample"] = {"theory": theory_d2, "used": cfg.max_sample}
    d2_count = int(min(theory_d2, cfg.max_sample))

    S = X[uniform_seed(ds, k, cfg, stream(0))]
    cands = extract_candidate_means(S, None, cfg, stream(1))
    full = np.full(n, np.inf)
    scores = _lookahead_cost(X, full, cands, k - 1)
    nodes = [
        (float(scores[j]), (j,), CandidateCenters(c[None, :], ("uniform-seed",), (j,)))
        for j, c in enumerate(cands)
    ]
    st["generated"].append(len(nodes))
    nodes = _truncate(nodes, cfg.max_leaves, st)

    for depth in range(2, k + 1):
        frontier = nodes[: cfg.max_expand]
        children = []
        for _, bid, node in frontier:
            D = sq_dists(X, node.centers).min(axis=1)
            levels = [lv for lv in d2_levels(ds, node, cfg, k) if not lv.degenerate]
            if not levels:
                children.append((float(D.sum()), bid + (0,), (node, node.centers[0], "pad", 0)))
                continue
            seen_masks = set()
            for lv in levels:
                key = lv.member_mask.tobytes()
                if key in seen_masks:
                    continue
                seen_masks.add(key)
                idx = d2_sample(lv, d2_count, stream(*bid, lv.i, 0))
                wts = 1.0 / lv.probs[idx]
                cands = extract_candidate_means(X[idx], node, cfg, stream(*bid, lv.i, 1), wts)
                scores = _lookahead_cost(X, D, cands, k - depth)
                for j, c in enumerate(cands):
                    tag = lv.i * 1_000_000 + j
                    children.append((float(scores[j]), bid + (tag,), (node, c, "d2-extracted", tag)))
        st["generated"].append(len(children))
        nodes = _select(children, cfg.max_leaves, st)
    return [node for _, _, node in nodes]


def _select(items, cap, st):
    """Cheapest ``cap`` children with distinct center sets, built lazily."""
    seen = set()
    out = []
    for score, bid, (node, c, tag, branch) in sorted(items, key=lambda t: (t[0], t[1])):
        C = np.round(np.vstack([node.centers, c]), 12)
        key = C[np.lexsort(C.T[::-1])].tobytes()
        if key in seen:
            continue
        if len(out) == cap:
            st["truncated"] = True
            break
        seen.add(key)
        out.append((score, bid, node.extend(c, tag, branch)))
    return out


def _truncate(items, cap, st):
    items = sorted(items, key=lambda t: (t[0], t[1]))
    if len(items) > cap:
        st["truncated"] = True
    return items[:cap]


def size_grid(n, eps):
    """0 and the values ceil((1+eps)^t) capped at n."""
    vals = {0}
    t = 0
    while True:
        v = min(n, math.ceil((1 + eps) ** t - 1e-9))
        vals.add(v)
        if v >= n:
            break
        t += 1
    return sorted(vals)


def _tight_profiles(n, k, eps):
    """Size caps S with sum(lower) <= n <= sum(S), lower = previous grid value + 1.

    These are exactly the roundings-up of size vectors summing to n.
    """
    grid = size_grid(n, eps)
    lower = {grid[0]: 0}
    for a, b in zip(grid, grid[1:]):
        lower[b] = a + 1
    for prof in itertools.product(grid, repeat=k):
        lo = sum(lower[s] for s in prof)
        if lo <= n <= sum(prof):
            yield prof


def opt_grid(T, n, eps) -> list:
    """Guesses T/20 * (1+eps)^j up to 20 n T."""
    if T <= 0:
        return [OptGuess(0.0, 0)]
    lo, hi = T / 20.0, 20.0 * n * T
    count = math.ceil(math.log(hi / lo) / math.log(1 + eps)) + 1
    return [OptGuess(lo * (1 + eps) ** j, j) for j in range(count)]


def assign_by_buckets(ds, M, opt_guess: OptGuess, cfg: PtasConfig) -> BucketAssignment:
    """Clustering for fixed centers under a guess of the optimum.

    Squared distances are bucketed into ``G_{i,0}`` (at most
    ``eps / n^2 * OPT``) and ``G_{i,j}`` (between consecutive powers of
    (1+eps) times that threshold); points with the same bucket for every
    center form one class and are interchangeable. For every cap vector S
    whose entries are powers of (1+eps) rounded up (and that can be the
    rounding of sizes summing to n), points are assigned to minimise
    ``sum_i S_i * sum_{x -> i} lower(x, i)`` with at most S_i points per
    center, where ``lower`` is the bucket's lower end (0 in ``G_{i,0}``).
    Assigning x to i is forbidden when ``||x - c_i||^2 > (1+eps) OPT``, and a
    profile is rejected when its estimate exceeds ``(1+eps) OPT``.

    Returns
    -------
    BucketAssignment
        The accepted labeling with the lowest exact min-sum cost.

    Raises
    ------
    GuessInfeasible
        When no profile is accepted.
    """
    ds = as_dataset(ds)
    X = ds.points
    C = as_centers(M)
    n, k = ds.n, C.shape[0]
    eps = cfg.epsilon
    opt = opt_guess.value
    D = sq_dists(X, C)
    if opt <= 0:
        hit = D <= 0
        if not hit.any(axis=1).all():
            raise GuessInfeasible("zero guess but some point is off every center")
        lab = Labeling(np.argmax(hit, axis=1), k)
        return BucketAssignment(lab, 0.0, minsum_cost(ds, lab), 0.0, tuple(lab.sizes()), 1, opt_guess)

    base = eps / n**2 * opt
    ratio = np.maximum(D / base, 1.0)
    level = np.where(D <= base, 0, np.ceil(np.log(ratio) / math.log1p(eps) - 1e-12)).astype(np.int64)
    level = np.where((D > base) & (level < 1), 1, level)
    lower = np.where(level == 0, 0.0, base * (1 + eps) ** (level - 1.0))
    forbidden = D > (1 + eps) * opt
    n_buckets = np.unique(level, axis=0).shape[0]
    limit = (1 + eps) * opt * (1 + 1e-12)

    best = None
    big = 1e6 * (float(lower.max()) * n + 1.0) * n
    for p_idx, prof in enumerate(_tight_profiles(n, k, eps) if k > 1 else [(n,)]):
        caps = np.array(prof)
        cols = np.repeat(np.arange(k), caps)
        cost = caps[cols][None, :] * lower[:, cols]
        cost = np.where(forbidden[:, cols], big, cost)
        rows, picked = linear_sum_assignment(cost)
        assign = np.empty(n, dtype=np.int64)
        assign[rows] = cols[picked]
        if forbidden[np.arange(n), assign].any():
            continue
        est = float(np.sum(caps[assign] * lower[np.arange(n), assign]))
        if est > limit:
            continue
        lab = Labeling(assign, k)
        ms = minsum_cost(ds, lab)
        if best is None or ms < best[0] - 1e-12 * max(1.0, best[0]):
            sizes = lab.sizes()
            cc = float(np.sum(sizes[assign] * D[np.arange(n), assign]))
            best = (ms, BucketAssignment(lab, cc, ms, est, prof, n_buckets, opt_guess))
    if best is None:
        raise GuessInfeasible(f"no size profile fits under guess {opt:g}")
    return best[1]


def _assign_leaf(ds, leaf, guesses, cfg):
    """Smallest feasible guess by bisection (feasibility is close to monotone)."""
    found = {}

    def attempt(j):
        if j not in found:
            try:
                found[j] = assign_by_buckets(ds, leaf, guesses[j], cfg)
            except GuessInfeasible:
                found[j] = None
        return found[j]

    hi = len(guesses) - 1
    if attempt(hi) is None:
        return []
    lo = 0
    if attempt(lo) is None:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if attempt(mid) is None:
                lo = mid
            else:
                hi = mid
    return [r for _, r in sorted(found.items()) if r is not None]


def _solve_component(ds, k, cfg, rng, flags, stats):
    X = ds.points
    if _n_distinct(X) <= k:
        return _group_identical(X, k)
    _, _, T = kmeans(ds, k, rng)
    tree_stats = {}
    leaves = candidate_tree(ds, k, cfg, rng, tree_stats)
    stats.setdefault("trees", []).append(tree_stats)
    guesses = opt_grid(T, ds.n, cfg.epsilon)
    best = None
    for rank, leaf in enumerate(leaves[: cfg.max_assign_leaves]):
        for res in _assign_leaf(ds, leaf, guesses, cfg):
            key = (res.minsum, rank, res.opt_guess.index)
            if best is None or key < best[0]:
                best = (key, res.labeling)
    if best is None:
        flags.append("nearest_center_fallback")
        C = leaves[0].centers
        return Labeling(np.argmin(sq_dists(X, C), axis=1), k)
    return best[1]


def _compositions(k, parts):
    """Ways to give each of ``parts`` groups at least one of k centers."""
    for cut in itertools.combinations(range(1, k), parts - 1):
        b = (0,) + cut + (k,)
        yield tuple(b[i + 1] - b[i] for i in range(parts))


def solve_ptas(ds, k, cfg: PtasConfig | None = None, rng=None) -> PtasResult:
    """Min-sum clustering by the sampling scheme above.

    Inputs with at most ``cfg.exact_threshold`` points are solved exactly.
    The result never fails: if no leaf yields an accepted profile, the best
    leaf's nearest-center labeling is returned and flagged.
    """
    ds = as_dataset(ds)
    cfg = cfg or PtasConfig()
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    flags, stats = [], {}
    n = ds.n
    if n <= cfg.exact_threshold:
        res = brute_force_minsum(ds, min(k, n), limit=max(cfg.exact_threshold, n))
        lab = Labeling(res.best_labeling.labels, k)
        return PtasResult(lab, cost_report(ds, lab), ["routed_exact"], stats)
    if _n_distinct(ds.points) <= k:
        lab = _group_identical(ds.points, k)
        return PtasResult(lab, cost_report(ds, lab), ["identical_points"], stats)

    pre = preprocess_partition(ds, k, cfg, rng)
    stats["components"] = len(pre.components)
    stats["kmeans_estimate"] = pre.kmeans_estimate
    comps = pre.components
    if len(comps) == 1:
        lab = _solve_component(ds, k, cfg, rng, flags, stats)
    else:
        table = {}
        for a, idx in enumerate(comps):
            sub = ds.subset(idx)
            for ka in range(1, min(k - len(comps) + 1, sub.n) + 1):
                if sub.n <= cfg.exact_threshold:
                    sl = brute_force_minsum(sub, ka, limit=max(cfg.exact_threshold, sub.n)).best_labeling
                else:
                    sl = _solve_component(sub, ka, cfg, rng, flags, stats)
                table[a, ka] = (minsum_cost(sub, sl), sl)
        best = None
        for alloc in _compositions(k, len(comps)):
            if any((a, ka) not in table for a, ka in enumerate(alloc)):
                continue
            total = sum(table[a, ka][0] for a, ka in enumerate(alloc))
            if best is None or total < best[0]:
                best = (total, alloc)
        labels = np.empty(n, dtype=np.int64)
        offset = 0
        for a, ka in enumerate(best[1]):
            labels[comps[a]] = table[a, ka][1].labels + offset
            offset += ka
        lab = Labeling(labels, k)
    for t in stats.get("trees", []):
        u, d2 = t["uniform_sample"], t["d2_sample"]
        if u["used"] < u["theory"]:
            flags.append(f"uniform_sample_capped(theory={u['theory']},used={u['used']})")
        if d2["used"] < d2["theory"]:
            flags.append(f"d2_sample_capped(theory={d2['theory']:.3g},used={d2['used']})")
        if t["truncated"]:
            flags.append("tree_truncated")
    flags = list(dict.fromkeys(flags))
    return PtasResult(lab, cost_report(ds, lab), flags, stats)
