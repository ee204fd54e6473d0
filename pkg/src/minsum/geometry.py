"""Datasets, labelings and the min-sum / k-means objectives.

The min-sum cost of a clustering is the sum, over clusters, of all
within-cluster squared Euclidean distances between unordered pairs of
points. It is evaluated through the identity

    sum_{p<q in C} ||p - q||^2 = |C| * sum_{p in C} ||p - mu(C)||^2,

so every evaluation is O(nd).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCluster, InvalidLabeling, Mismatch

RTOL = 1e-9


def rel_close(a, b, rtol=RTOL, atol=0.0):
    """Relative comparison used for every cost equality in the package."""
    return abs(a - b) <= max(atol, rtol * max(abs(a), abs(b)))


@dataclass(frozen=True)
class Dataset:
    """Immutable n x d array of finite float64 coordinates."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"dataset must be a non-empty n x d array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("dataset coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.points[np.asarray(idx)])


@dataclass(frozen=True)
class Labeling:
    """Cluster index per point, in ``range(k)``. Empty clusters are allowed."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        lab = np.array(self.labels, copy=True)
        if lab.ndim != 1:
            raise InvalidLabeling("labels must be one-dimensional")
        if lab.size and not np.issubdtype(lab.dtype, np.integer):
            if not np.all(lab == np.round(lab)):
                raise InvalidLabeling("labels must be integers")
        lab = lab.astype(np.int64)
        k = int(self.k)
        if k < 1:
            raise InvalidLabeling(f"k must be >= 1, got {k}")
        if lab.size and (lab.min() < 0 or lab.max() >= k):
            bad = int(np.flatnonzero((lab < 0) | (lab >= k))[0])
            raise InvalidLabeling(f"label {lab[bad]} at position {bad} outside [0, {k})")
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_array(cls, labels, k=None) -> "Labeling":
        lab = np.asarray(labels, dtype=np.int64)
        if k is None:
            k = int(lab.max()) + 1 if lab.size else 1
        return cls(lab, k)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def members(self, i) -> np.ndarray:
        return np.flatnonzero(self.labels == i)


@dataclass(frozen=True)
class CandidateCenters:
    """Ordered candidate centers with per-center provenance and a tree path."""

    centers: np.ndarray
    provenance: tuple = ()
    branch_id: tuple = ()

    def __post_init__(self):
        c = np.array(self.centers, dtype=np.float64, copy=True)
        if c.ndim == 1:
            c = c.reshape(1, -1) if c.size else c.reshape(0, 0)
        if not np.all(np.isfinite(c)):
            raise ValueError("candidate centers must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)
        prov = tuple(self.provenance) or ("given",) * c.shape[0]
        if len(prov) != c.shape[0]:
            raise Mismatch("one provenance tag per center is required")
        object.__setattr__(self, "provenance", prov)
        object.__setattr__(self, "branch_id", tuple(self.branch_id))

    def __len__(self):
        return self.centers.shape[0]

    def extend(self, c, tag, branch) -> "CandidateCenters":
        c = np.asarray(c, dtype=np.float64).reshape(1, -1)
        base = self.centers if len(self) else np.empty((0, c.shape[1]))
        return CandidateCenters(
            np.vstack([base, c]), self.provenance + (tag,), self.branch_id + (branch,)
        )


@dataclass(frozen=True)
class ClusterStats:
    size: int
    mean: np.ndarray
    sum_sq_dev: float
    delta: float


@dataclass
class CostReport:
    minsum_cost: float
    kmeans_cost: float
    per_cluster: list = field(default_factory=list)
    ratio_vs_reference: float | None = None
    flags: list = field(default_factory=list)


def as_dataset(ds) -> Dataset:
    return ds if isinstance(ds, Dataset) else Dataset(ds)


def as_labeling(lab, k=None) -> Labeling:
    return lab if isinstance(lab, Labeling) else Labeling.from_array(lab, k)


def as_centers(centers) -> np.ndarray:
    if isinstance(centers, CandidateCenters):
        return centers.centers
    c = np.asarray(centers, dtype=np.float64)
    return c.reshape(1, -1) if c.ndim == 1 else c


def _check(ds, lab):
    ds = as_dataset(ds)
    lab = as_labeling(lab)
    if lab.n != ds.n:
        raise InvalidLabeling(f"labeling has {lab.n} entries for {ds.n} points")
    return ds, lab


def mean(points) -> np.ndarray:
    """Coordinate-wise average of a non-empty point set.

    Parameters
    ----------
    points : array-like of shape (m, d) or Dataset

    Returns
    -------
    ndarray of shape (d,)

    Raises
    ------
    EmptyCluster
        If ``points`` has no rows.
    """
    pts = points.points if isinstance(points, Dataset) else np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1) if pts.size else pts.reshape(0, 1)
    if pts.shape[0] == 0:
        raise EmptyCluster("mean of an empty point set")
    return pts.mean(axis=0)


def _cluster_moments(X, labels, k):
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros((k, X.shape[1]))
    np.add.at(sums, labels, X)
    means = np.divide(sums, counts[:, None], out=np.zeros_like(sums), where=counts[:, None] > 0)
    dev = X - means[labels]
    ssd = np.bincount(labels, weights=np.einsum("ij,ij->i", dev, dev), minlength=k)
    return counts, means, ssd


def minsum_cost(ds, lab) -> float:
    """Min-sum cost: sum over clusters of ``|C| * sum ||p - mu(C)||^2``.

    Equal to the within-cluster sum of squared distances over unordered
    pairs. Runs in O(nd).

    Raises
    ------
    InvalidLabeling
        If a label is out of range or the lengths disagree.
    """
    ds, lab = _check(ds, lab)
    exact = _integer_minsum(ds.points, lab.labels, lab.k)
    if exact is not None:
        return exact
    counts, _, ssd = _cluster_moments(ds.points, lab.labels, lab.k)
    return float(np.dot(counts, ssd))


def _integer_minsum(X, labels, k):
    # Integer coordinates: |C| sum ||p||^2 - ||sum p||^2 is exact in int64.
    top = float(np.abs(X).max())
    n, d = X.shape
    if top > 2**20 or float(n) ** 2 * d * max(top, 1.0) ** 2 >= 2.0**62:
        return None
    if not np.array_equal(X, np.round(X)):
        return None
    Xi = X.astype(np.int64)
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    sums = np.zeros((k, d), dtype=np.int64)
    np.add.at(sums, labels, Xi)
    sq = np.zeros(k, dtype=np.int64)
    np.add.at(sq, labels, np.einsum("ij,ij->i", Xi, Xi))
    return float(int(np.dot(counts, sq)) - int(np.einsum("ij,ij->", sums, sums)))


def minsum_cost_pairwise(ds, lab) -> float:
    """Brute-force O(n^2 d) min-sum cost over unordered pairs (cross-check only)."""
    ds, lab = _check(ds, lab)
    total = 0.0
    for i in range(lab.k):
        P = ds.points[lab.labels == i]
        for a in range(P.shape[0] - 1):
            diff = P[a + 1 :] - P[a]
            total += float(np.einsum("ij,ij->", diff, diff))
    return total


def kmeans_cost(ds, centers, lab) -> float:
    """Sum of squared distances from each point to its labelled center.

    Raises
    ------
    Mismatch
        If the number of centers differs from ``lab.k``.
    """
    ds, lab = _check(ds, lab)
    C = as_centers(centers)
    if C.shape[0] != lab.k:
        raise Mismatch(f"{C.shape[0]} centers for k = {lab.k}")
    if C.shape[1] != ds.d:
        raise Mismatch(f"centers have dimension {C.shape[1]}, dataset {ds.d}")
    diff = ds.points - C[lab.labels]
    return float(np.einsum("ij,ij->", diff, diff))


def cluster_stats(ds, lab) -> list:
    """Per-cluster size, mean, sum of squared deviations and average deviation.

    Empty clusters report size 0, a NaN mean and zero deviation.
    """
    ds, lab = _check(ds, lab)
    counts, means, ssd = _cluster_moments(ds.points, lab.labels, lab.k)
    out = []
    for i in range(lab.k):
        if counts[i] == 0:
            out.append(ClusterStats(0, np.full(ds.d, np.nan), 0.0, 0.0))
        else:
            out.append(ClusterStats(int(counts[i]), means[i].copy(), float(ssd[i]), float(ssd[i] / counts[i])))
    return out


def cluster_means(ds, lab) -> np.ndarray:
    """k x d matrix of cluster means; rows of empty clusters are NaN."""
    ds, lab = _check(ds, lab)
    counts, means, _ = _cluster_moments(ds.points, lab.labels, lab.k)
    means[counts == 0] = np.nan
    return means


def cost_report(ds, lab, reference=None) -> CostReport:
    """Min-sum and k-means (at cluster means) costs plus per-cluster stats."""
    ds, lab = _check(ds, lab)
    stats = cluster_stats(ds, lab)
    ms = minsum_cost(ds, lab)
    km = float(sum(s.sum_sq_dev for s in stats))
    ratio = None
    if reference is not None:
        ratio = ms / reference if reference > 0 else (1.0 if ms == 0 else float("inf"))
    return CostReport(ms, km, stats, ratio)


def sq_dists(X, C, chunk=1 << 22) -> np.ndarray:
    """n x m matrix of squared distances between rows of X and rows of C.

    Uses explicit differences (no expansion cancellation), in row chunks.
    """
    X = np.asarray(X, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    n, m = X.shape[0], C.shape[0]
    out = np.empty((n, m))
    step = max(1, chunk // max(1, m * X.shape[1]))
    for a in range(0, n, step):
        diff = X[a : a + step, None, :] - C[None, :, :]
        out[a : a + step] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def is_approx_mean(points, c, eps) -> bool:
    """True when ``||c - mu||^2 <= eps * Delta`` for the point set."""
    pts = np.asarray(points, dtype=np.float64)
    mu = mean(pts)
    dev = pts - mu
    delta = float(np.einsum("ij,ij->", dev, dev)) / pts.shape[0]
    gap = float(np.sum((np.asarray(c) - mu) ** 2))
    return gap <= eps * delta * (1 + RTOL) + 1e-300
