"""D^2 seeding followed by a few Lloyd iterations."""

from __future__ import annotations

import numpy as np

from .geometry import Labeling, as_dataset, sq_dists


def d2_seeding(X, k, rng):
    """k-means++ style seeding: each new center drawn proportionally to D^2."""
    n = X.shape[0]
    idx = [int(rng.integers(n))]
    d2 = sq_dists(X, X[idx]).ravel()
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            # every point already sits on a center
            idx.append(idx[-1])
            continue
        j = int(rng.choice(n, p=d2 / total))
        idx.append(j)
        d2 = np.minimum(d2, sq_dists(X, X[j : j + 1]).ravel())
    return X[idx].copy()


def lloyd(X, centers, iters=10):
    C = np.array(centers, dtype=np.float64)
    k = C.shape[0]
    labels = np.argmin(sq_dists(X, C), axis=1)
    for _ in range(iters):
        for i in range(k):
            mask = labels == i
            if mask.any():
                C[i] = X[mask].mean(axis=0)
        new = np.argmin(sq_dists(X, C), axis=1)
        if np.array_equal(new, labels):
            break
        labels = new
    return C, labels


def kmeans(ds, k, rng=None, iters=10):
    """Constant-factor k-means estimate.

    Returns
    -------
    centers : ndarray (k, d)
    labeling : Labeling
    cost : float
        Sum of squared distances to the nearest center.
    """
    ds = as_dataset(ds)
    rng = np.random.default_rng(rng)
    X = ds.points
    C = d2_seeding(X, min(k, ds.n), rng)
    if C.shape[0] < k:
        C = np.vstack([C, np.repeat(C[:1], k - C.shape[0], axis=0)])
    C, labels = lloyd(X, C, iters)
    d2 = sq_dists(X, C)
    labels = np.argmin(d2, axis=1)
    cost = float(d2[np.arange(ds.n), labels].sum())
    return C, Labeling(labels, k), cost
