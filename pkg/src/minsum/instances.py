"""Instance generators: Gaussian mixtures, concentric rings, set-system
embeddings, grids, and a Johnson-Lindenstrauss projection."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicateSet, Infeasible
from .geometry import Dataset, Labeling, as_dataset, minsum_cost


@dataclass
class InstanceSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0


@dataclass
class SetSystemInstance:
    """z-element subsets of range(n_universe), optionally with a planted cover.

    ``cover[a]`` is a (z-1)-set and ``psi[t]`` is the part of set t; in a
    completeness instance every set contains the cover set of its part.
    """

    n_universe: int
    z: int
    sets: list
    cover: list | None = None
    psi: list | None = None
    certified: bool = True

    def __post_init__(self):
        self.sets = [tuple(sorted(int(e) for e in s)) for s in self.sets]
        for s in self.sets:
            if len(s) != self.z or len(set(s)) != self.z:
                raise ValueError(f"set {s} does not have {self.z} distinct elements")
            if s[0] < 0 or s[-1] >= self.n_universe:
                raise ValueError(f"set {s} leaves the universe [0, {self.n_universe})")


def _even_sizes(n, k):
    base, extra = divmod(n, k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def _spread_centers(k, d, separation, rng):
    if separation <= 0 or k == 1:
        return np.zeros((k, d))
    side = separation * max(2.0, 2.0 * k ** (1.0 / d))
    for _ in range(1000):
        C = rng.uniform(0, side, size=(k, d))
        diff = C[:, None, :] - C[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        np.fill_diagonal(dist, np.inf)
        if dist.min() >= separation:
            return C
    # fall back to points on a line
    C = np.zeros((k, d))
    C[:, 0] = separation * np.arange(k)
    return C


def gen_gaussian(k, n, d=2, separation=10.0, sigma=1.0, rng=None):
    """Isotropic Gaussian blobs around k centers at pairwise distance >= separation.

    Returns
    -------
    (Dataset, Labeling, centers)
    """
    rng = np.random.default_rng(rng)
    C = _spread_centers(k, d, separation, rng)
    sizes = _even_sizes(n, k)
    labels = np.repeat(np.arange(k), sizes)
    X = C[labels] + sigma * rng.standard_normal((n, d))
    return Dataset(X), Labeling(labels, k), C


def best_halfplane(ds):
    """Two-cluster split by a vertical line x = t with the least min-sum cost."""
    ds = as_dataset(ds)
    xs = np.unique(ds.points[:, 0])
    best = None
    for t in (xs[:-1] + xs[1:]) / 2:
        lab = Labeling((ds.points[:, 0] > t).astype(np.int64), 2)
        c = minsum_cost(ds, lab)
        if best is None or c < best[0]:
            best = (c, lab)
    if best is None:
        return Labeling(np.zeros(ds.n, dtype=np.int64), 2)
    return best[1]


def gen_rings(n_in=12, n_out=12, r_in=1.0, r_out=3.0, jitter=0.0, rng=None):
    """Two concentric circles of evenly spaced points.

    Angles are offset by half a step so no point lies on the vertical axis.

    Returns
    -------
    (Dataset, ring Labeling, halfplane Labeling)
    """
    if not 0 < r_in < r_out:
        raise ValueError("need 0 < r_in < r_out")
    rng = np.random.default_rng(rng)
    pts = []
    for m, r in ((n_in, r_in), (n_out, r_out)):
        a = 2 * np.pi * (np.arange(m) + 0.5) / m
        pts.append(r * np.column_stack([np.cos(a), np.sin(a)]))
    X = np.vstack(pts)
    if jitter > 0:
        X = X + jitter * rng.standard_normal(X.shape)
    ds = Dataset(X)
    ring = Labeling(np.repeat([0, 1], [n_in, n_out]), 2)
    return ds, ring, best_halfplane(ds)


def gen_grid(side, d=2, spacing=1.0):
    axes = [np.arange(side) * spacing] * d
    X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return Dataset(X)


def gen_jch_points(sys: SetSystemInstance):
    """One 0/1 point per set: the characteristic vector in R^n_universe.

    Returns
    -------
    (Dataset, Labeling or None)

    Raises
    ------
    DuplicateSet
        If a set occurs twice.
    """
    seen = set()
    for s in sys.sets:
        if s in seen:
            raise DuplicateSet(f"set {s} occurs more than once")
        seen.add(s)
    X = np.zeros((len(sys.sets), sys.n_universe))
    for row, s in enumerate(sys.sets):
        X[row, list(s)] = 1.0
    truth = None
    if sys.psi is not None:
        truth = Labeling(np.asarray(sys.psi, dtype=np.int64), len(sys.cover))
    return Dataset(X), truth


def gen_jch_completeness(n_universe, z, k, sets_per_part, rng=None) -> SetSystemInstance:
    """Planted instance: k disjoint (z-1)-sets, each extended by distinct extras.

    Each part has exactly ``sets_per_part`` sets. Extras outside every cover
    set are preferred so that no set belongs to two parts.

    Raises
    ------
    Infeasible
        If the cover sets do not fit or a part cannot get enough distinct sets.
    """
    if z < 2:
        raise Infeasible("z must be at least 2")
    if k * (z - 1) > n_universe:
        raise Infeasible(f"{k} disjoint {z - 1}-sets do not fit in a universe of {n_universe}")
    if sets_per_part > n_universe - (z - 1):
        raise Infeasible("sets_per_part exceeds the number of possible extensions")
    rng = np.random.default_rng(rng)
    perm = rng.permutation(n_universe)
    cover = [tuple(sorted(int(e) for e in perm[a * (z - 1) : (a + 1) * (z - 1)])) for a in range(k)]
    in_cover = set(itertools.chain.from_iterable(cover))
    sets, psi, used = [], [], set()
    for a, base in enumerate(cover):
        free = [int(e) for e in rng.permutation(n_universe) if e not in in_cover]
        shared = [int(e) for e in rng.permutation(n_universe) if e in in_cover and e not in base]
        got = 0
        for e in free + shared:
            if got == sets_per_part:
                break
            s = tuple(sorted(base + (e,)))
            if s in used:
                continue
            used.add(s)
            sets.append(s)
            psi.append(a)
            got += 1
        if got < sets_per_part:
            raise Infeasible(f"part {a} admits only {got} distinct sets")
    return SetSystemInstance(n_universe, z, sets, cover, psi)


def gen_jch_random(n_universe, z, m, rng=None) -> SetSystemInstance:
    """m distinct random z-sets. No soundness guarantee; marked uncertified."""
    if m > math.comb(n_universe, z):
        raise Infeasible(f"only {math.comb(n_universe, z)} distinct {z}-sets exist")
    rng = np.random.default_rng(rng)
    seen = []
    used = set()
    while len(seen) < m:
        s = tuple(sorted(int(e) for e in rng.choice(n_universe, size=z, replace=False)))
        if s not in used:
            used.add(s)
            seen.append(s)
    return SetSystemInstance(n_universe, z, seen, certified=False)


def completeness_cost(k, per_part):
    """Min-sum cost of the planted clustering: k * m_k * (m_k - 1)."""
    return k * per_part * (per_part - 1)


def cover_search(sys: SetSystemInstance, k, limit=12):
    """Exhaustive best coverage by k sets of size z-1.

    Only (z-1)-sets contained in some member can cover anything, so those
    are the candidates; a k-subset of all (z-1)-sets covers no more.

    Returns
    -------
    (covered_count, best_choice)
    """
    if sys.n_universe > limit:
        raise ValueError(f"cover search limited to n_universe <= {limit}")
    cands = sorted({c for s in sys.sets for c in itertools.combinations(s, sys.z - 1)})
    masks = []
    for c in cands:
        cs = set(c)
        masks.append(sum(1 << t for t, s in enumerate(sys.sets) if cs.issubset(s)))
    best = (0, ())
    for combo in itertools.combinations(range(len(cands)), min(k, len(cands))):
        m = 0
        for i in combo:
            m |= masks[i]
        cnt = bin(m).count("1")
        if cnt > best[0]:
            best = (cnt, tuple(cands[i] for i in combo))
            if cnt == len(sys.sets):
                break
    return best


def jl_target_dim(n, eps):
    return max(1, math.ceil(8 * math.log(max(n, 2)) / eps**2))


def jl_project(ds, eps, rng=None) -> Dataset:
    """Gaussian random projection to ceil(8 ln n / eps^2) dimensions."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    ds = as_dataset(ds)
    rng = np.random.default_rng(rng)
    t = jl_target_dim(ds.n, eps)
    G = rng.standard_normal((ds.d, t)) / math.sqrt(t)
    return Dataset(ds.points @ G)


def generate(spec: InstanceSpec):
    """Dispatch on ``spec.kind``; returns (Dataset, truth Labeling or None, extras)."""
    p = dict(spec.params)
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "gaussian":
        ds, truth, C = gen_gaussian(
            p.get("k", 3), p.get("n", 60), p.get("d", 2), p.get("separation", 10.0), p.get("sigma", 1.0), rng
        )
        return ds, truth, {"centers": C}
    if spec.kind == "rings":
        ds, ring, half = gen_rings(
            p.get("n_in", 12), p.get("n_out", 12), p.get("r_in", 1.0), p.get("r_out", 3.0), p.get("jitter", 0.0), rng
        )
        return ds, ring, {"halfplane": half}
    if spec.kind == "jch":
        sys = gen_jch_completeness(p.get("n_universe", 12), p.get("z", 3), p.get("k", 2), p.get("sets_per_part", 4), rng)
        ds, truth = gen_jch_points(sys)
        return ds, truth, {"set_system": sys}
    if spec.kind == "grid":
        return gen_grid(p.get("side", 4), p.get("d", 2), p.get("spacing", 1.0)), None, {}
    if spec.kind == "file":
        from .io import read_dataset

        return read_dataset(p["path"]), None, {}
    raise ValueError(f"unknown instance kind {spec.kind!r}")
