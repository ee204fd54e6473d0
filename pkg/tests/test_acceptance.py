"""Acceptance gate. Each test prints one PASS/FAIL line and then asserts."""

import filecmp
import json
import time

import numpy as np
import pytest

from flow_oracle import brute_force_flow, random_network
from minsum.cli import main
from minsum.exact import brute_force_minsum
from minsum.flow import check_flow, solve_min_cost_flow
from minsum.geometry import (
    Dataset,
    Labeling,
    cluster_means,
    is_approx_mean,
    kmeans_cost,
    minsum_cost,
    minsum_cost_pairwise,
    rel_close,
)
from minsum.instances import completeness_cost, gen_gaussian, gen_jch_completeness, gen_jch_points, gen_rings
from minsum.learned import LabelPrediction, alpha_sweep, approx_bound, learned_centers, solve_learned
from minsum.oracle_sim import corrupt_labels, verify_error_rate
from minsum.ptas import PtasConfig, solve_ptas


@pytest.fixture
def verdict(capsys):
    def emit(num, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {num:>2}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def test_identity_suite(verdict):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(1000):
        n, d = int(rng.integers(1, 201)), int(rng.integers(1, 11))
        A = rng.normal(size=(n, d)) * rng.uniform(0.01, 100) + rng.normal(size=d) * 10
        mu = A.mean(axis=0)
        ssd = float(((A - mu) ** 2).sum())
        delta = ssd / n
        c = mu + rng.normal(size=d) * rng.uniform(0, 2) * np.sqrt(max(delta, 1e-300))
        # identity A
        bad += not rel_close(float(((A - c) ** 2).sum()), ssd + n * float(((mu - c) ** 2).sum()))
        # identity B over unordered pairs
        diff = A[:, None, :] - A[None, :, :]
        pairs = float(np.einsum("ijk,ijk->", diff, diff)) / 2
        bad += not rel_close(pairs, n * ssd, atol=1e-12 * max(1.0, n * ssd))
        # approximate-mean equivalence, both directions
        for eps in (0.1, 0.5):
            lhs = float(((A - c) ** 2).sum()) <= (1 + eps) * n * delta * (1 + 1e-12)
            bad += lhs != is_approx_mean(A, c, eps)
    wall = time.perf_counter() - t0
    verdict(1, bad == 0 and wall < 10, f"identities on 1000 sets: {bad} violations, {wall:.2f}s")


def test_minsum_matches_pairwise(verdict):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(500):
        n, d, k = int(rng.integers(1, 120)), int(rng.integers(1, 8)), int(rng.integers(1, 6))
        ds = Dataset(rng.normal(size=(n, d)) * rng.uniform(0.1, 50))
        lab = Labeling(rng.integers(k, size=n), k)
        a, b = minsum_cost(ds, lab), minsum_cost_pairwise(ds, lab)
        worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-300))
    verdict(2, worst <= 1e-9, f"500 labelings, worst relative gap {worst:.2e}")


def _oracle_instance(t):
    rng = np.random.default_rng(1000 + t)
    kind = t % 4
    k = int(rng.integers(1, 4))
    n = int(rng.integers(max(k, 4), 11))
    d = int(rng.integers(1, 4))
    if kind == 0:
        ds, _, _ = gen_gaussian(k, n, d, 5.0, 1.0, rng)
    elif kind == 1:
        ds = Dataset(rng.uniform(0, 1, (n, d)))
    elif kind == 2:
        ds, _, _ = gen_rings(n // 2, n - n // 2, 1.0, 3.0, 0.05, rng)
        k = 2
    else:
        ds, _ = gen_jch_points(gen_jch_completeness(6, 2, 2, int(rng.integers(2, 5)), rng))
        k = 2
    return ds, k


def test_ptas_oracle_scale(verdict):
    # exact routing is disabled so the sampling pipeline itself is measured
    t0 = time.perf_counter()
    good = 0
    for t in range(100):
        ds, k = _oracle_instance(t)
        opt = brute_force_minsum(ds, k).best_cost
        cfg = PtasConfig(epsilon=0.3, delta=0.1, max_sample=200, max_subset=6, max_leaves=5000,
                         exact_threshold=0, seed=t)
        cost = solve_ptas(ds, k, cfg).report.minsum_cost
        good += cost <= 1.3 * opt * (1 + 1e-9) + 1e-12
    wall = time.perf_counter() - t0
    verdict(3, good >= 95 and wall < 300, f"{good}/100 within 1.3 x OPT, {wall:.1f}s")


def test_learned_oracle_scale(verdict):
    trials = ok = 0
    for t in range(60):
        rng = np.random.default_rng(t)
        k = int(rng.integers(2, 4))
        n = int(rng.integers(2 * k, 11))
        ds, _, _ = gen_gaussian(k, n, int(rng.integers(1, 4)), float(rng.choice([0.0, 3.0, 10.0])), 1.0, rng)
        opt = brute_force_minsum(ds, k)
        ref = opt.best_labeling
        if np.any(ref.sizes() == 0):
            continue
        for alpha in (0.0, 0.1, 0.2):
            pred, _ = corrupt_labels(ref, alpha, rng)
            assert verify_error_rate(pred.labels, ref) <= alpha + 1e-12
            cost = solve_learned(ds, pred).report.minsum_cost
            trials += 1
            ok += cost <= approx_bound(alpha) * opt.best_cost * (1 + 1e-9) + 1e-12
    verdict(4, trials > 0 and ok == trials, f"{ok}/{trials} trials within the alpha bound")


def test_flow_integral_optimal(verdict):
    rng = np.random.default_rng(5)
    n_feasible = mismatches = 0
    for _ in range(200):
        net = random_network(rng, max_nodes=8, max_arcs=12)
        best = brute_force_flow(net)
        sol = solve_min_cost_flow(net)
        integral = sol.flow.dtype.kind in "iu"
        if best is None:
            mismatches += sol.feasible or not integral
            continue
        n_feasible += 1
        mismatches += not (sol.feasible and integral and rel_close(sol.total_cost, best, atol=1e-9)
                           and check_flow(net, sol) == [])
    verdict(5, mismatches == 0, f"200 networks ({n_feasible} feasible), {mismatches} mismatches")


def test_hardness_instance_costs(verdict):
    rng = np.random.default_rng(6)
    bad = []
    for z in (2, 3):
        for k in (2, 3):
            for per in (3, 4, 5):
                sys = gen_jch_completeness(k * (z - 1) + per + 1, z, k, per, rng)
                ds, truth = gen_jch_points(sys)
                for a in range(k):
                    P = ds.points[truth.labels == a]
                    D = ((P[:, None] - P[None]) ** 2).sum(-1)
                    if not np.all(D[~np.eye(per, dtype=bool)] == 2):
                        bad.append((z, k, per, "distance"))
                want = k * per * (per - 1)
                if not (minsum_cost(ds, truth) == want == completeness_cost(k, per)
                        and minsum_cost_pairwise(ds, truth) == want):
                    bad.append((z, k, per, "cost"))
    verdict(6, not bad, f"12 planted instances, failures {bad}")


def test_two_site_instance(verdict):
    X = np.array([[0.0]] * 5 + [[1.0]] * 5)
    labels = np.array([0] * 5 + [1] * 5)
    labels[5] = 0  # one mislabelled point
    ds, pred = Dataset(X), Labeling(labels, 2)
    naive = minsum_cost(ds, pred)
    got = alpha_sweep(ds, pred).best.report.minsum_cost
    verdict(7, got == 0.0 and naive > 0, f"pipeline cost {got}, naive labeling cost {naive:.4g}")


def test_rings_instance(verdict):
    ds, ring, half = gen_rings(12, 12, 1.0, 3.0)
    ms_ring, ms_half = minsum_cost(ds, ring), minsum_cost(ds, half)
    km_ring = kmeans_cost(ds, cluster_means(ds, ring), ring)
    km_half = kmeans_cost(ds, cluster_means(ds, half), half)
    ok = ms_ring < ms_half and km_half < km_ring
    verdict(8, ok, f"min-sum ring {ms_ring:.4g} vs halfplane {ms_half:.4g}; "
                   f"k-means ring {km_ring:.4g} vs halfplane {km_half:.4g}")


def test_learned_centers_per_cluster(verdict):
    worst = 0.0
    for t in range(100):
        rng = np.random.default_rng(t)
        k = int(rng.integers(2, 5))
        ds, truth, _ = gen_gaussian(k, int(rng.integers(10 * k, 40 * k)), int(rng.integers(1, 4)),
                                    float(rng.choice([3.0, 5.0, 10.0])), 1.0, rng)
        pred, _ = corrupt_labels(truth, 0.1, rng)
        C = learned_centers(ds, pred).centers
        for i in range(k):
            P = ds.points[truth.labels == i]
            ratio = ((P - C[i]) ** 2).sum() / ((P - P.mean(axis=0)) ** 2).sum()
            worst = max(worst, ratio)
    verdict(9, worst <= 1.77, f"worst per-cluster ratio {worst:.4f} (bound 1.77)")


def test_bench_determinism(verdict, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["bench", "--seeds", "5", "--jobs", "2", "--out-dir", str(out)]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in a.glob("*.labels"))
    same_files = names == sorted(p.name for p in b.glob("*.labels")) and all(
        filecmp.cmp(a / f, b / f, shallow=False) for f in names
    )
    rows_a = [json.loads(x) for x in (a / "bench.jsonl").read_text().splitlines()]
    rows_b = [json.loads(x) for x in (b / "bench.jsonl").read_text().splitlines()]
    same_costs = [r["cost"] for r in rows_a] == [r["cost"] for r in rows_b]
    ok = same_files and same_costs and len(rows_a) == 45 and len(names) == 45
    verdict(10, ok, f"{len(rows_a)} rows, labeling files identical={same_files}, costs identical={same_costs}")
