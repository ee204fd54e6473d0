"""Command-line entry point: ``minsum <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .errors import MinsumError
from .exact import brute_force_minsum
from .geometry import Labeling, cost_report, minsum_cost
from .instances import InstanceSpec, cover_search, generate
from .io import read_dataset, read_labels, read_set_system, write_dataset, write_labels, write_set_system
from .kmeans import kmeans
from .learned import LabelPrediction, alpha_sweep, solve_learned
from .oracle_sim import corrupt_labels, verify_error_rate
from .ptas import PtasConfig, solve_ptas
from .report import RunReport, summary_table

ALGOS = ("exact", "ptas", "learned", "kmeans-baseline")
BENCH_KINDS = ("gaussian", "rings", "jch")
BENCH_ALGOS = ("ptas", "learned", "kmeans-baseline")
BENCH_PARAMS = {
    "gaussian": {"k": 3, "n": 24, "d": 2, "separation": 10.0, "sigma": 1.0},
    "rings": {"n_in": 12, "n_out": 12, "r_in": 1.0, "r_out": 3.0, "jitter": 0.05},
    "jch": {"n_universe": 12, "z": 3, "k": 2, "sets_per_part": 4},
}
BENCH_ALPHA = 0.1


def _kind_params(args):
    if args.kind == "gaussian":
        return {"k": args.k, "n": args.n, "d": args.d, "separation": args.separation, "sigma": args.sigma}
    if args.kind == "rings":
        return {"n_in": args.n_in, "n_out": args.n_out, "r_in": args.r_in, "r_out": args.r_out, "jitter": args.jitter}
    if args.kind == "jch":
        return {"n_universe": args.n_universe, "z": args.z, "k": args.k, "sets_per_part": args.sets_per_part}
    return {"side": args.side, "d": args.d}


def cmd_generate(args):
    ds, truth, extra = generate(InstanceSpec(args.kind, _kind_params(args), args.seed))
    write_dataset(args.output, ds)
    if args.truth and truth is not None:
        write_labels(args.truth, truth)
    if args.sets and "set_system" in extra:
        write_set_system(args.sets, extra["set_system"])
    print(f"wrote {ds.n} points in {ds.d} dimensions to {args.output}")
    return 0


def run_algo(algo, ds, k, seed, *, labels=None, alpha=None, sweep=False, epsilon=0.5, delta=0.1,
             max_leaves=5000, max_sample=200, max_subset=6):
    """Run one solver; returns (Labeling, flags, alpha_used)."""
    if algo == "exact":
        return brute_force_minsum(ds, k).best_labeling, [], None
    if algo == "ptas":
        cfg = PtasConfig(epsilon=epsilon, delta=delta, max_leaves=max_leaves, max_sample=max_sample,
                         max_subset=max_subset, seed=seed)
        res = solve_ptas(ds, k, cfg)
        return res.labeling, res.flags, None
    if algo == "learned":
        if labels is None:
            raise MinsumError("--algo learned needs --labels")
        if sweep:
            res = alpha_sweep(ds, labels).best
        else:
            if alpha is None:
                raise MinsumError("--algo learned needs --alpha or --alpha-sweep")
            res = solve_learned(ds, LabelPrediction(labels, alpha))
        return res.labeling, res.flags, res.alpha_used
    if algo == "kmeans-baseline":
        _, lab, _ = kmeans(ds, k, np.random.default_rng(seed))
        return lab, [], None
    raise MinsumError(f"unknown algorithm {algo!r}")


def _report(algo, kind, seed, ds, lab, flags, wall_ms, epsilon=None, alpha=None, reference=None, config=None):
    rep = cost_report(ds, lab, reference)
    return RunReport(algo, seed, ds.n, ds.d, lab.k, epsilon, alpha, rep.minsum_cost, rep.ratio_vs_reference,
                     wall_ms, list(flags), config or {}, kind)


def cmd_solve(args):
    ds = read_dataset(args.data)
    labels = read_labels(args.labels, n=ds.n) if args.labels else None
    k = args.k if args.k is not None else (labels.k if labels is not None else None)
    if k is None:
        raise MinsumError("--k is required unless --labels is given")
    if labels is not None and labels.k != k:
        labels = Labeling(labels.labels, max(k, labels.k))
    ref = None
    if args.reference:
        ref = minsum_cost(ds, read_labels(args.reference, n=ds.n))
    t0 = time.perf_counter()
    lab, flags, a = run_algo(args.algo, ds, k, args.seed, labels=labels, alpha=args.alpha, sweep=args.alpha_sweep,
                             epsilon=args.epsilon, delta=args.delta, max_leaves=args.max_leaves,
                             max_sample=args.max_sample, max_subset=args.max_subset)
    wall = 1000 * (time.perf_counter() - t0)
    config = {"epsilon": args.epsilon, "delta": args.delta, "max_leaves": args.max_leaves,
              "max_sample": args.max_sample, "max_subset": args.max_subset}
    eps = args.epsilon if args.algo == "ptas" else None
    rep = _report(args.algo, None, args.seed, ds, lab, flags, wall, eps, a, ref,
                  config if args.algo == "ptas" else {})
    if args.output:
        write_labels(args.output, lab)
    line = rep.to_json()
    if args.report:
        Path(args.report).write_text(line + "\n")
    print(line)
    return 0


def cmd_evaluate(args):
    ds = read_dataset(args.data)
    lab = read_labels(args.labels, n=ds.n)
    if args.k is not None:
        lab = Labeling(lab.labels, max(args.k, lab.k))
    ref = minsum_cost(ds, read_labels(args.reference, n=ds.n)) if args.reference else None
    rep = cost_report(ds, lab, ref)
    out = {"minsum_cost": rep.minsum_cost, "kmeans_cost": rep.kmeans_cost,
           "sizes": [s.size for s in rep.per_cluster], "ratio": rep.ratio_vs_reference}
    print(json.dumps(out))
    return 0


def cmd_corrupt(args):
    truth = read_labels(args.labels)
    pred, plan = corrupt_labels(truth, args.alpha, np.random.default_rng(args.seed))
    write_labels(args.output, pred.labels)
    print(json.dumps({"alpha_target": plan.alpha_target, "alpha_achieved": plan.alpha_achieved,
                      "moves": len(plan.moves)}))
    return 0


def cmd_audit(args):
    truth = read_labels(args.truth)
    pred = read_labels(args.labels, n=truth.n)
    rate = verify_error_rate(pred, truth, match=not args.no_match)
    print(json.dumps({"error_rate": rate}))
    return 0


def cmd_cover_search(args):
    sysm = read_set_system(args.sets)
    covered, choice = cover_search(sysm, args.k)
    print(json.dumps({"covered": covered, "m": len(sysm.sets), "cover": [list(c) for c in choice]}))
    return 0


def _bench_run(job):
    kind, seed, algo, eps = job
    ds, truth, _ = generate(InstanceSpec(kind, BENCH_PARAMS[kind], seed))
    k = truth.k
    ref = brute_force_minsum(ds, k).best_cost if ds.n <= 10 else minsum_cost(ds, truth)
    labels, alpha = None, None
    if algo == "learned":
        pred, _ = corrupt_labels(truth, BENCH_ALPHA, np.random.default_rng(seed))
        labels, alpha = pred.labels, BENCH_ALPHA
    t0 = time.perf_counter()
    lab, flags, a = run_algo(algo, ds, k, seed, labels=labels, alpha=alpha, epsilon=eps)
    wall = 1000 * (time.perf_counter() - t0)
    rep = _report(algo, kind, seed, ds, lab, flags, wall, eps if algo == "ptas" else None, a, ref,
                  dict(BENCH_PARAMS[kind]))
    return rep, lab.labels


def bench_jobs(seeds, kinds=BENCH_KINDS, algos=BENCH_ALGOS, epsilon=0.5):
    return [(kind, s, algo, epsilon) for s in seeds for kind in kinds for algo in algos]


def cmd_bench(args):
    seeds = list(range(args.seed, args.seed + args.seeds))
    jobs = bench_jobs(seeds, epsilon=args.epsilon)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_bench_run, jobs))
    else:
        results = [_bench_run(j) for j in jobs]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    with open(out / "bench.jsonl", "w") as fh:
        for (kind, seed, algo, _), (rep, labels) in zip(jobs, results):
            write_labels(out / f"{kind}_s{seed}_{algo}.labels", labels)
            fh.write(rep.to_json() + "\n")
            reports.append(rep)
    print(summary_table(reports))
    print(f"{len(reports)} runs written to {out / 'bench.jsonl'}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="minsum", description="Min-sum k-clustering tools")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="write a synthetic instance")
    g.add_argument("--kind", choices=("gaussian", "rings", "jch", "grid"), required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--n", type=int, default=60)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--separation", type=float, default=10.0)
    g.add_argument("--sigma", type=float, default=1.0)
    g.add_argument("--n-in", type=int, default=12)
    g.add_argument("--n-out", type=int, default=12)
    g.add_argument("--r-in", type=float, default=1.0)
    g.add_argument("--r-out", type=float, default=3.0)
    g.add_argument("--jitter", type=float, default=0.0)
    g.add_argument("--n-universe", type=int, default=12)
    g.add_argument("--z", type=int, default=3)
    g.add_argument("--sets-per-part", type=int, default=4)
    g.add_argument("--side", type=int, default=4)
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--truth")
    g.add_argument("--sets", help="also write the set system (jch only)")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="cluster a dataset")
    s.add_argument("--data", required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--algo", choices=ALGOS, default="ptas")
    s.add_argument("--labels", help="predicted labels for --algo learned")
    grp = s.add_mutually_exclusive_group()
    grp.add_argument("--alpha", type=float)
    grp.add_argument("--alpha-sweep", action="store_true")
    s.add_argument("--epsilon", type=float, default=0.5)
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--max-leaves", type=int, default=5000)
    s.add_argument("--max-sample", type=int, default=200)
    s.add_argument("--max-subset", type=int, default=6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--reference", help="labeling whose cost is the ratio denominator")
    s.add_argument("-o", "--output", help="labeling output file")
    s.add_argument("--report", help="JSON-lines report file")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("evaluate", help="costs of a given labeling")
    e.add_argument("--data", required=True)
    e.add_argument("--labels", required=True)
    e.add_argument("--k", type=int)
    e.add_argument("--reference")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("corrupt", help="simulate a label predictor")
    c.add_argument("--labels", required=True)
    c.add_argument("--alpha", type=float, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("-o", "--output", required=True)
    c.set_defaults(func=cmd_corrupt)

    a = sub.add_parser("audit", help="error rate of predicted labels")
    a.add_argument("--labels", required=True)
    a.add_argument("--truth", required=True)
    a.add_argument("--no-match", action="store_true", help="compare label ids as given")
    a.set_defaults(func=cmd_audit)

    b = sub.add_parser("bench", help="seeded instance x algorithm matrix")
    b.add_argument("--seeds", type=int, default=5)
    b.add_argument("--seed", type=int, default=0, help="first seed")
    b.add_argument("--epsilon", type=float, default=0.5)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out-dir", required=True)
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("cover-search", help="exhaustive best k-cover of a small set system")
    v.add_argument("--sets", required=True)
    v.add_argument("--k", type=int, required=True)
    v.set_defaults(func=cmd_cover_search)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MinsumError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
