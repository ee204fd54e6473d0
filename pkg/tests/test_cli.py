import json

import numpy as np
import pytest

from minsum.cli import bench_jobs, main
from minsum.geometry import Dataset, Labeling, minsum_cost
from minsum.io import read_dataset, read_labels, write_dataset, write_labels
from minsum.report import REPORT_KEYS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_solve_evaluate_roundtrip(tmp_path, capsys):
    data, truth, out = tmp_path / "d.csv", tmp_path / "t.labels", tmp_path / "o.labels"
    code, _, _ = run(capsys, "generate", "--kind", "gaussian", "--k", 2, "--n", 9, "--seed", 4, "-o", data, "--truth", truth)
    assert code == 0 and read_dataset(data).n == 9
    code, text, _ = run(capsys, "solve", "--data", data, "--k", 2, "--algo", "exact", "-o", out, "--reference", truth)
    rep = json.loads(text)
    assert code == 0 and set(REPORT_KEYS) <= set(rep) and rep["ratio"] <= 1.0 + 1e-12
    code, text, _ = run(capsys, "evaluate", "--data", data, "--labels", out)
    assert json.loads(text)["minsum_cost"] == rep["cost"]


def test_evaluate_zero_cost(tmp_path, capsys):
    data, lab = tmp_path / "d.csv", tmp_path / "l.labels"
    write_dataset(data, Dataset(np.repeat([[0.0, 0.0], [3.0, 3.0]], 4, axis=0)))
    write_labels(lab, Labeling(np.repeat([0, 1], 4), 2))
    code, text, _ = run(capsys, "evaluate", "--data", data, "--labels", lab)
    assert code == 0 and json.loads(text)["minsum_cost"] == 0.0


@pytest.mark.parametrize("algo", ["ptas", "kmeans-baseline", "learned"])
def test_solve_algorithms(tmp_path, capsys, algo):
    data, truth, out = tmp_path / "d.csv", tmp_path / "t.labels", tmp_path / "o.labels"
    run(capsys, "generate", "--kind", "gaussian", "--k", 2, "--n", 16, "--seed", 1, "-o", data, "--truth", truth)
    extra = ["--labels", truth, "--alpha", 0.1] if algo == "learned" else []
    code, text, _ = run(capsys, "solve", "--data", data, "--k", 2, "--algo", algo, "--seed", 3, "-o", out, *extra)
    rep = json.loads(text)
    assert code == 0 and rep["algo"] == algo
    ds, lab = read_dataset(data), read_labels(out, n=16)
    assert rep["cost"] == minsum_cost(ds, Labeling(lab.labels, 2))
    if algo == "ptas":
        assert any("capped" in f for f in rep["flags"]) and rep["epsilon"] == 0.5


def test_learned_sweep(tmp_path, capsys):
    data, truth = tmp_path / "d.csv", tmp_path / "t.labels"
    run(capsys, "generate", "--kind", "rings", "--seed", 1, "-o", data, "--truth", truth)
    code, text, _ = run(capsys, "solve", "--data", data, "--algo", "learned", "--labels", truth, "--alpha-sweep")
    assert code == 0 and json.loads(text)["alpha"] is not None
    code, _, err = run(capsys, "solve", "--data", data, "--algo", "learned", "--labels", truth)
    assert code != 0 and "--alpha" in err


def test_corrupt_and_audit(tmp_path, capsys):
    truth, pred = tmp_path / "t.labels", tmp_path / "p.labels"
    write_labels(truth, Labeling(np.repeat([0, 1], 10), 2))
    code, text, _ = run(capsys, "corrupt", "--labels", truth, "--alpha", 0.2, "--seed", 5, "-o", pred)
    assert code == 0 and json.loads(text)["alpha_achieved"] == pytest.approx(0.2)
    code, text, _ = run(capsys, "audit", "--labels", pred, "--truth", truth)
    assert code == 0 and json.loads(text)["error_rate"] == pytest.approx(0.2)
    code, _, err = run(capsys, "corrupt", "--labels", truth, "--alpha", 0.6, "-o", pred)
    assert code != 0 and "alpha" in err


def test_cover_search_cmd(tmp_path, capsys):
    sets = tmp_path / "s.txt"
    run(capsys, "generate", "--kind", "jch", "--n-universe", 9, "--z", 3, "--k", 2, "--sets-per-part", 4,
        "-o", tmp_path / "d.csv", "--sets", sets)
    code, text, _ = run(capsys, "cover-search", "--sets", sets, "--k", 2)
    res = json.loads(text)
    assert code == 0 and res["covered"] == res["m"] == 8


def test_parse_error_reports_line(tmp_path, capsys):
    data = tmp_path / "bad.csv"
    data.write_text("0,1\n2,3\n4,x\n")
    code, _, err = run(capsys, "solve", "--data", data, "--k", 2, "--algo", "exact")
    assert code != 0 and "bad.csv:3:" in err
    labs = tmp_path / "bad.labels"
    labs.write_text("0\n1\nfoo\n")
    write_dataset(tmp_path / "ok.csv", Dataset(np.zeros((3, 1))))
    code, _, err = run(capsys, "evaluate", "--data", tmp_path / "ok.csv", "--labels", labs)
    assert code != 0 and "bad.labels:3:" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--bogus"])
    assert exc.value.code != 0
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code != 0


def test_bench_matrix(tmp_path, capsys):
    assert len(bench_jobs(range(5))) == 45
    code, text, _ = run(capsys, "bench", "--seeds", 1, "--out-dir", tmp_path)
    rows = [json.loads(line) for line in (tmp_path / "bench.jsonl").read_text().splitlines()]
    assert code == 0 and len(rows) == 9 and "9 runs" in text
    assert {r["algo"] for r in rows} == {"ptas", "learned", "kmeans-baseline"}
    assert all(set(REPORT_KEYS) <= set(r) for r in rows)
    assert len(list(tmp_path.glob("*.labels"))) == 9
