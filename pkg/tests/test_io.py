import numpy as np
import pytest

from minsum.errors import ParseError
from minsum.geometry import Dataset, Labeling
from minsum.instances import gen_jch_completeness
from minsum.io import read_dataset, read_labels, read_set_system, write_dataset, write_labels, write_set_system


def test_dataset_roundtrip_bit_exact(tmp_path, rng):
    X = rng.normal(size=(25, 3)) * 1e-7 + rng.normal(size=(25, 3)) * 1e5
    p = tmp_path / "d.csv"
    write_dataset(p, Dataset(X))
    assert np.array_equal(read_dataset(p).points, X)
    write_dataset(p, Dataset(X), header=True)
    assert np.array_equal(read_dataset(p).points, X)


def test_labels_roundtrip(tmp_path):
    p = tmp_path / "l.txt"
    write_labels(p, Labeling([2, 0, 1, 1], 3))
    lab = read_labels(p, k=3, n=4)
    assert lab.labels.tolist() == [2, 0, 1, 1] and lab.k == 3


def test_dataset_parse_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1.0,2.0\n3.0,oops\n")
    with pytest.raises(ParseError, match=r"bad.csv:2:"):
        read_dataset(p)
    p.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(ParseError, match=r":2: expected 2 columns"):
        read_dataset(p)
    p.write_text("1.0,inf\n")
    with pytest.raises(ParseError, match=r":1: non-finite"):
        read_dataset(p)
    p.write_text("x,y\n")
    with pytest.raises(ParseError):
        read_dataset(p)


def test_labels_parse_errors(tmp_path):
    p = tmp_path / "l.txt"
    p.write_text("0\n1\nx\n")
    with pytest.raises(ParseError, match=r":3: not an integer"):
        read_labels(p)
    p.write_text("0\n5\n")
    with pytest.raises(ParseError, match=r":2: label 5"):
        read_labels(p, k=2)
    p.write_text("0\n1\n")
    with pytest.raises(ParseError, match="expected 3 labels"):
        read_labels(p, n=3)


def test_set_system_roundtrip(tmp_path):
    sys = gen_jch_completeness(8, 3, 2, 4, np.random.default_rng(0))
    p = tmp_path / "s.txt"
    write_set_system(p, sys)
    back = read_set_system(p)
    assert back.sets == sys.sets and back.z == 3 and back.n_universe == 8
    assert p.read_text().splitlines()[0] == "8 3 8"


def test_set_system_parse_errors(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("6 3 2\n0 1 2\n0 1\n")
    with pytest.raises(ParseError, match=r":3: expected 3 distinct"):
        read_set_system(p)
    p.write_text("6 3 1\n0 1 9\n")
    with pytest.raises(ParseError, match=r":2: element outside"):
        read_set_system(p)
    p.write_text("6 3 3\n0 1 2\n")
    with pytest.raises(ParseError, match=r":1: header declares 3"):
        read_set_system(p)
