"""Text formats: dataset CSV, labeling files and set systems.

Floats are written with ``repr`` so that reading back reproduces the
exact same bits.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .errors import ParseError
from .geometry import Dataset, Labeling


def _parse_float(tok, path, line):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(path, line, f"not a number: {tok!r}") from None
    if not math.isfinite(v):
        raise ParseError(path, line, f"non-finite value: {tok!r}")
    return v


def read_dataset(path) -> Dataset:
    """Read a CSV of points, one per row. A non-numeric first row is a header."""
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not t.strip() for t in rec):
                continue
            if lineno == 1 and not rows:
                try:
                    [float(t) for t in rec]
                except ValueError:
                    continue
            vals = [_parse_float(t.strip(), path, lineno) for t in rec]
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ParseError(path, lineno, f"expected {width} columns, got {len(vals)}")
            rows.append(vals)
    if not rows:
        raise ParseError(path, 1, "no data rows")
    return Dataset(np.array(rows, dtype=np.float64))


def write_dataset(path, ds, header=False) -> None:
    pts = ds.points if isinstance(ds, Dataset) else np.asarray(ds, dtype=np.float64)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow([f"x{j}" for j in range(pts.shape[1])])
        for row in pts:
            w.writerow([repr(float(v)) for v in row])


def read_labels(path, k=None, n=None) -> Labeling:
    """Read one integer label per line; blank lines are ignored."""
    vals = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            tok = line.strip()
            if not tok:
                continue
            try:
                v = int(tok)
            except ValueError:
                raise ParseError(path, lineno, f"not an integer label: {tok!r}") from None
            if v < 0 or (k is not None and v >= k):
                raise ParseError(path, lineno, f"label {v} out of range")
            vals.append(v)
    if n is not None and len(vals) != n:
        raise ParseError(path, len(vals) + 1, f"expected {n} labels, got {len(vals)}")
    if not vals:
        raise ParseError(path, 1, "no labels")
    return Labeling.from_array(np.array(vals, dtype=np.int64), k)


def write_labels(path, lab) -> None:
    labels = lab.labels if isinstance(lab, Labeling) else np.asarray(lab)
    Path(path).write_text("".join(f"{int(v)}\n" for v in labels))


def write_set_system(path, sys) -> None:
    lines = [f"{sys.n_universe} {sys.z} {len(sys.sets)}"]
    lines += [" ".join(str(e) for e in s) for s in sys.sets]
    Path(path).write_text("\n".join(lines) + "\n")


def read_set_system(path):
    """Parse ``n_U z m`` followed by m lines of z elements each."""
    from .instances import SetSystemInstance

    with open(path) as fh:
        lines = [(i, ln.split()) for i, ln in enumerate(fh, start=1) if ln.strip()]
    if not lines:
        raise ParseError(path, 1, "empty set-system file")
    lineno, head = lines[0]
    try:
        n_u, z, m = (int(t) for t in head)
    except ValueError:
        raise ParseError(path, lineno, "header must be 'n_U z m'") from None
    if len(lines) - 1 != m:
        raise ParseError(path, lineno, f"header declares {m} sets, found {len(lines) - 1}")
    sets = []
    for lineno, toks in lines[1:]:
        try:
            s = tuple(sorted(int(t) for t in toks))
        except ValueError:
            raise ParseError(path, lineno, "set elements must be integers") from None
        if len(s) != z or len(set(s)) != z:
            raise ParseError(path, lineno, f"expected {z} distinct elements")
        if s[0] < 0 or s[-1] >= n_u:
            raise ParseError(path, lineno, f"element outside [0, {n_u})")
        sets.append(s)
    return SetSystemInstance(n_u, z, sets)
