"""Run reports emitted as JSON lines."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

REPORT_KEYS = ("algo", "seed", "n", "d", "k", "epsilon", "alpha", "cost", "ratio", "wall_ms", "flags")


@dataclass
class RunReport:
    algo: str
    seed: int | None
    n: int
    d: int
    k: int
    epsilon: float | None = None
    alpha: float | None = None
    cost: float = math.nan
    ratio: float | None = None
    wall_ms: float = 0.0
    flags: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    kind: str | None = None

    def to_json(self) -> str:
        row = asdict(self)
        for key in ("cost", "ratio"):
            v = row[key]
            if isinstance(v, float) and not math.isfinite(v):
                row[key] = None if math.isnan(v) else repr(v)
        return json.dumps(row, sort_keys=False)


def summary_table(reports) -> str:
    """Fixed-width text summary, one row per report."""
    head = f"{'algo':<16}{'kind':<10}{'seed':>6}{'n':>6}{'k':>4}{'cost':>16}{'ratio':>10}{'ms':>10}"
    lines = [head, "-" * len(head)]
    for r in reports:
        ratio = "" if r.ratio is None else f"{r.ratio:.4f}"
        seed = "" if r.seed is None else str(r.seed)
        lines.append(
            f"{r.algo:<16}{(r.kind or ''):<10}{seed:>6}{r.n:>6}{r.k:>4}{r.cost:>16.6g}{ratio:>10}{r.wall_ms:>10.1f}"
        )
    return "\n".join(lines)
