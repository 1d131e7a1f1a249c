"""Result rows and their CSV/JSON serialization, plus map and tour dumps."""

from __future__ import annotations

import csv
import io
import json
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, NamedTuple

from ..planner import Reconstruction
from ..voxel import OccupancyMap, cube_center

HEADER = ("experiment", "scenario", "n", "M", "d0", "seed", "metric", "value")
METRICS = (
    "rpe",
    "predicted_rpe",
    "measurements",
    "bound",
    "bound_asymptotic",
    "flight_distance",
    "recon_error",
    "theorem2_Q",
    "theorem2_Q_stderr",
)
FORMATS = ("csv", "json")
SIG_DIGITS = 9


def round_sig(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}")


class ResultRow(NamedTuple):
    experiment: str
    scenario: str
    n: int | None
    M: int | None
    d0: int | None
    seed: int | None
    metric: str
    value: float

    @classmethod
    def make(cls, experiment, scenario, metric, value, *, n=None, d0=None, seed=None) -> ResultRow:
        if metric not in METRICS:
            raise ValueError(f"metric {metric!r} is not in the published vocabulary {METRICS}")
        M = n**3 if n is not None else None
        return cls(experiment, scenario, n, M, d0, seed, metric, round_sig(value))

    def sort_key(self):
        opt = lambda v: (-1 if v is None else v)  # noqa: E731
        return (
            self.experiment,
            self.scenario,
            opt(self.n),
            opt(self.d0),
            opt(self.seed),
            METRICS.index(self.metric),
        )


def sort_rows(rows: Iterable[ResultRow]) -> list[ResultRow]:
    return sorted(rows, key=ResultRow.sort_key)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    return str(v)


def format_rows(rows: Iterable[ResultRow], fmt: str = "csv") -> str:
    rows = list(rows)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(HEADER)
        for r in rows:
            w.writerow([_cell(v) for v in r])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([r._asdict() for r in rows], indent=1) + "\n"
    raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")


@contextmanager
def _open_out(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def emit(rows: Iterable[ResultRow], path=None, fmt: str = "csv") -> None:
    """Write rows to ``path`` (stdout for ``None`` or ``-``)."""
    text = format_rows(rows, fmt)
    with _open_out(path) as fh:
        fh.write(text)


def _opt_int(s: str):
    return int(s) if s != "" else None


def parse_rows(text: str, fmt: str = "csv") -> list[ResultRow]:
    """Inverse of ``format_rows``."""
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if tuple(header or ()) != HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        return [
            ResultRow(e, s, _opt_int(n), _opt_int(M), _opt_int(d0), _opt_int(seed), m, float(v))
            for e, s, n, M, d0, seed, m, v in reader
        ]
    if fmt == "json":
        return [ResultRow(**{**obj, "value": float(obj["value"])}) for obj in json.loads(text)]
    raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")


def read_rows(path, fmt: str | None = None) -> list[ResultRow]:
    p = Path(path)
    fmt = fmt or ("json" if p.suffix == ".json" else "csv")
    return parse_rows(p.read_text(), fmt)


def write_occupancy_map(m: OccupancyMap, path) -> None:
    """One row per cube: ``i,j,k,label,provenance`` in C order."""
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("i", "j", "k", "label", "provenance"))
        n = m.grid.n
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    w.writerow((i, j, k, int(m.labels[i, j, k]), int(m.provenance[i, j, k])))


def write_waypoints(rec: Reconstruction, origin, path) -> None:
    """One row per visit: ``round,order,i,j,k,x,y,z`` in flight order."""
    grid = rec.map.grid
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("round", "order", "i", "j", "k", "x", "y", "z"))
        for rnd in rec.rounds:
            order = rnd.tour.order if rnd.tour is not None else range(len(rnd.waypoints))
            for pos, wi in enumerate(order):
                idx = rnd.waypoints[wi]
                c = cube_center(grid, idx, origin)
                w.writerow((rnd.r, pos, *idx, *(_cell(float(v)) for v in c)))
