"""CSV output for trajectories, belief snapshots and batch summaries."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

TRAJECTORY_HEADER = ("stage", "y1", "y2", "map1", "map2", "s1", "s2", "dist_to_nash")
BELIEF_HEADER = ("stage", "cell", "weight")


class OutputError(OSError):
    pass


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if v is None:
        return ""
    # 17 significant digits round-trips every double exactly.
    return format(float(v), ".17g")


def _write_rows(path, header, rows):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as e:
        raise OutputError(f"{path}: {e.strerror or e}") from e
    return path


def emit_csv(t, path) -> Path:
    rows = ([r.n] + [_fmt(getattr(r, k)) for k in TRAJECTORY_HEADER[1:]] for r in t.records)
    return _write_rows(path, TRAJECTORY_HEADER, rows)


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    path = Path(path)
    try:
        with path.open(encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise OutputError(f"{path}: {e.strerror or e}") from e
    if not rows or tuple(rows[0]) != TRAJECTORY_HEADER:
        raise OutputError(f"{path}: not a trajectory file (bad header)")
    data = np.array([[float(x) for x in row] for row in rows[1:]], dtype=float).reshape(-1, len(TRAJECTORY_HEADER))
    cols = {k: data[:, i] for i, k in enumerate(TRAJECTORY_HEADER)}
    cols["stage"] = cols["stage"].astype(int)
    return cols


def emit_belief_csv(t, player: int, path) -> Path:
    """Start-of-stage belief of ``player`` at every snapshot stage."""
    def rows():
        for n in sorted(t.snapshots):
            for k, w in enumerate(t.snapshots[n][player - 1], start=1):
                yield n, k, _fmt(w)
    return _write_rows(path, BELIEF_HEADER, rows())


def write_table(path, header, rows) -> Path:
    return _write_rows(path, header, ([_fmt(v) if not isinstance(v, str) else v for v in row] for row in rows))


def read_table(path) -> list[dict[str, str]]:
    path = Path(path)
    try:
        with path.open(encoding="utf-8", newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as e:
        raise OutputError(f"{path}: {e.strerror or e}") from e
