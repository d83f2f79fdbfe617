"""Dependency-free SVG line charts of actions and MAP estimates per stage."""
from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .io import OutputError

WIDTH, HEIGHT = 720, 420
LEFT, RIGHT, TOP, BOTTOM = 64, 150, 40, 52
COLORS = ("#1f77b4", "#d62728")

KINDS = {
    "actions": {
        "title": "Inventory levels per stage",
        "ylabel": "stock level",
        "series": (("y1", "player 1 stock y1", 0), ("y2", "player 2 stock y2", 1)),
    },
    "beliefs": {
        "title": "MAP estimates of the opponent's stock",
        "ylabel": "estimated opponent stock",
        "series": (("map1", "P1 estimate of y2", 1), ("map2", "P2 estimate of y1", 0)),
    },
}


def _columns(t):
    if isinstance(t, dict):
        return t
    return {k: t.column(k) for k in ("y1", "y2", "map1", "map2")}


def _ticks(lo, hi, n=5):
    step = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(step)) if step > 0 else 1.0
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= step), default=step)
    start = np.ceil(lo / step) * step
    return [float(v) for v in np.arange(start, hi + step * 1e-9, step)]


def render_svg(series_sets, kind: str, nash: tuple[float, float], title: str | None = None) -> str:
    """SVG document for one or more trajectories given as column dicts."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {sorted(KINDS)}, got {kind!r}")
    spec = KINDS[kind]
    cols = [_columns(s) for s in series_sets]
    if not cols or any(len(c["y1"]) == 0 for c in cols):
        raise ValueError("cannot plot an empty trajectory")
    n_max = max(len(c["y1"]) for c in cols)
    ymax = max(max(float(np.max(c[k])) for c in cols for k, _, _ in spec["series"]), *nash)
    ymax = ymax * 1.1 if ymax > 0 else 1.0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    x_hi = max(n_max, 2)

    def sx(stage):
        return LEFT + (stage - 1) / (x_hi - 1) * pw

    def sy(v):
        return TOP + ph - v / ymax * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{LEFT + pw / 2:.1f}" y="{TOP - 14}" text-anchor="middle" font-size="15">'
        f'{escape(title or spec["title"])}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for v in _ticks(0.0, ymax):
        y = sy(v)
        out.append(f'<line x1="{LEFT - 4}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="#333"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">{v:g}</text>')
    for v in _ticks(1.0, float(x_hi)):
        x = sx(v)
        out.append(f'<line x1="{x:.2f}" y1="{TOP + ph}" x2="{x:.2f}" y2="{TOP + ph + 4}" stroke="#333"/>')
        out.append(f'<text x="{x:.2f}" y="{TOP + ph + 18}" text-anchor="middle">{v:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">stage</text>')
    out.append(f'<text x="16" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {TOP + ph / 2:.1f})">{escape(spec["ylabel"])}</text>')

    opacity = 1.0 if len(cols) == 1 else max(0.15, 1.5 / len(cols))
    for key, _, ref in spec["series"]:
        color = COLORS[ref]
        for c in cols:
            vals = np.asarray(c[key], dtype=float)
            pts = " ".join(f"{sx(i + 1):.2f},{sy(v):.2f}" for i, v in enumerate(vals))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2" '
                       f'stroke-opacity="{opacity:.2f}"/>')
            if len(vals) == 1:
                out.append(f'<circle cx="{sx(1):.2f}" cy="{sy(vals[0]):.2f}" r="3" fill="{color}"/>')
    for ref, label in ((0, "y1*"), (1, "y2*")):
        y = sy(nash[ref])
        out.append(f'<line x1="{LEFT}" y1="{y:.2f}" x2="{LEFT + pw}" y2="{y:.2f}" stroke="{COLORS[ref]}" '
                   f'stroke-dasharray="6 4" stroke-width="1"/>')
        out.append(f'<text x="{LEFT + pw + 6}" y="{y + 4:.2f}" fill="{COLORS[ref]}">'
                   f'{label} = {nash[ref]:.2f}</text>')

    lx, ly = LEFT + pw + 14, TOP + ph - 46
    for i, (_, label, ref) in enumerate(spec["series"]):
        y = ly + 18 * i
        out.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 18}" y2="{y}" stroke="{COLORS[ref]}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 24}" y="{y + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_plot(t, kind: str, path, nash: tuple[float, float] | None = None, title: str | None = None) -> Path:
    """Write an SVG for a trajectory or a sequence of trajectories (a batch)."""
    batch = list(t) if isinstance(t, (list, tuple)) else [t]
    if nash is None:
        nash = batch[0].nash
    text = render_svg(batch, kind, nash, title)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OutputError(f"{path}: {e.strerror or e}") from e
    return path
