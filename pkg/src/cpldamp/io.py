"""CSV and SVG output for simulated trajectories."""

from __future__ import annotations

import csv
import io
import math
from xml.sax.saxutils import escape

import numpy as np

from .sim import COLUMNS, TimeSeries


def write_csv(ts: TimeSeries, fh) -> None:
    """Write ``ts`` with a header row; floats use shortest round-trip repr."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in ts.data:
        w.writerow([repr(float(v)) for v in row])


def read_csv(fh) -> TimeSeries:
    r = csv.reader(fh)
    header = tuple(next(r))
    if header != COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    rows = [[float(v) for v in row] for row in r if row]
    return TimeSeries(np.array(rows, dtype=float).reshape(-1, len(COLUMNS)))


def to_csv_string(ts: TimeSeries) -> str:
    buf = io.StringIO()
    write_csv(ts, buf)
    return buf.getvalue()


# -- SVG ----------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
_W, _PANEL_H, _ML, _MR, _MT, _MB = 720, 260, 70, 20, 30, 40


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    return [start + k * step for k in range(int((hi - start) / step) + 1)]


def _panel(out: list[str], top: float, series, ylabel: str, xlim) -> None:
    x0, x1 = xlim
    pts_all = [np.asarray(y)[np.asarray(t) > 0] for _, t, y in series]
    finite = np.concatenate([p[np.isfinite(p)] for p in pts_all]) if pts_all else np.array([])
    ylo, yhi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if yhi - ylo < 1e-12:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad
    pw, ph = _W - _ML - _MR, _PANEL_H - _MT - _MB

    def sx(t):
        return _ML + (math.log10(t) - x0) / (x1 - x0) * pw

    def sy(v):
        return top + _MT + (yhi - v) / (yhi - ylo) * ph

    out.append(f'<rect x="{_ML}" y="{top + _MT}" width="{pw}" height="{ph}" '
               'fill="none" stroke="#444"/>')
    for d in range(math.ceil(x0), math.floor(x1) + 1):
        x = sx(10.0**d)
        out.append(f'<line x1="{x:.2f}" y1="{top + _MT}" x2="{x:.2f}" y2="{top + _MT + ph}" '
                   'stroke="#ddd"/>')
        out.append(f'<text x="{x:.2f}" y="{top + _MT + ph + 16}" font-size="11" '
                   f'text-anchor="middle">1e{d}</text>')
    for v in _ticks(ylo, yhi):
        y = sy(v)
        out.append(f'<text x="{_ML - 6}" y="{y + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{v:.4g}</text>')
    out.append(f'<text x="16" y="{top + _MT + ph / 2:.1f}" font-size="12" '
               f'transform="rotate(-90 16 {top + _MT + ph / 2:.1f})" '
               f'text-anchor="middle">{escape(ylabel)}</text>')
    for k, (label, t, y) in enumerate(series):
        t, y = np.asarray(t), np.asarray(y)
        keep = (t > 0) & np.isfinite(y)
        coords = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t[keep], y[keep]))
        color = _PALETTE[k % len(_PALETTE)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" '
                   f'points="{coords}"><title>{escape(label)}</title></polyline>')
        out.append(f'<text x="{_ML + 8}" y="{top + _MT + 14 + 14 * k}" font-size="11" '
                   f'fill="{color}">{escape(label)}</text>')


def svg_plot(panels, title: str = "") -> str:
    """Stacked line plots against log10 time.

    ``panels`` is a list of ``(ylabel, [(label, t, y), ...])``. Samples at
    ``t <= 0`` cannot be placed on a log axis and are skipped.
    """
    ts = [np.asarray(t) for _, ser in panels for _, t, _ in ser]
    pos = np.concatenate([t[t > 0] for t in ts]) if ts else np.array([])
    if pos.size == 0:
        pos = np.array([1e-6, 1.0])
    xlim = (math.floor(math.log10(pos.min())), math.ceil(math.log10(pos.max())))
    if xlim[0] == xlim[1]:
        xlim = (xlim[0], xlim[0] + 1)
    height = _PANEL_H * len(panels) + 20
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" height="{height}" '
        f'viewBox="0 0 {_W} {height}">',
        f'<text x="{_W / 2}" y="18" font-size="14" text-anchor="middle">{escape(title)}</text>',
    ]
    for i, (ylabel, series) in enumerate(panels):
        _panel(out, 10 + i * _PANEL_H, series, ylabel, xlim)
    out.append(f'<text x="{_ML + (_W - _ML - _MR) / 2}" y="{height - 4}" font-size="12" '
               'text-anchor="middle">time [s] (log scale)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def trajectory_svg(named: dict[str, TimeSeries], title: str = "") -> str:
    """Bus voltage and applied duty cycle for one or more runs."""
    return svg_plot([
        ("x2 [V]", [(name, ts["t"], ts["x2"]) for name, ts in named.items()]),
        ("u", [(name, ts["t"], ts["u_applied"]) for name, ts in named.items()]),
    ], title)
