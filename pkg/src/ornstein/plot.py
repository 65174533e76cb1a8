"""Minimal self-contained SVG line charts from CSV tables."""

from __future__ import annotations

import csv
import io
import math
from typing import Optional
from xml.sax.saxutils import escape

from .growth import fit_line

WIDTH, HEIGHT = 640, 420
MARGIN = (60, 20, 30, 50)  # left, right, top, bottom


class TableError(ValueError):
    pass


def read_table(text: str, x: Optional[str] = None, y: Optional[str] = None):
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise TableError("empty table")
    header, body = rows[0], rows[1:]
    if len(header) < 2:
        raise TableError("need at least two columns")
    xcol = header.index(x) if x else 0
    if y:
        ycol = header.index(y)
    else:
        ycol = header.index("norm") if "norm" in header else 1
    if len(body) < 2:
        raise TableError("need at least two rows")
    xs, ys = [], []
    for i, r in enumerate(body, start=2):
        try:
            xs.append(float(r[xcol]))
            ys.append(float(r[ycol]))
        except (IndexError, ValueError) as exc:
            raise TableError(f"row {i}: {exc}") from None
    if not all(math.isfinite(v) for v in xs + ys):
        raise TableError("non-finite value in table")
    return header[xcol], header[ycol], xs, ys


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * step:
        out.append(round(v, 12))
        v += step
    return out


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def emit_plot(table: str, x: Optional[str] = None, y: Optional[str] = None, title: str = "", fit: bool = True) -> str:
    """SVG chart of column y against column x, with the least-squares line."""
    xname, yname, xs, ys = read_table(table, x, y)
    left, right, top, bottom = MARGIN
    pw, ph = WIDTH - left - right, HEIGHT - top - bottom
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(0.0, min(ys)), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y1 = y0 + 1
    y1 += 0.05 * (y1 - y0)

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>')
    # axes
    out.append(f'<line class="axis" x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>')
    for t in _ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{top + ph + 16}" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        Y = sy(t)
        out.append(f'<line x1="{left - 4}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{Y + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xname)}</text>')
    out.append(
        f'<text x="14" y="{top + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {top + ph / 2})">{escape(yname)}</text>'
    )
    if fit and len(set(xs)) >= 2:
        slope, intercept, r2 = fit_line(xs, ys)
        out.append(
            f'<line class="fit" x1="{sx(x0):.2f}" y1="{sy(slope * x0 + intercept):.2f}" '
            f'x2="{sx(x1):.2f}" y2="{sy(slope * x1 + intercept):.2f}" stroke="#c33" stroke-dasharray="5,3"/>'
        )
        out.append(
            f'<text x="{left + pw - 4}" y="{top + 12}" text-anchor="end" fill="#c33">'
            f"slope {_fmt(slope)}, R² {r2:.3f}</text>"
        )
    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys))
    out.append(f'<polyline points="{pts}" fill="none" stroke="#246"/>')
    for a, b in zip(xs, ys):
        out.append(f'<circle class="point" cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3" fill="#246"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
