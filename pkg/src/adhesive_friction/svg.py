"""Tiny SVG writer for line plots and deformed-mesh snapshots.

Output is plain text with fixed number formatting, so identical inputs
give identical files.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    dashed: bool = False
    markers: bool = False


@dataclass
class Plot:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    series: list[Series] = field(default_factory=list)
    hlines: list[tuple[float, str]] = field(default_factory=list)
    width: int = 640
    height: int = 420

    def add(self, x, y, label="", dashed=False, markers=False):
        self.series.append(Series(np.asarray(x, float), np.asarray(y, float), label, dashed, markers))
        return self


def _f(v):
    return f"{v:.2f}"


def nice_ticks(lo, hi, n=5):
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks, t = [], start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt_tick(t):
    return f"{t:.6g}"


def _bounds(values, pad=0.05):
    v = np.concatenate([np.ravel(a) for a in values]) if values else np.zeros(1)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return 0.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    if hi - lo < 1e-12 * max(1.0, abs(hi)):
        lo, hi = lo - 0.5, hi + 0.5
    span = hi - lo
    return lo - pad * span, hi + pad * span


def render(plot: Plot) -> str:
    W, H = plot.width, plot.height
    left, right, top, bottom = 70, 20, 36, 50
    xs = [s.x for s in plot.series]
    ys = [s.y for s in plot.series] + [np.array([h for h, _ in plot.hlines])]
    x0, x1 = _bounds(xs, 0.0)
    y0, y1 = _bounds(ys)

    def px(x):
        return left + (x - x0) / (x1 - x0) * (W - left - right)

    def py(y):
        return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
           f'<rect width="{W}" height="{H}" fill="white"/>']
    out.append(f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{escape(plot.title)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{W - left - right}" height="{H - top - bottom}" '
               'fill="none" stroke="black"/>')
    for t in nice_ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{_f(X)}" y1="{H - bottom}" x2="{_f(X)}" y2="{H - bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{_f(X)}" y="{H - bottom + 18}" text-anchor="middle">{_fmt_tick(t)}</text>')
    for t in nice_ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{left - 5}" y1="{_f(Y)}" x2="{left}" y2="{_f(Y)}" stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{_f(Y)}" x2="{W - right}" y2="{_f(Y)}" stroke="#eeeeee"/>')
        out.append(f'<text x="{left - 8}" y="{_f(Y + 4)}" text-anchor="end">{_fmt_tick(t)}</text>')
    out.append(f'<text x="{(left + W - right) / 2}" y="{H - 12}" text-anchor="middle">{escape(plot.xlabel)}</text>')
    out.append(f'<text x="16" y="{(top + H - bottom) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {(top + H - bottom) / 2})">{escape(plot.ylabel)}</text>')
    for value, label in plot.hlines:
        Y = py(value)
        out.append(f'<line x1="{left}" y1="{_f(Y)}" x2="{W - right}" y2="{_f(Y)}" stroke="black" '
                   'stroke-dasharray="2,3"/>')
        out.append(f'<text x="{W - right - 4}" y="{_f(Y - 4)}" text-anchor="end">{escape(label)}</text>')
    for i, s in enumerate(plot.series):
        color = PALETTE[i % len(PALETTE)]
        ok = np.isfinite(s.x) & np.isfinite(s.y)
        pts = " ".join(f"{_f(px(a))},{_f(py(b))}" for a, b in zip(s.x[ok], s.y[ok]))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        if pts:
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
        if s.markers:
            out += [f'<circle cx="{_f(px(a))}" cy="{_f(py(b))}" r="2.5" fill="{color}"/>'
                    for a, b in zip(s.x[ok], s.y[ok])]
        if s.label:
            ly = top + 16 + 16 * i
            out.append(f'<line x1="{left + 10}" y1="{ly - 4}" x2="{left + 30}" y2="{ly - 4}" '
                       f'stroke="{color}" stroke-width="2"{dash}/>')
            out.append(f'<text x="{left + 36}" y="{ly}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_mesh(coords, elements, plate_height=None, title="", stretch=1.0,
                window=None, width=900) -> str:
    """Element outlines of a deformed mesh, with the vertical axis stretched.

    ``window = (xmin, xmax, ymin, ymax)`` crops to a region of interest.
    """
    coords = np.asarray(coords, float)
    quads = coords[np.asarray(elements)]
    if window is None:
        xmin, ymin = coords.min(axis=0)
        xmax, ymax = coords.max(axis=0)
    else:
        xmin, xmax, ymin, ymax = window
        cx, cy = quads[..., 0].mean(axis=1), quads[..., 1].mean(axis=1)
        quads = quads[(cx >= xmin) & (cx <= xmax) & (cy >= ymin) & (cy <= ymax)]
    if plate_height is not None:
        ymin = min(ymin, plate_height)
    margin = 20
    sx = (width - 2 * margin) / max(xmax - xmin, 1e-12)
    sy = sx * stretch
    height = int(math.ceil((ymax - ymin) * sy + 2 * margin + 24))

    def P(x, y):
        # y grows downward in SVG, so flip to keep the plate at the bottom
        return f"{_f(margin + (x - xmin) * sx)},{_f(24 + margin + (ymax - y) * sy)}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2}" y="16" text-anchor="middle">{escape(title)}</text>']
    d = " ".join("M" + " L".join(P(x, y) for x, y in q) + " Z" for q in quads)
    out.append(f'<path d="{d}" fill="#dde8f4" stroke="#34495e" stroke-width="0.4"/>')
    if plate_height is not None:
        y = P(xmin, plate_height).split(",")[1]
        out.append(f'<line x1="{margin}" y1="{y}" x2="{width - margin}" y2="{y}" stroke="black" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
