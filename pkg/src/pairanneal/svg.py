"""Minimal hand-written SVG: heatmaps for sweeps, line plots for spectra."""

from __future__ import annotations

from html import escape

import numpy as np

WIDTH, HEIGHT = 640, 480
MARGIN = dict(left=70, right=110, top=40, bottom=55)
LINE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
               "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _fmt(x: float) -> str:
    return f"{x:.4g}"


def _color(u: float, diverging: bool) -> str:
    """Map u in [0, 1] to a blue-white-red (diverging) or white-blue ramp."""
    u = min(max(u, 0.0), 1.0)
    if diverging:
        if u < 0.5:
            s = u / 0.5
            rgb = (int(40 + 215 * s), int(90 + 165 * s), 255)
        else:
            s = (u - 0.5) / 0.5
            rgb = (255, int(255 - 185 * s), int(255 - 215 * s))
    else:
        rgb = (int(255 - 225 * u), int(255 - 180 * u), int(255 - 80 * u))
    return "#%02x%02x%02x" % rgb


def _frame(title: str, xlabel: str, ylabel: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{(MARGIN["left"] + WIDTH - MARGIN["right"]) / 2}" y="{HEIGHT - 12}" '
        f'text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{HEIGHT / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {HEIGHT / 2})">{escape(ylabel)}</text>',
    ]


def heatmap(x: np.ndarray, y: np.ndarray, z: np.ndarray, *, title: str = "", xlabel: str = "",
            ylabel: str = "", diverging: bool = False) -> str:
    """Cells ``z[i, j]`` at ``(x[i], y[j])``; NaN cells are drawn grey."""
    x, y, z = np.asarray(x, float), np.asarray(y, float), np.asarray(z, float)
    x0, y0 = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    cw, ch = pw / len(x), ph / len(y)
    finite = z[np.isfinite(z)]
    if finite.size == 0:
        lo, hi = 0.0, 1.0
    elif diverging:
        m = float(np.max(np.abs(finite))) or 1.0
        lo, hi = -m, m
    else:
        lo, hi = float(finite.min()), float(finite.max())
        if hi == lo:
            hi = lo + 1.0
    out = _frame(title, xlabel, ylabel)
    for i in range(len(x)):
        for j in range(len(y)):
            v = z[i, j]
            fill = "#bbbbbb" if not np.isfinite(v) else _color((v - lo) / (hi - lo), diverging)
            out.append(f'<rect x="{x0 + i * cw:.2f}" y="{y0 + (len(y) - 1 - j) * ch:.2f}" '
                       f'width="{cw:.2f}" height="{ch:.2f}" fill="{fill}"/>')
    out.append(f'<rect x="{x0}" y="{y0}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for i in _ticks(len(x)):
        out.append(f'<text x="{x0 + (i + 0.5) * cw:.2f}" y="{y0 + ph + 16}" '
                   f'text-anchor="middle">{_fmt(x[i])}</text>')
    for j in _ticks(len(y)):
        out.append(f'<text x="{x0 - 6}" y="{y0 + (len(y) - 0.5 - j) * ch + 4:.2f}" '
                   f'text-anchor="end">{_fmt(y[j])}</text>')
    lx = WIDTH - MARGIN["right"] + 20
    steps = 50
    for k in range(steps):
        u = 1 - (k + 0.5) / steps
        out.append(f'<rect x="{lx}" y="{y0 + k * ph / steps:.2f}" width="18" '
                   f'height="{ph / steps + 0.5:.2f}" fill="{_color(u, diverging)}"/>')
    out.append(f'<text x="{lx + 22}" y="{y0 + 10}">{_fmt(hi)}</text>')
    out.append(f'<text x="{lx + 22}" y="{y0 + ph}">{_fmt(lo)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _ticks(n: int, most: int = 8) -> range:
    return range(0, n, max(1, -(-n // most)))


def line_plot(x: np.ndarray, series: dict[str, np.ndarray], *, title: str = "",
              xlabel: str = "", ylabel: str = "", dashed: tuple[str, ...] = ()) -> str:
    """One polyline per named series, each a 2-d array of columns or a 1-d array."""
    x = np.asarray(x, float)
    x0, y0 = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    arrays = {k: np.asarray(v, float).reshape(len(x), -1) for k, v in series.items()}
    ymin = min(float(a.min()) for a in arrays.values())
    ymax = max(float(a.max()) for a in arrays.values())
    if ymax == ymin:
        ymax = ymin + 1.0
    xmin, xmax = float(x.min()), float(x.max())
    if xmax == xmin:
        xmax = xmin + 1.0

    def px(v):
        return x0 + (v - xmin) / (xmax - xmin) * pw

    def py(v):
        return y0 + ph - (v - ymin) / (ymax - ymin) * ph

    out = _frame(title, xlabel, ylabel)
    out.append(f'<rect x="{x0}" y="{y0}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for v in np.linspace(xmin, xmax, 5):
        out.append(f'<text x="{px(v):.2f}" y="{y0 + ph + 16}" text-anchor="middle">{_fmt(v)}</text>')
    for v in np.linspace(ymin, ymax, 5):
        out.append(f'<text x="{x0 - 6}" y="{py(v) + 4:.2f}" text-anchor="end">{_fmt(v)}</text>')
    for k, (name, arr) in enumerate(arrays.items()):
        color = LINE_COLORS[k % len(LINE_COLORS)]
        dash = ' stroke-dasharray="6 4"' if name in dashed else ""
        for col in arr.T:
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, col))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                       f'stroke-width="1.5"{dash}/>')
        ly = y0 + 14 + 18 * k
        out.append(f'<line x1="{WIDTH - MARGIN["right"] + 10}" y1="{ly - 4}" '
                   f'x2="{WIDTH - MARGIN["right"] + 30}" y2="{ly - 4}" stroke="{color}"{dash}/>')
        out.append(f'<text x="{WIDTH - MARGIN["right"] + 34}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
