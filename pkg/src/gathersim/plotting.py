"""Minimal self-contained SVG line plots of run metrics."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 720, 400
MARGIN = dict(left=70, right=20, top=40, bottom=50)
COLORS = ("#1f77b4", "#2ca02c", "#d62728", "#9467bd")


def step_points(xs, ys):
    """Expand samples into a staircase (value held until the next sample)."""
    out_x, out_y = [], []
    for i, (x, y) in enumerate(zip(xs, ys)):
        if i:
            out_x.append(x)
            out_y.append(out_y[-1])
        out_x.append(x)
        out_y.append(y)
    return out_x, out_y


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * abs(step):
        out.append(v)
        v += step
    return out


def line_plot(series, title="", xlabel="t", ylabel="") -> str:
    """SVG text for one or more ``(label, xs, ys)`` polylines on shared axes."""
    pts = [(x, y) for _, xs, ys in series for x, y in zip(xs, ys)
           if y is not None and math.isfinite(y)]
    if not pts:
        pts = [(0.0, 0.0)]
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN["top"] + (y1 - y) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>']
    bx, by = MARGIN["left"], MARGIN["top"] + ph
    out.append(f'<line x1="{bx}" y1="{by}" x2="{bx + pw}" y2="{by}" stroke="black"/>')
    out.append(f'<line x1="{bx}" y1="{MARGIN["top"]}" x2="{bx}" y2="{by}" stroke="black"/>')
    for t in _ticks(x0, x1):
        out.append(f'<text x="{sx(t):.2f}" y="{by + 18}" text-anchor="middle" '
                   f'font-size="11">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{bx - 6}" y="{sy(t) + 4:.2f}" text-anchor="end" '
                   f'font-size="11">{t:g}</text>')
    out.append(f'<text x="{bx + pw / 2}" y="{HEIGHT - 10}" text-anchor="middle" '
               f'font-size="12">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2}" font-size="12" '
               f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2})" '
               f'text-anchor="middle">{escape(ylabel)}</text>')
    for k, (label, xs, ys) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys)
                          if y is not None and math.isfinite(y))
        out.append(f'<polyline class="series" data-label="{escape(label)}" fill="none" '
                   f'stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        out.append(f'<text x="{bx + pw - 4}" y="{MARGIN["top"] + 14 + 14 * k}" '
                   f'text-anchor="end" font-size="11" fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def metrics_plot(cols: dict, series: str) -> str:
    t = cols["t"]
    if series == "perimeter":
        return line_plot([("perimeter", t, cols["perimeter"])],
                         "Convex hull perimeter", ylabel="L")
    if series == "k":
        xs, ys = step_points(t, cols["k_hull"])
        return line_plot([("hull vertices", xs, ys)], "Agents on the convex hull", ylabel="K")
    if series == "rate":
        return line_plot([("dL/dt estimate", t, cols["dLdt_est"]),
                          ("bound -mu(K)", t, cols["bound_rate"])],
                         "Perimeter rate and bound", ylabel="dL/dt")
    raise ValueError(f"unknown series {series!r}")
