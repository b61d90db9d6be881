"""Log-log line charts written as plain SVG."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]
# triangle markers: down, up, left, right
MARKERS = [
    ((0, 5), (-5, -4), (5, -4)),
    ((0, -5), (-5, 4), (5, 4)),
    ((-5, 0), (4, -5), (4, 5)),
    ((5, 0), (-4, -5), (-4, 5)),
]


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _decades(lo: float, hi: float):
    return range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1)


def write_loglog_svg(
    path,
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str,
    x_label: str,
    y_label: str,
    reference_slope: float | None = 1.0,
) -> Path:
    """Write a log-log chart; ``series`` holds ``(label, xs, ys)`` with positive values.

    With ``reference_slope`` set, a dashed line of that slope is drawn through
    the last point of the first series.
    """
    width, height = 720, 520
    left, right, top, bottom = 90, 200, 50, 70
    pw, ph = width - left - right, height - top - bottom

    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys if y > 0]
    if not xs_all or not ys_all:
        raise ValueError("nothing to plot")
    lx0, lx1 = math.log10(min(xs_all)), math.log10(max(xs_all))
    ly0, ly1 = math.log10(min(ys_all)), math.log10(max(ys_all))
    if lx1 - lx0 < 1e-12:
        lx0, lx1 = lx0 - 0.5, lx1 + 0.5
    if ly1 - ly0 < 1e-12:
        ly0, ly1 = ly0 - 0.5, ly1 + 0.5
    padx, pady = 0.05 * (lx1 - lx0), 0.08 * (ly1 - ly0)
    lx0, lx1, ly0, ly1 = lx0 - padx, lx1 + padx, ly0 - pady, ly1 + pady

    def px(x):
        return left + (math.log10(x) - lx0) / (lx1 - lx0) * pw

    def py(y):
        return top + (ly1 - math.log10(y)) / (ly1 - ly0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="28" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{_escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for axis, (lo, hi) in (("x", (lx0, lx1)), ("y", (ly0, ly1))):
        for d in _decades(10**lo, 10**hi):
            for m in range(1, 10):
                v = m * 10.0**d
                if not lo <= math.log10(v) <= hi:
                    continue
                size = 6 if m == 1 else 3
                if axis == "x":
                    p = px(v)
                    out.append(f'<line x1="{p:.1f}" y1="{top + ph}" x2="{p:.1f}" '
                               f'y2="{top + ph - size}" stroke="black"/>')
                    if m == 1:
                        out.append(f'<text x="{p:.1f}" y="{top + ph + 18}" text-anchor="middle" '
                                   f'font-family="sans-serif" font-size="12">1e{d}</text>')
                else:
                    p = py(v)
                    out.append(f'<line x1="{left}" y1="{p:.1f}" x2="{left + size}" y2="{p:.1f}" '
                               f'stroke="black"/>')
                    if m == 1:
                        out.append(f'<text x="{left - 8}" y="{p + 4:.1f}" text-anchor="end" '
                                   f'font-family="sans-serif" font-size="12">1e{d}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 20}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="14">{_escape(x_label)}</text>')
    out.append(f'<text x="20" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="14" transform="rotate(-90 20 {top + ph / 2:.1f})">{_escape(y_label)}</text>')

    out.append(f'<clipPath id="plot"><rect x="{left}" y="{top}" width="{pw}" height="{ph}"/></clipPath>')
    if reference_slope is not None:
        _, xs, ys = series[0]
        x_ref, y_ref = xs[-1], ys[-1]
        xa, xb = 10**lx0, 10**lx1
        ya = y_ref * (xa / x_ref) ** reference_slope
        yb = y_ref * (xb / x_ref) ** reference_slope
        out.append(f'<line x1="{px(xa):.1f}" y1="{py(ya):.1f}" x2="{px(xb):.1f}" y2="{py(yb):.1f}" '
                   'stroke="gray" stroke-dasharray="6,4" clip-path="url(#plot)"/>')

    for i, (label, xs, ys) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        pts = [(px(x), py(y)) for x, y in zip(xs, ys) if y > 0]
        if not pts:
            continue
        path_d = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
        out.append(f'<polyline points="{path_d}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        marker = MARKERS[i % len(MARKERS)]
        for x, y in pts:
            tri = " ".join(f"{x + dx:.1f},{y + dy:.1f}" for dx, dy in marker)
            out.append(f'<polygon points="{tri}" fill="{color}"/>')
        ly = top + 20 + 22 * i
        out.append(f'<line x1="{left + pw + 15}" y1="{ly}" x2="{left + pw + 40}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{left + pw + 46}" y="{ly + 4}" font-family="sans-serif" '
                   f'font-size="12">{_escape(label)}</text>')
    if reference_slope is not None:
        ly = top + 20 + 22 * len(series)
        out.append(f'<line x1="{left + pw + 15}" y1="{ly}" x2="{left + pw + 40}" y2="{ly}" '
                   'stroke="gray" stroke-dasharray="6,4"/>')
        out.append(f'<text x="{left + pw + 46}" y="{ly + 4}" font-family="sans-serif" '
                   f'font-size="12">rate h^{reference_slope:g}</text>')
    out.append("</svg>")

    path = Path(path)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path
