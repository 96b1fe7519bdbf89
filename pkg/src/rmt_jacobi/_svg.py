"""Minimal SVG plotter: axes, histogram bars, and polylines.

Only what the compare command needs; deliberately dependency-free.  Emission
never affects numerical outputs.
"""

from __future__ import annotations

import math

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")
_W, _H = 860, 520
_ML, _MR, _MT, _MB = 70, 20, 20, 50


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((s for s in (1.0, 2.0, 2.5, 5.0, 10.0)), key=lambda s: abs(s * mag - raw)) * mag
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(round(t, 12))
        t += step
    return out


def render_svg(series: list[dict], title: str = "") -> str:
    """series: dicts with keys x, y, label, kind ("line" or "bars")."""
    xs_all = [v for s in series for v in s["x"]]
    ys_all = [v for s in series for v in s["y"]]
    if not xs_all:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = 0.0, max(ys_all) * 1.06 + 1e-12

    def px(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def py(y):
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'viewBox="0 0 {_W} {_H}">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>',
             f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
             f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>']
    for t in _ticks(x_lo, x_hi):
        parts.append(f'<line x1="{px(t):.1f}" y1="{_H - _MB}" x2="{px(t):.1f}" '
                     f'y2="{_H - _MB + 5}" stroke="black"/>')
        parts.append(f'<text x="{px(t):.1f}" y="{_H - _MB + 18}" font-size="11" '
                     f'text-anchor="middle">{t:g}</text>')
    for t in _ticks(y_lo, y_hi):
        parts.append(f'<line x1="{_ML - 5}" y1="{py(t):.1f}" x2="{_ML}" '
                     f'y2="{py(t):.1f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py(t):.1f}" font-size="11" '
                     f'text-anchor="end" dominant-baseline="middle">{t:g}</text>')
    if title:
        parts.append(f'<text x="{_W / 2:.0f}" y="{_MT - 5}" font-size="13" '
                     f'text-anchor="middle">{title}</text>')

    for i, s in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        if s.get("kind") == "bars":
            xs, ys = s["x"], s["y"]
            width = (xs[1] - xs[0]) if len(xs) > 1 else (x_hi - x_lo) / 10
            for x, y in zip(xs, ys):
                x0, x1 = px(x - width / 2), px(x + width / 2)
                parts.append(f'<rect x="{x0:.2f}" y="{py(y):.2f}" '
                             f'width="{x1 - x0:.2f}" height="{py(0) - py(y):.2f}" '
                             f'fill="{color}" fill-opacity="0.35" stroke="none"/>')
        else:
            pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s["x"], s["y"]))
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                         f'stroke-width="1.6"/>')
        parts.append(f'<text x="{_W - _MR - 10}" y="{_MT + 18 + 16 * i}" '
                     f'font-size="12" text-anchor="end" fill="{color}">'
                     f'{s.get("label", f"series {i}")}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
