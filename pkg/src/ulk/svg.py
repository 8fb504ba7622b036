"""Minimal static line charts written as SVG text."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
MARGIN = dict(left=90, right=30, top=50, bottom=70)


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    color: str = "#1f77b4"
    dash: str | None = None
    width: float = 2.0


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round tick positions (1, 2, 5 times a power of ten) covering [lo, hi]."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("non-finite axis range")
    if hi <= lo:
        pad = abs(lo) * 0.05 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        if v >= lo - 1e-9 * step:
            ticks.append(round(v / step) * step)
        v += step
    return ticks


def _label(v: float) -> str:
    return f"{v:.6g}"


def line_chart(series: Sequence[Series], title: str, xlabel: str, ylabel: str) -> str:
    x_all = np.concatenate([s.x for s in series])
    y_all = np.concatenate([s.y for s in series])
    xlo, xhi = float(np.min(x_all)), float(np.max(x_all))
    ylo, yhi = float(np.min(y_all)), float(np.max(y_all))
    if yhi <= ylo:
        pad = abs(ylo) * 0.05 or 1.0
        ylo, yhi = ylo - pad, yhi + pad
    xt = nice_ticks(xlo, xhi)
    yt = nice_ticks(ylo, yhi)
    xlo, xhi = min(xlo, xt[0]), max(xhi, xt[-1])
    ylo, yhi = min(ylo, yt[0]), max(yhi, yt[-1])

    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return left + (np.asarray(x) - xlo) / (xhi - xlo) * pw

    def sy(y):
        return top + ph - (np.asarray(y) - ylo) / (yhi - ylo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" font-family="sans-serif" font-size="18">'
        f"{escape(title)}</text>",
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in xt:
        x = float(sx(v))
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 6}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 22}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="12">{_label(v)}</text>')
    for v in yt:
        y = float(sy(v))
        out.append(f'<line x1="{left - 6}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 10}" y="{y + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="12">{_label(v)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 20}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="14">{escape(xlabel)}</text>')
    out.append(f'<text x="22" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="14" '
               f'transform="rotate(-90 22 {top + ph / 2:.1f})">{escape(ylabel)}</text>')

    for s in series:
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(sx(s.x), sy(s.y)))
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        out.append(f'<polyline fill="none" stroke="{s.color}" stroke-width="{s.width}"{dash} points="{pts}"/>')

    for i, s in enumerate(series):
        y = top + 18 + 20 * i
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        out.append(f'<line x1="{left + pw - 200}" y1="{y}" x2="{left + pw - 170}" y2="{y}" stroke="{s.color}" '
                   f'stroke-width="{s.width}"{dash}/>')
        out.append(f'<text x="{left + pw - 162}" y="{y + 4}" font-family="sans-serif" font-size="12">'
                   f"{escape(s.label)}</text>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def overlay_charts(grid: np.ndarray, columns: dict[str, np.ndarray]) -> dict[str, str]:
    """h and u charts, each overlaying the two closed-form formulations."""
    charts = {}
    for var, alt, name in (("h", "h_alt", "human capital h(t)"), ("u", "u_alt", "labour share u(t)")):
        charts[f"{var}.svg"] = line_chart(
            [
                Series(f"{var}: z k / u formulation", grid, columns[var], color="#1f77b4", width=4.0),
                Series(f"{var}: identity-constant formulation", grid, columns[alt], color="#d62728", dash="8 6"),
            ],
            title=name,
            xlabel="t (years)",
            ylabel=var,
        )
    return charts
