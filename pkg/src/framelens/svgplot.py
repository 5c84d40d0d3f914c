"""Minimal deterministic SVG rendering for report series.

Static vector output only: a polyline chart for time series and a bar chart
for category prevalence. Kept dependency-free on purpose; the CSV reports
remain the primary plot-data interface.
"""

from __future__ import annotations

from typing import Sequence

_WIDTH = 720
_HEIGHT = 360
_MARGIN = 50


def _scale(values: Sequence[float], lo: float, hi: float, out_lo: float, out_hi: float) -> list[float]:
    span = hi - lo
    if span == 0:
        return [(out_lo + out_hi) / 2 for _ in values]
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def _document(body: list[str], title: str) -> str:
    head = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<title>{title}</title>',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{title}</text>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def line_chart(labels: Sequence[str], series: dict[str, Sequence[float]], title: str) -> str:
    """Polyline chart; one line per named series over shared x labels."""
    all_values = [v for values in series.values() for v in values]
    lo, hi = (min(all_values), max(all_values)) if all_values else (0.0, 1.0)
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    body = [
        f'<line x1="{_MARGIN}" y1="{_HEIGHT - _MARGIN}" x2="{_WIDTH - _MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
        f'<text x="12" y="{_MARGIN}" font-family="sans-serif" font-size="11">{hi:.2f}</text>',
        f'<text x="12" y="{_HEIGHT - _MARGIN}" font-family="sans-serif" font-size="11">{lo:.2f}</text>',
    ]
    n = max(len(values) for values in series.values()) if series else 0
    xs = _scale(list(range(n)), 0, max(n - 1, 1), _MARGIN, _WIDTH - _MARGIN)
    for rank, (name, values) in enumerate(series.items()):
        ys = _scale(values, lo, hi, _HEIGHT - _MARGIN, _MARGIN)
        points = " ".join(f"{x:.1f},{y:.1f}" for x, y in zip(xs, ys))
        color = colors[rank % len(colors)]
        body.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        body.append(
            f'<text x="{_WIDTH - _MARGIN + 4}" y="{_MARGIN + 14 * rank}" font-family="sans-serif" '
            f'font-size="11" fill="{color}">{name}</text>'
        )
    if labels:
        step = max(1, len(labels) // 8)
        for i in range(0, len(labels), step):
            body.append(
                f'<text x="{xs[i]:.1f}" y="{_HEIGHT - _MARGIN + 16}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="10">{labels[i]}</text>'
            )
    return _document(body, title)


def bar_chart(labels: Sequence[str], values: Sequence[float], title: str) -> str:
    hi = max(values) if values else 1.0
    body = [
        f'<line x1="{_MARGIN}" y1="{_HEIGHT - _MARGIN}" x2="{_WIDTH - _MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>'
    ]
    n = len(values)
    if n:
        slot = (_WIDTH - 2 * _MARGIN) / n
        for i, (label, value) in enumerate(zip(labels, values)):
            height = 0.0 if hi == 0 else (value / hi) * (_HEIGHT - 2 * _MARGIN)
            x = _MARGIN + i * slot + slot * 0.15
            y = _HEIGHT - _MARGIN - height
            body.append(
                f'<rect x="{x:.1f}" y="{y:.1f}" width="{slot * 0.7:.1f}" height="{height:.1f}" fill="#1f77b4"/>'
            )
            body.append(
                f'<text x="{x + slot * 0.35:.1f}" y="{y - 4:.1f}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="10">{value:g}</text>'
            )
            body.append(
                f'<text x="{x + slot * 0.35:.1f}" y="{_HEIGHT - _MARGIN + 14}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="9">{label[:18]}</text>'
            )
    return _document(body, title)
