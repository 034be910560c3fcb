"""Phase-diagram SVG for a boundary curve beta*(alpha)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .growth import format_spec

WIDTH, HEIGHT = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 90, 40, 40, 110


def _label(v):
    return format(float(v), ".4g")


def _ticks(lo, hi, n=6):
    return np.linspace(lo, hi, n)


def phase_diagram_svg(curve) -> str:
    """Render the boundary as a polyline with the admissible region above it shaded."""
    pts = [(s.alpha, s.beta_star) for s in curve.samples if s.ok and math.isfinite(s.beta_star)]
    alphas = [s.alpha for s in curve.samples]
    a_lo, a_hi = min(alphas), max(alphas)
    if pts:
        b_lo = min(b for _, b in pts)
        b_hi = max(b for _, b in pts)
    else:
        b_lo, b_hi = -1.0, 1.0
    pad = 0.1 * (b_hi - b_lo) if b_hi > b_lo else 1.0
    b_lo, b_hi = b_lo - pad, b_hi + pad

    x0, x1 = LEFT, WIDTH - RIGHT
    y0, y1 = HEIGHT - BOTTOM, TOP

    def sx(a):
        return x0 + (a - a_lo) / (a_hi - a_lo) * (x1 - x0)

    def sy(b):
        return y0 + (b - b_lo) / (b_hi - b_lo) * (y1 - y0)

    coords = [(sx(a), sy(b)) for a, b in pts]
    line = " ".join(f"{x:.2f},{y:.2f}" for x, y in coords)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'font-family="sans-serif" font-size="13">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if coords:
        region = [(coords[0][0], y1)] + coords + [(coords[-1][0], y1)]
        poly = " ".join(f"{x:.2f},{y:.2f}" for x, y in region)
        out.append(f'<polygon class="admissible" points="{poly}" fill="#3b6fb6" '
                   f'fill-opacity="0.2" stroke="none"/>')
    out.append(f'<g class="axes" stroke="black" stroke-width="1">'
               f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>'
               f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>')
    for a in _ticks(a_lo, a_hi):
        x = sx(a)
        out.append(f'<line x1="{x:.2f}" y1="{y0}" x2="{x:.2f}" y2="{y0 + 6}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{y0 + 22}" text-anchor="middle">{_label(a)}</text>')
    for b in _ticks(b_lo, b_hi):
        y = sy(b)
        out.append(f'<line x1="{x0 - 6}" y1="{y:.2f}" x2="{x0}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 10}" y="{y + 4:.2f}" text-anchor="end">{_label(b)}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.0f}" y="{y0 + 44}" text-anchor="middle">alpha</text>')
    out.append(f'<text x="24" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 24 {(y0 + y1) / 2:.0f})">beta*</text>')
    out.append(f'<polyline class="boundary" points="{line}" fill="none" stroke="#1f3f7a" '
               f'stroke-width="2"/>')
    legend = [f"phi = {format_spec(curve.phi)}", f"psi = {format_spec(curve.psi)}",
              f"t-domain = {curve.t_domain.value}"]
    out.append('<g class="legend">')
    for i, text in enumerate(legend):
        out.append(f'<text x="{x0}" y="{y0 + 70 + 16 * i}">{escape(text)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
