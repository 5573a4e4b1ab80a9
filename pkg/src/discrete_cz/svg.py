"""Static SVG of a closed curve in the complex plane, origin marked."""
from __future__ import annotations

from html import escape

import numpy as np

_W = 480
_H = 480
_M = 40


def curve_svg(values, title: str = "", winding: int | None = None) -> str:
    z = np.asarray(values, dtype=complex)
    xs = np.append(z.real, 0.0)
    ys = np.append(z.imag, 0.0)
    span = max(np.ptp(xs), np.ptp(ys), 1e-12)
    cx = 0.5 * (xs.max() + xs.min())
    cy = 0.5 * (ys.max() + ys.min())
    scale = (_W - 2 * _M) / (1.1 * span)

    def px(x, y):
        return _W / 2 + (x - cx) * scale, _H / 2 - (y - cy) * scale

    pts = " ".join("{:.2f},{:.2f}".format(*px(x, y)) for x, y in zip(z.real, z.imag))
    ox, oy = px(0.0, 0.0)
    label = escape(title)
    if winding is not None:
        label += f" (winding {winding})"
    sx, sy = px(z.real[0], z.imag[0])
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_M}" y="{_M / 2 + 6:.0f}" font-family="sans-serif" font-size="14">{label}</text>',
        f'<line x1="{ox - 8:.2f}" y1="{oy:.2f}" x2="{ox + 8:.2f}" y2="{oy:.2f}" stroke="red"/>',
        f'<line x1="{ox:.2f}" y1="{oy - 8:.2f}" x2="{ox:.2f}" y2="{oy + 8:.2f}" stroke="red"/>',
        f'<polyline points="{pts}" fill="none" stroke="navy" stroke-width="1.5"/>',
        f'<circle cx="{sx:.2f}" cy="{sy:.2f}" r="3" fill="green"/>',
        "</svg>",
        "",
    ])
