"""Minimal SVG line plots (presentation only)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#7f7f7f"]


class Plot:
    def __init__(self, width: int = 480, height: int = 360, *, equal_aspect: bool = False,
                 logx: bool = False, logy: bool = False, title: str = ""):
        self.width, self.height = width, height
        self.equal_aspect = equal_aspect
        self.logx, self.logy = logx, logy
        self.title = title
        self.series: list[tuple[str, np.ndarray, np.ndarray, dict]] = []

    def line(self, x, y, *, color=None, width=1.5, dash=None, label=None):
        color = color or PALETTE[len(self.series) % len(PALETTE)]
        self.series.append(("line", np.asarray(x, float), np.asarray(y, float),
                            dict(color=color, width=width, dash=dash, label=label)))

    def stars(self, x, y, *, color="black", size=6.0):
        self.series.append(("star", np.asarray(x, float), np.asarray(y, float), dict(color=color, size=size)))

    def _tx(self, v, log):
        return np.log10(v) if log else v

    def render(self) -> str:
        xs = np.concatenate([self._tx(s[1], self.logx) for s in self.series])
        ys = np.concatenate([self._tx(s[2], self.logy) for s in self.series])
        x0, x1 = float(xs.min()), float(xs.max())
        y0, y1 = float(ys.min()), float(ys.max())
        if x1 == x0:
            x1 = x0 + 1.0
        if y1 == y0:
            y1 = y0 + 1.0
        pad = 30.0
        sx = (self.width - 2 * pad) / (x1 - x0)
        sy = (self.height - 2 * pad) / (y1 - y0)
        if self.equal_aspect:
            sx = sy = min(sx, sy)

        def px(v):
            return pad + (v - x0) * sx

        def py(v):
            return self.height - pad - (v - y0) * sy

        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">',
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="white"/>',
        ]
        if self.title:
            out.append(f'<text x="{self.width / 2:.1f}" y="16" text-anchor="middle" font-size="12">'
                       f"{escape(self.title)}</text>")
        for kind, x, y, st in self.series:
            X, Y = px(self._tx(x, self.logx)), py(self._tx(y, self.logy))
            if kind == "line":
                pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(X, Y))
                dash = f' stroke-dasharray="{st["dash"]}"' if st["dash"] else ""
                out.append(f'<polyline fill="none" stroke="{st["color"]}" stroke-width="{st["width"]}"{dash} '
                           f'points="{pts}"/>')
            else:
                for a, b in zip(X, Y):
                    out.append(f'<polygon fill="{st["color"]}" points="{_star(a, b, st["size"])}"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.render())


def _star(cx: float, cy: float, r: float) -> str:
    pts = []
    for i in range(10):
        rr = r if i % 2 == 0 else r * 0.45
        a = -math.pi / 2 + i * math.pi / 5
        pts.append(f"{cx + rr * math.cos(a):.2f},{cy + rr * math.sin(a):.2f}")
    return " ".join(pts)
