"""Minimal SVG writer for planar sets, level curves and critical points."""

from __future__ import annotations

from typing import Iterable, Sequence
from xml.sax.saxutils import quoteattr

import numpy as np

__all__ = ["Canvas"]


class Canvas:
    """Accumulates layers in world coordinates and renders them with y pointing up."""

    def __init__(self, window: Sequence[float], width: int = 800):
        x0, y0, x1, y1 = map(float, window)
        if not (x1 > x0 and y1 > y0):
            raise ValueError("degenerate window")
        self.window = (x0, y0, x1, y1)
        self.width = width
        self.height = max(1, int(round(width * (y1 - y0) / (x1 - x0))))
        self._scale = width / (x1 - x0)
        self._layers: list[tuple[str, list[str]]] = []

    def _xy(self, p) -> tuple[float, float]:
        x0, _, _, y1 = self.window
        return (p[0] - x0) * self._scale, (y1 - p[1]) * self._scale

    def _layer(self, name: str) -> list[str]:
        for n, items in self._layers:
            if n == name:
                return items
        items: list[str] = []
        self._layers.append((name, items))
        return items

    def points(self, P, layer: str = "sites", r: float = 1.5, color: str = "black") -> None:
        items = self._layer(layer)
        for p in np.asarray(P, dtype=float).reshape(-1, 2):
            x, y = self._xy(p)
            items.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r}" fill="{color}"/>')

    def segments(self, S, layer: str = "sites", color: str = "black", width: float = 1.0) -> None:
        items = self._layer(layer)
        for a, b in np.asarray(S, dtype=float).reshape(-1, 2, 2):
            (xa, ya), (xb, yb) = self._xy(a), self._xy(b)
            items.append(
                f'<line x1="{xa:.3f}" y1="{ya:.3f}" x2="{xb:.3f}" y2="{yb:.3f}" stroke="{color}" stroke-width="{width}"/>'
            )

    def polylines(self, lines: Iterable, layer: str = "curves", color: str = "steelblue") -> None:
        items = self._layer(layer)
        for L in lines:
            pts = " ".join("{:.3f},{:.3f}".format(*self._xy(p)) for p in np.asarray(L, dtype=float))
            items.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1"/>')

    def circles(self, centers, radii, layer: str = "guards", color: str = "gray") -> None:
        items = self._layer(layer)
        for c, r in zip(np.asarray(centers, dtype=float).reshape(-1, 2), np.atleast_1d(radii)):
            x, y = self._xy(c)
            items.append(
                f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r * self._scale:.3f}" fill="none" stroke="{color}"/>'
            )

    def render(self) -> str:
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">'
        ]
        for name, items in self._layers:
            out.append(f"<g id={quoteattr(name)}>")
            out.extend(items)
            out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"
