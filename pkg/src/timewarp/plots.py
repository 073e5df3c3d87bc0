"""Plot-ready SVG output built by direct element emission (no plotting
dependency). Convenience artifacts only; numerical results live in the JSON
and CSV documents."""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

__all__ = ["warp_panels_svg"]

_WIDTH = 640
_PANEL = 170
_MARGIN = 52


def _scale(vals, lo, hi, out_lo, out_hi):
    vals = np.asarray(vals, dtype=float)
    if hi == lo:
        mid = 0.5 * (out_lo + out_hi)
        return np.full_like(vals, mid)
    return out_lo + (vals - lo) * (out_hi - out_lo) / (hi - lo)


def _panel(svg, top, xs, ys, title, step=False):
    left, right = _MARGIN, _WIDTH - 16
    bottom, height = top + _PANEL - 28, _PANEL - 40
    ymin, ymax = float(np.min(ys)), float(np.max(ys))
    if ymin == ymax:
        ymin -= 0.5
        ymax += 0.5
    pad = 0.05 * (ymax - ymin)
    ymin -= pad
    ymax += pad
    ET.SubElement(svg, "rect", x=str(left), y=str(bottom - height),
                  width=str(right - left), height=str(height),
                  fill="none", stroke="#888")
    if step:
        px, py = [], []
        for i in range(len(ys)):
            px.extend([xs[i], xs[i + 1]])
            py.extend([ys[i], ys[i]])
        xs, ys = np.asarray(px), np.asarray(py)
    sx = _scale(xs, 0.0, 1.0, left, right)
    sy = _scale(ys, ymin, ymax, bottom, bottom - height)
    points = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(sx, sy))
    ET.SubElement(svg, "polyline", points=points, fill="none",
                  stroke="#1f6fb2", **{"stroke-width": "1.5"})
    title_el = ET.SubElement(svg, "text", x=str(left), y=str(bottom - height - 8),
                             **{"font-size": "12", "font-family": "sans-serif"})
    title_el.text = title
    for val, ypix in ((ymin, bottom), (ymax, bottom - height)):
        lab = ET.SubElement(svg, "text", x=str(left - 6), y=str(ypix + 4),
                            **{"font-size": "10", "font-family": "sans-serif",
                               "text-anchor": "end"})
        lab.text = f"{val:.3g}"


def warp_panels_svg(warp) -> str:
    """Three stacked panels: the warp, its cumulative displacement, and its
    rate offset (per-interval slope minus one)."""
    height = 3 * _PANEL + 16
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                     width=str(_WIDTH), height=str(height),
                     viewBox=f"0 0 {_WIDTH} {height}")
    t = warp.t
    _panel(svg, 16, t, warp.tau, "warp(t)")
    _panel(svg, 16 + _PANEL, t, warp.tau - t, "warp(t) - t")
    _panel(svg, 16 + 2 * _PANEL, t, warp.slopes() - 1.0, "warp'(t) - 1", step=True)
    return ET.tostring(svg, encoding="unicode")
