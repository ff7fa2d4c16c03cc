"""Wireframe SVG frames: mesh edges, the tool circle, and a goal marker.

World y points up; the output flips it into SVG's y-down convention. The view
box is the mesh bounding box padded by 10% per axis, in world units.
"""

from __future__ import annotations

import numpy as np

from .csvio import format_value
from .interaction import ToolState


def render_svg(positions, edges, destination, tool: ToolState | None = None, goal=None) -> None:
    """Write one frame. Raises on an empty mesh (nothing to draw)."""
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(positions) == 0 or len(edges) == 0:
        raise ValueError("empty mesh: nothing to render")
    minx, miny = positions.min(axis=0)
    maxx, maxy = positions.max(axis=0)
    padx = 0.1 * (maxx - minx)
    pady = 0.1 * (maxy - miny)
    span = max(maxx - minx + 2 * padx, maxy - miny + 2 * pady)
    stroke = 0.004 * span

    def fy(y):  # world-up to svg-down, staying inside the same box
        return (miny + maxy) - y

    f = format_value
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{f(minx - padx)} {f(miny - pady)} '
        f'{f(maxx - minx + 2 * padx)} {f(maxy - miny + 2 * pady)}">',
    ]
    for i, j in edges:
        x1, y1 = positions[i]
        x2, y2 = positions[j]
        out.append(
            f'<line x1="{f(x1)}" y1="{f(fy(y1))}" x2="{f(x2)}" y2="{f(fy(y2))}" '
            f'stroke="#356" stroke-width="{f(stroke)}"/>'
        )
    if tool is not None:
        out.append(
            f'<circle cx="{f(tool.center[0])}" cy="{f(fy(tool.center[1]))}" r="{f(tool.radius)}" '
            f'fill="none" stroke="#c33" stroke-width="{f(stroke)}"/>'
        )
    if goal is not None:
        gx, gy = float(goal[0]), fy(float(goal[1]))
        arm = 2.0 * stroke
        out.append(
            f'<path d="M {f(gx - arm)} {f(gy)} L {f(gx + arm)} {f(gy)} '
            f'M {f(gx)} {f(gy - arm)} L {f(gx)} {f(gy + arm)}" '
            f'stroke="#d90" stroke-width="{f(stroke)}" fill="none"/>'
        )
    out.append("</svg>")
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(out) + "\n")
