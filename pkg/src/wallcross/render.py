"""Deterministic SVG drawings of wall structures."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .geometry import ORIGIN, Point, WallStructure, as_point
from .scattering import intersection_points

SIZE = 640
MARGIN = 40
WALL_COLORS = ("#1f5fa8", "#b8452c", "#2d8a4e", "#7a4fa3", "#a87a1f", "#2c8a8a")
PATH_COLOR = "#e0a020"


def _num(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Frame:
    """Maps plane coordinates into the square canvas (y up)."""

    def __init__(self, points: Sequence[Point]):
        xs = [float(p[0]) for p in points] or [0.0]
        ys = [float(p[1]) for p in points] or [0.0]
        half = max(max(xs) - min(xs), max(ys) - min(ys), 2.0) / 2 * 1.35 + 1.0
        self.cx = (max(xs) + min(xs)) / 2
        self.cy = (max(ys) + min(ys)) / 2
        self.half = half
        self.scale = (SIZE - 2 * MARGIN) / (2 * half)
        self.box = (self.cx - half, self.cx + half, self.cy - half, self.cy + half)

    def xy(self, p) -> tuple[str, str]:
        x = MARGIN + (float(p[0]) - self.box[0]) * self.scale
        y = MARGIN + (self.box[3] - float(p[1])) * self.scale
        return _num(x), _num(y)

    def exit(self, base, d) -> tuple[float, float]:
        """Where the ray ``base + s d`` leaves the viewport."""
        bx, by = float(base[0]), float(base[1])
        s_max = float("inf")
        for coord, dc, lo, hi in ((bx, d[0], self.box[0], self.box[1]), (by, d[1], self.box[2], self.box[3])):
            if dc > 0:
                s_max = min(s_max, (hi - coord) / dc)
            elif dc < 0:
                s_max = min(s_max, (lo - coord) / dc)
        s_max = max(s_max, 0.0)
        return bx + s_max * d[0], by + s_max * d[1]


def render_svg(
    ws: WallStructure,
    thetas: Sequence = (),
    endpoint: Sequence | None = None,
    title: str = "",
    labels: bool = True,
) -> str:
    """Fan rays dashed, walls solid with their functions, theta paths and the endpoint highlighted."""
    pts: list[Point] = [ORIGIN]
    pts += [w.support.base for w in ws.walls]
    pts += intersection_points(ws)
    P = as_point(endpoint) if endpoint is not None else None
    if P is not None:
        pts.append(P)
    frame = _Frame(pts)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{escape(title or 'wall structure')}</title>",
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    lo = frame.xy((frame.box[0], 0))
    hi = frame.xy((frame.box[1], 0))
    bottom = frame.xy((0, frame.box[2]))
    top = frame.xy((0, frame.box[3]))
    out.append('<g id="axes" stroke="#dddddd" stroke-width="0.8">')
    out.append(f'<line x1="{lo[0]}" y1="{lo[1]}" x2="{hi[0]}" y2="{hi[1]}"/>')
    out.append(f'<line x1="{bottom[0]}" y1="{bottom[1]}" x2="{top[0]}" y2="{top[1]}"/>')
    out.append("</g>")
    out.append('<g id="fan" stroke="#888888" stroke-width="1.2" stroke-dasharray="6 4" fill="none">')
    for fr in ws.fan:
        x1, y1 = frame.xy(ORIGIN)
        x2, y2 = frame.xy(frame.exit(ORIGIN, fr.dir))
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    out.append("</g>")
    if P is not None and thetas:
        out.append(f'<g id="theta-paths" stroke="{PATH_COLOR}" stroke-width="5" stroke-opacity="0.45" fill="none">')
        for th in thetas:
            d = th.direction
            x1, y1 = frame.xy(frame.exit(P, d))
            x2, y2 = frame.xy(P)
            out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"><title>theta {th.index}</title></line>')
        out.append("</g>")
    out.append('<g id="walls" stroke-width="1.6" fill="none">')
    for i, w in enumerate(ws.walls):
        color = WALL_COLORS[i % len(WALL_COLORS)]
        x1, y1 = frame.xy(w.support.base)
        x2, y2 = frame.xy(frame.exit(w.support.base, w.support.dir))
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{color}"/>')
    out.append("</g>")
    if labels and ws.walls:
        out.append('<g id="labels" font-family="sans-serif" font-size="9">')
        for i, w in enumerate(ws.walls):
            color = WALL_COLORS[i % len(WALL_COLORS)]
            far = frame.exit(w.support.base, w.support.dir)
            b = w.support.base
            # label two thirds of the way out, nudged off the line
            lx = float(b[0]) + (far[0] - float(b[0])) * 0.66
            ly = float(b[1]) + (far[1] - float(b[1])) * 0.66
            x, y = frame.xy((lx, ly))
            text = escape(w.func.format(ws.classes))
            anchor = "end" if float(x) > SIZE * 0.6 else "start"
            out.append(
                f'<text x="{x}" y="{_num(float(y) - 3)}" fill="{color}" text-anchor="{anchor}">{text}</text>'
            )
        out.append("</g>")
    if P is not None:
        x, y = frame.xy(P)
        out.append(f'<circle cx="{x}" cy="{y}" r="4" fill="black"/>')
        out.append(
            f'<text x="{_num(float(x) + 6)}" y="{_num(float(y) - 6)}" font-family="sans-serif" '
            f'font-size="12">P</text>'
        )
    ox, oy = frame.xy(ORIGIN)
    out.append(f'<circle cx="{ox}" cy="{oy}" r="2" fill="#888888"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

