"""Deterministic SVG output for packings and toroidal drawings.

The torus square [-1/2, 1/2)^2 maps to the canvas with y pointing up, so a
point (x, y) in tile (tx, ty) lands at

    X = margin + (x + tx - lo) * scale
    Y = margin + (hi - (y + ty)) * scale

where [lo, hi) is the horizontal and vertical extent of the tiled region.
Every number is written with six decimals so the bytes never depend on the
platform's float repr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional
from xml.sax.saxutils import escape

from .catalog import ToroidalDrawing, check_drawing
from .errors import InvalidInputError
from .geometry import Displacement, TorusPoint
from .packing import ContactGraph, Configuration, contact_graph, packing_diameter

MARGIN = 8


@dataclass(frozen=True)
class Style:
    stroke: str = "#000000"
    fill: str = "none"
    stroke_width: float = 1.0

    def attrs(self) -> str:
        return (
            f'stroke="{escape(self.stroke)}" fill="{escape(self.fill)}" '
            f'stroke-width="{_num(self.stroke_width)}"'
        )


DEFAULT_CIRCLE = Style("#1f3b73", "#c6d4ef", 1.0)
DEFAULT_EDGE = Style("#b22222", "none", 1.5)


@dataclass(frozen=True)
class RenderOptions:
    tiling: int = 1
    canvas_size: int = 480
    show_edges: bool = True
    show_labels: bool = False
    circle_style: Style = field(default=DEFAULT_CIRCLE)
    edge_style: Style = field(default=DEFAULT_EDGE)

    def __post_init__(self):
        if isinstance(self.tiling, bool) or self.tiling not in (1, 2, 3, 4, 5):
            raise InvalidInputError(f"tiling must be one of 1..5, got {self.tiling!r}")
        if isinstance(self.canvas_size, bool) or not isinstance(self.canvas_size, int) or self.canvas_size < 64:
            raise InvalidInputError(f"canvas_size must be an integer >= 64, got {self.canvas_size!r}")


def _num(v: float) -> str:
    s = f"{float(v):.6f}"
    return "0.000000" if s == "-0.000000" else s


class _Canvas:
    def __init__(self, opts: RenderOptions):
        k = opts.tiling
        self.opts = opts
        self.tiles = [t - k // 2 for t in range(k)]
        self.lo = self.tiles[0] - 0.5
        self.hi = self.tiles[-1] + 0.5
        self.scale = (opts.canvas_size - 2 * MARGIN) / k

    def x(self, v: float) -> str:
        return _num(MARGIN + (v - self.lo) * self.scale)

    def y(self, v: float) -> str:
        return _num(MARGIN + (self.hi - v) * self.scale)

    def length(self, v: float) -> str:
        return _num(v * self.scale)

    def copies(self) -> list[tuple[int, int]]:
        return [(tx, ty) for ty in reversed(self.tiles) for tx in self.tiles]

    def header(self, title: str) -> list[str]:
        size = self.opts.canvas_size
        k = self.opts.tiling
        span = self.scale * k
        return [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
            f"<!-- torus [-1/2,1/2)^2 tiled {k}x{k}; canvas X = {MARGIN} + (x - ({_num(self.lo)})) * "
            f"{_num(self.scale)}, Y = {MARGIN} + ({_num(self.hi)} - y) * {_num(self.scale)} (y flipped) -->",
            f"<title>{escape(title)}</title>",
            "<defs>",
            f'<clipPath id="region"><rect x="{_num(MARGIN)}" y="{_num(MARGIN)}" '
            f'width="{_num(span)}" height="{_num(span)}"/></clipPath>',
            "</defs>",
        ]

    def outlines(self) -> list[str]:
        out = ['<g class="tiles" stroke="#9a9a9a" fill="none" stroke-width="0.5">']
        if self.opts.tiling > 1:
            for tx, ty in self.copies():
                out.append(self._rect(tx, ty))
        out.append("</g>")
        out.append('<g class="domain" stroke="#000000" fill="none" stroke-width="1.5">')
        out.append(self._rect(0, 0))
        out.append("</g>")
        return out

    def _rect(self, tx: int, ty: int) -> str:
        return (
            f'<rect x="{self.x(tx - 0.5)}" y="{self.y(ty + 0.5)}" '
            f'width="{self.length(1)}" height="{self.length(1)}"/>'
        )

    def line(self, x0, y0, x1, y1) -> str:
        return f'<line x1="{self.x(x0)}" y1="{self.y(y0)}" x2="{self.x(x1)}" y2="{self.y(y1)}"/>'


def _split_at_boundary(x0: float, y0: float, dx: float, dy: float):
    """Cut p -> p + d where it leaves the domain; each piece is shifted back
    into [-1/2, 1/2)^2."""
    cuts = {0.0, 1.0}
    for start, step in ((x0, dx), (y0, dy)):
        if step == 0:
            continue
        a, b = sorted((start, start + step))
        for m in range(math.ceil(a - 0.5), math.floor(b - 0.5) + 1):
            t = (m + 0.5 - start) / step
            if 0.0 < t < 1.0:
                cuts.add(t)
    ts = sorted(cuts)
    pieces = []
    for t0, t1 in zip(ts, ts[1:]):
        if (t1 - t0) * math.hypot(dx, dy) < 1e-12:
            continue
        tm = (t0 + t1) / 2
        sx = -math.floor(x0 + tm * dx + 0.5)
        sy = -math.floor(y0 + tm * dy + 0.5)
        pieces.append((x0 + t0 * dx + sx, y0 + t0 * dy + sy, x0 + t1 * dx + sx, y0 + t1 * dy + sy))
    return pieces


def _edge_group(canvas: _Canvas, p: TorusPoint, d: Displacement, i: int, j: int) -> list[str]:
    x0, y0 = float(p.x), float(p.y)
    dx, dy = float(d.dx), float(d.dy)
    out = [f'<g class="edge" data-i="{i + 1}" data-j="{j + 1}">']
    if canvas.opts.tiling == 1:
        for a, b, c, e in _split_at_boundary(x0, y0, dx, dy):
            out.append(canvas.line(a, b, c, e))
    else:
        for tx, ty in canvas.copies():
            out.append(canvas.line(x0 + tx, y0 + ty, x0 + tx + dx, y0 + ty + dy))
    out.append("</g>")
    return out


def _labels(canvas: _Canvas, points: Iterable[TorusPoint], offset: float) -> list[str]:
    out = ['<g class="labels" font-family="sans-serif" font-size="10" fill="#000000">']
    for tx, ty in canvas.copies():
        for k, p in enumerate(points):
            out.append(
                f'<text x="{canvas.x(float(p.x) + tx + offset)}" '
                f'y="{canvas.y(float(p.y) + ty + offset)}">{k + 1}</text>'
            )
    out.append("</g>")
    return out


def _check_contact(config: Configuration, contact: ContactGraph) -> None:
    if contact.n != config.n:
        raise InvalidInputError(f"contact graph has {contact.n} vertices, configuration has {config.n}")
    d = packing_diameter(config)
    if not math.isclose(float(contact.diameter), d, rel_tol=1e-9, abs_tol=1e-15):
        raise InvalidInputError("contact graph diameter does not match the configuration")
    pts = config.points
    for (i, j), lifts in contact.edge_data.items():
        for disp in lifts:
            gx = float(pts[i].x) + float(disp.dx) - float(pts[j].x)
            gy = float(pts[i].y) + float(disp.dy) - float(pts[j].y)
            if abs(gx - round(gx)) > 1e-9 or abs(gy - round(gy)) > 1e-9:
                raise InvalidInputError(f"contact edge ({i}, {j}) does not join the configuration's points")


def render_packing(
    config: Configuration,
    contact: Optional[ContactGraph] = None,
    opts: Optional[RenderOptions] = None,
) -> str:
    """SVG of ``config`` with circles of radius diameter/2 in every tile.

    Each contact lift becomes one ``<g class="edge">``. With ``tiling=1`` a
    wrapping edge is cut at the boundary into its visible parts.
    """
    opts = opts or RenderOptions()
    if contact is None:
        contact = contact_graph(config)
    _check_contact(config, contact)
    canvas = _Canvas(opts)
    radius = float(contact.diameter) / 2
    pts = config.points

    out = canvas.header(config.label or f"{config.n}-point packing")
    out.extend(canvas.outlines())
    out.append(f'<g class="circles" clip-path="url(#region)" {opts.circle_style.attrs()}>')
    for tx, ty in canvas.copies():
        for p in pts:
            out.append(
                f'<circle cx="{canvas.x(float(p.x) + tx)}" cy="{canvas.y(float(p.y) + ty)}" '
                f'r="{canvas.length(radius)}"/>'
            )
    out.append("</g>")
    if opts.show_edges:
        out.append(f'<g class="edges" clip-path="url(#region)" {opts.edge_style.attrs()}>')
        for i, j in contact.edges:
            for disp in contact.edge_data[(i, j)]:
                out.extend(_edge_group(canvas, pts[i], disp, i, j))
        out.append("</g>")
    if opts.show_labels:
        out.extend(_labels(canvas, pts, 0.0))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_drawing(d: ToroidalDrawing, opts: Optional[RenderOptions] = None) -> str:
    """SVG of a straight-line toroidal drawing: dots plus geodesic edges."""
    opts = opts or RenderOptions()
    check_drawing(d)
    canvas = _Canvas(opts)
    pts = d.configuration.points
    dot = max(2.0, opts.canvas_size / (120.0 * opts.tiling))

    out = canvas.header(d.label or f"{d.n}-vertex drawing")
    out.extend(canvas.outlines())
    if opts.show_edges:
        out.append(f'<g class="edges" clip-path="url(#region)" {opts.edge_style.attrs()}>')
        for i, j, disp in d.edges:
            out.extend(_edge_group(canvas, pts[i], disp, i, j))
        out.append("</g>")
    fill = opts.circle_style.stroke
    out.append(f'<g class="vertices" clip-path="url(#region)" fill="{escape(fill)}" stroke="none">')
    for tx, ty in canvas.copies():
        for p in pts:
            out.append(
                f'<circle cx="{canvas.x(float(p.x) + tx)}" cy="{canvas.y(float(p.y) + ty)}" '
                f'r="{_num(dot)}"/>'
            )
    out.append("</g>")
    if opts.show_labels:
        out.extend(_labels(canvas, pts, 0.02))
    out.append("</svg>")
    return "\n".join(out) + "\n"
