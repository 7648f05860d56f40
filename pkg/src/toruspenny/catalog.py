"""Reference configurations and toroidal drawings.

Coordinates are on the origin-centred unit torus; node ``k`` (1-based, as
reported by the CLI) is ``points[k - 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction as F
from typing import Callable, Iterable, Optional

from .errors import CatalogError, InvalidInputError, MalformedDrawingError
from .geometry import Displacement, TorusPoint, coerce_pair, min_displacement, segments_cross, wrap
from .graphs import SmallGraph, named_graph
from .packing import Configuration, config_from_json, config_to_json


def k5_config() -> Configuration:
    coords = [
        (F(-2, 5), F(2, 5)),
        (F(-1, 5), F(0)),
        (F(0), F(-2, 5)),
        (F(2, 5), F(-1, 5)),
        (F(1, 5), F(1, 5)),
    ]
    return Configuration.from_coords(coords, label="K5", exact=True)


def k33_config() -> Configuration:
    coords = [(F(x, 36), F(y, 36)) for x, y in
              [(13, -13), (11, 1), (1, 11), (-13, 13), (-11, -1), (-1, -11)]]
    return Configuration.from_coords(coords, label="K33", exact=True)


def octahedral_diameter() -> float:
    """Optimal 6-circle packing diameter (1 + 3√3 − √(4 + 6√3)) / 6."""
    r3 = math.sqrt(3.0)
    return (1.0 + 3.0 * r3 - math.sqrt(4.0 + 6.0 * r3)) / 6.0


def octahedral_config_as_printed() -> Configuration:
    """Octahedral coordinates in their commonly quoted closed form, taken
    literally. Its contact graph is not the octahedron; see :func:`octahedral_config`."""
    l = octahedral_diameter()
    r3 = math.sqrt(3.0)
    a = (l - 1.0) / 2.0
    coords = [
        (a, a),
        ((1.0 + r3) / 2.0 * l - 0.5, -0.5),
        (-a, -l / 2.0),
        (-a, l / 2.0),
        (a, -a),
        (-(1.0 + r3) / 2.0 * l + 0.5, 0.0),
    ]
    return Configuration.from_coords(coords, label="octahedron (as printed)")


def octahedral_config() -> Configuration:
    """Optimal 6-point packing with octahedral contact graph.

    Identical to :func:`octahedral_config_as_printed` except that nodes 3, 4 and 6 carry an
    extra x-shift of ``l - sqrt(l - 1/4)``: node 1 touches node 3 with
    vertical gap ``1/2 - l``, forcing a horizontal gap of ``sqrt(l - 1/4)``.
    """
    l = octahedral_diameter()
    r3 = math.sqrt(3.0)
    a = (l - 1.0) / 2.0
    shift = l - math.sqrt(l - 0.25)
    coords = [
        (a, a),
        ((1.0 + r3) / 2.0 * l - 0.5, -0.5),
        (-a + shift, -l / 2.0),
        (-a + shift, l / 2.0),
        (a, -a),
        (-(1.0 + r3) / 2.0 * l + 0.5 + shift, 0.0),
    ]
    return Configuration.from_coords(coords, label="octahedron")


# ---------------------------------------------------------------------------
# Drawings
# ---------------------------------------------------------------------------

Edge = tuple[int, int, Displacement]


@dataclass(frozen=True)
class ToroidalDrawing:
    """Straight-line drawing: edge ``(i, j, d)`` runs from point i along d."""

    configuration: Configuration
    edges: tuple[Edge, ...]
    label: Optional[str] = None

    @property
    def n(self) -> int:
        return self.configuration.n

    def graph(self) -> SmallGraph:
        return SmallGraph.from_edges(self.n, ((i, j) for i, j, _ in self.edges))


@dataclass
class DrawingVerdict:
    passed: bool
    crossings: list[tuple[int, int]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def drawing_from_edges(cfg: Configuration, edges: Iterable[tuple[int, int]], label=None) -> ToroidalDrawing:
    """Drawing that joins each pair along its minimal displacement."""
    pts = cfg.points
    out = tuple((i, j, min_displacement(pts[i], pts[j])) for i, j in edges)
    return ToroidalDrawing(cfg, out, label=label if label is not None else cfg.label)


def _endpoint_gap(p: TorusPoint, d: Displacement, q: TorusPoint):
    land = wrap((p.x + d.dx, p.y + d.dy))
    r = min_displacement(land, q)
    return max(abs(r.dx), abs(r.dy))


def check_drawing(d: ToroidalDrawing) -> None:
    """Raise :class:`MalformedDrawingError` unless every edge lands on its
    endpoint (exactly for rational data, within 1e-12 otherwise)."""
    pts = d.configuration.points
    for k, (i, j, disp) in enumerate(d.edges):
        if not (0 <= i < d.n and 0 <= j < d.n) or i == j:
            raise MalformedDrawingError(f"edge {k} has invalid endpoints ({i}, {j})")
        gap = _endpoint_gap(pts[i], disp, pts[j])
        exact = pts[i].exact and pts[j].exact and disp.exact
        if (gap != 0) if exact else (gap > 1e-12):
            raise MalformedDrawingError(
                f"edge {k} from {i} does not land on {j} (off by {float(gap):.3g})"
            )
        if disp.norm_sq >= 1:
            raise MalformedDrawingError(f"edge {k} displacement has norm >= 1")


def verify_drawing(d: ToroidalDrawing) -> DrawingVerdict:
    """Pass iff no two edges cross; shared endpoints are allowed."""
    check_drawing(d)
    pts = d.configuration.points
    segs = [(pts[i], disp) for i, _, disp in d.edges]
    crossings = [
        (a, b)
        for a in range(len(segs))
        for b in range(a + 1, len(segs))
        if segments_cross(segs[a], segs[b])
    ]
    return DrawingVerdict(not crossings, crossings)


K7_GENERATOR = (F(1, 7), F(3, 7))


def k7_lattice_drawing() -> ToroidalDrawing:
    """K7 as the 7-point section k·(1/7, 3/7) of a tilted triangular lattice."""
    vx, vy = K7_GENERATOR
    cfg = Configuration.from_coords([(k * vx, k * vy) for k in range(7)], label="K7", exact=True)
    pairs = [(i, j) for i in range(7) for j in range(i + 1, 7)]
    return drawing_from_edges(cfg, pairs, label="K7")


def k6_drawing(removed_vertex: int) -> ToroidalDrawing:
    """K7 drawing with one vertex and its incident edges deleted."""
    if isinstance(removed_vertex, bool) or not 0 <= int(removed_vertex) <= 6:
        raise InvalidInputError(f"removed_vertex must be in 0..6, got {removed_vertex!r}")
    r = int(removed_vertex)
    k7 = k7_lattice_drawing()
    keep = [v for v in range(7) if v != r]
    index = {v: k for k, v in enumerate(keep)}
    cfg = Configuration(
        tuple(k7.configuration.points[v] for v in keep), exact=True, label=f"K6 (K7 minus {r})"
    )
    edges = tuple(
        (index[i], index[j], disp) for i, j, disp in k7.edges if i != r and j != r
    )
    return ToroidalDrawing(cfg, edges, label=cfg.label)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    expected: str
    description: str
    build: Callable[[], Configuration]
    drawing: Optional[Callable[[], ToroidalDrawing]] = None
    penny: bool = True


def _drawing_entry(name, expected, description, make):
    return CatalogEntry(name, expected, description, lambda: make().configuration, make, penny=False)


CATALOG: dict[str, CatalogEntry] = {
    "k5": CatalogEntry("k5", "K5", "K5 penny graph, optimal 5-circle packing (exact)", k5_config),
    "k33": CatalogEntry("k33", "K33", "K3,3 penny graph (exact)", k33_config),
    "octahedron": CatalogEntry(
        "octahedron", "octahedron", "optimal 6-circle packing, octahedral contact graph", octahedral_config
    ),
    "octahedron-printed": CatalogEntry(
        "octahedron-printed",
        "octahedron",
        "octahedral closed form taken literally (not an equal-edge configuration)",
        octahedral_config_as_printed,
        penny=False,
    ),
    "k7": _drawing_entry("k7", "K7", "crossing-free K7 drawing on the tilted lattice", k7_lattice_drawing),
}
for _r in range(7):
    CATALOG[f"k6-{_r}"] = _drawing_entry(
        f"k6-{_r}", "K6", f"crossing-free K6 drawing (K7 minus vertex {_r})",
        (lambda r=_r: k6_drawing(r)),
    )


def catalog_entry(name: str) -> CatalogEntry:
    key = name.strip().lower()
    aliases = {"k3,3": "k33", "octahedral": "octahedron", "k6": "k6-0"}
    key = aliases.get(key, key)
    try:
        return CATALOG[key]
    except KeyError:
        raise CatalogError(f"unknown catalog entry {name!r}; try one of {sorted(CATALOG)}") from None


def expected_graph(name: str) -> SmallGraph:
    return named_graph(catalog_entry(name).expected)


def drawing_to_json(d: ToroidalDrawing) -> dict:
    out = config_to_json(d.configuration)
    out["edges"] = [
        [i, j, [str(disp.dx) if disp.exact else float(disp.dx),
                str(disp.dy) if disp.exact else float(disp.dy)]]
        for i, j, disp in d.edges
    ]
    return out


def drawing_from_json(data: dict) -> ToroidalDrawing:
    cfg = config_from_json(data)
    edges = []
    for k, e in enumerate(data.get("edges", [])):
        try:
            i, j, (dx, dy) = e
        except (TypeError, ValueError) as exc:
            raise MalformedDrawingError(f"edge {k} is not [i, j, [dx, dy]]") from exc
        dx, dy = coerce_pair(dx, dy)
        if not cfg.exact:
            dx, dy = float(dx), float(dy)
        edges.append((int(i), int(j), Displacement(dx, dy)))
    return ToroidalDrawing(cfg, tuple(edges), label=cfg.label)
