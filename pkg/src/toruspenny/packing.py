"""Packing diameter, contact graphs and penny-graph verification."""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateConfigurationError,
    DegeneratePairError,
    InvalidInputError,
    ModeError,
)
from .geometry import OFFSETS, Coord, Displacement, TorusPoint, squared_distance, wrap
from .graphs import SmallGraph, identify, is_bipartite, is_isomorphic, is_planar

MAX_POINTS = 4096
TORUS_TAG = "unit-square-centered"
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Configuration:
    """Ordered points on the torus. ``exact`` is True iff every coordinate
    is a Fraction; passing ``exact=False`` converts rationals to floats."""

    points: tuple[TorusPoint, ...]
    exact: Optional[bool] = None
    label: Optional[str] = None

    def __post_init__(self) -> None:
        pts = tuple(wrap(p) for p in self.points)
        if not 1 <= len(pts) <= MAX_POINTS:
            raise InvalidInputError(f"configuration needs 1..{MAX_POINTS} points, got {len(pts)}")
        all_exact = all(p.exact for p in pts)
        if self.exact and not all_exact:
            raise ModeError("exact configuration needs rational coordinates")
        if self.exact is False or not all_exact:
            pts = tuple(p.to_float() for p in pts)
            all_exact = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "exact", all_exact)

    @classmethod
    def from_coords(cls, coords: Iterable, label: Optional[str] = None, exact: Optional[bool] = None):
        return cls(tuple(wrap(c) for c in coords), exact=exact, label=label)

    @property
    def n(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i: int) -> TorusPoint:
        return self.points[i]

    def to_float(self) -> "Configuration":
        return Configuration(self.points, exact=False, label=self.label)

    def as_array(self) -> np.ndarray:
        return np.array([[float(p.x), float(p.y)] for p in self.points], dtype=float)

    def to_json(self) -> dict:
        return config_to_json(self)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def _coord_out(v: Coord):
    return str(v) if isinstance(v, Fraction) else float(v)


def config_to_json(cfg: Configuration) -> dict:
    out: dict[str, Any] = {}
    if cfg.label is not None:
        out["label"] = cfg.label
    out["torus"] = TORUS_TAG
    out["exact"] = bool(cfg.exact)
    out["points"] = [[_coord_out(p.x), _coord_out(p.y)] for p in cfg.points]
    return out


def config_from_json(data: dict) -> Configuration:
    if not isinstance(data, dict):
        raise InvalidInputError("configuration JSON must be an object")
    torus = data.get("torus", TORUS_TAG)
    if torus != TORUS_TAG:
        raise InvalidInputError(f"unsupported torus {torus!r}; expected {TORUS_TAG!r}")
    exact = bool(data.get("exact", False))
    raw = data.get("points")
    if not isinstance(raw, list):
        raise InvalidInputError("configuration JSON needs a 'points' list")
    coords = []
    for k, pt in enumerate(raw):
        if not isinstance(pt, (list, tuple)) or len(pt) != 2:
            raise InvalidInputError(f"point {k} is not an [x, y] pair")
        if exact:
            for c in pt:
                if isinstance(c, bool) or not isinstance(c, (str, int)):
                    raise ModeError(f"exact mode needs rational strings; point {k} has {c!r}")
        coords.append(tuple(pt))
    label = data.get("label")
    return Configuration.from_coords(coords, label=label, exact=exact)


def load_config(path: str) -> Configuration:
    """Read a configuration from a JSON file; ``-`` reads standard input."""
    try:
        if path == "-":
            data = json.load(sys.stdin)
        else:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_json(data)


def dumps_config(cfg: Configuration) -> str:
    return json.dumps(config_to_json(cfg), indent=2)


# ---------------------------------------------------------------------------
# Pairwise distances
# ---------------------------------------------------------------------------


def _numeric_pairs(cfg: Configuration) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index arrays ``i < j`` and squared minimal distances (float)."""
    xy = cfg.as_array()
    n = len(xy)
    ii, jj = np.triu_indices(n, k=1)
    d = xy[jj] - xy[ii]
    m = -np.floor(d + 0.5)
    r = d + m
    r = np.where(r >= 0.5, r - 1.0, r)
    r = np.where(r < -0.5, r + 1.0, r)
    sq = r[:, 0] * r[:, 0] + r[:, 1] * r[:, 1]
    return ii, jj, sq


def _exact_pairs(cfg: Configuration) -> list[tuple[int, int, Fraction]]:
    pts = cfg.points
    return [
        (i, j, squared_distance(pts[i], pts[j]))
        for i in range(len(pts))
        for j in range(i + 1, len(pts))
    ]


def pair_squared_distances(cfg: Configuration, exact: Optional[bool] = None) -> list[tuple[int, int, Coord]]:
    """All ``(i, j, squared distance)`` for ``i < j`` in lexicographic order."""
    if exact is None:
        exact = cfg.exact
    if exact:
        if not cfg.exact:
            raise ModeError("exact distances need an exact configuration")
        return _exact_pairs(cfg)
    ii, jj, sq = _numeric_pairs(cfg)
    return [(int(i), int(j), float(s)) for i, j, s in zip(ii, jj, sq)]


def _check_size(cfg: Configuration) -> None:
    if cfg.n < 2:
        raise DegenerateConfigurationError("packing diameter needs at least 2 points")


def packing_diameter(cfg: Configuration) -> float:
    """Smallest pairwise torus distance."""
    _check_size(cfg)
    if cfg.exact:
        return math.sqrt(float(packing_diameter_exact(cfg)))
    _, _, sq = _numeric_pairs(cfg)
    return math.sqrt(float(sq.min()))


def packing_diameter_exact(cfg: Configuration) -> Fraction:
    """Exact squared packing diameter of a rational configuration."""
    if not cfg.exact:
        raise ModeError("packing_diameter_exact needs rational coordinates")
    _check_size(cfg)
    return min(s for _, _, s in _exact_pairs(cfg))


# ---------------------------------------------------------------------------
# Contact graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContactGraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    edge_data: dict[tuple[int, int], tuple[Displacement, ...]]
    diameter: float
    diameter_sq: Coord
    tol: float = DEFAULT_TOL

    def graph(self) -> SmallGraph:
        return SmallGraph.from_edges(self.n, self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def multiplicity(self, i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        return len(self.edge_data.get(key, ()))


def _threshold(diam_sq: Coord, tol) -> Coord:
    if isinstance(diam_sq, Fraction):
        t = tol if isinstance(tol, Fraction) else Fraction(tol)
        return diam_sq * (1 + t) ** 2
    return float(diam_sq) * (1.0 + float(tol)) ** 2


def _lifts_within(p: TorusPoint, q: TorusPoint, limit: Coord) -> tuple[Displacement, ...]:
    dx, dy = q.x - p.x, q.y - p.y
    lifts = [Displacement(dx + mx, dy + my, (mx, my)) for mx, my in OFFSETS]
    out = [d for d in lifts if d.norm_sq <= limit]
    out.sort(key=lambda d: (d.norm_sq, d.offset))
    return tuple(out)


def contact_graph(cfg: Configuration, tol: float = DEFAULT_TOL) -> ContactGraph:
    """Pairs at the packing diameter, up to relative tolerance ``tol``.

    In exact mode comparisons are carried out on rationals, so ``tol=0``
    selects exactly the pairs at the minimum distance.
    """
    _check_size(cfg)
    if tol < 0:
        raise InvalidInputError("tolerance must be non-negative")
    pairs = pair_squared_distances(cfg)
    for i, j, s in pairs:
        if s == 0:
            raise DegeneratePairError(i, j)
    diam_sq = min(s for _, _, s in pairs)
    limit = _threshold(diam_sq, tol)
    pts = cfg.points
    if not cfg.exact:
        pts = tuple(p.to_float() for p in pts)
    edges = []
    data = {}
    for i, j, s in pairs:
        if s <= limit:
            edges.append((i, j))
            data[(i, j)] = _lifts_within(pts[i], pts[j], limit)
    return ContactGraph(
        n=cfg.n,
        edges=tuple(edges),
        edge_data=data,
        diameter=math.sqrt(float(diam_sq)),
        diameter_sq=diam_sq,
        tol=float(tol),
    )


# ---------------------------------------------------------------------------
# Verification and reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairViolation:
    i: int
    j: int
    distance: float
    relative_excess: float

    def to_dict(self) -> dict:
        return {
            "pair": [self.i + 1, self.j + 1],
            "distance": self.distance,
            "relative_excess": self.relative_excess,
        }


@dataclass
class PennyVerdict:
    passed: bool
    reasons: list[str] = field(default_factory=list)
    violations: list[PairViolation] = field(default_factory=list)
    extra_contacts: list[tuple[int, int]] = field(default_factory=list)
    witness: Optional[tuple[int, ...]] = None
    contact: Optional[ContactGraph] = None

    def __bool__(self) -> bool:
        return self.passed


def verify_penny(
    cfg: Configuration, expected: SmallGraph, tol: float = DEFAULT_TOL, exact: bool = False
) -> PennyVerdict:
    """Check that ``cfg`` realises ``expected`` as a penny graph.

    Passes iff the contact graph at ``tol`` is isomorphic to ``expected``.
    On failure, ``violations`` lists those of the ``|E|`` shortest pairs
    that miss the diameter, since an equal-length realisation needs at
    least ``|E|`` pairs at the minimum. ``exact=True`` demands a rational
    configuration and compares with zero tolerance.
    """
    if exact:
        if not cfg.exact:
            raise ModeError("exact verification needs rational coordinates")
        tol = 0
    if expected.n != cfg.n:
        return PennyVerdict(False, [f"vertex counts {cfg.n} ≠ {expected.n}"])
    contact = contact_graph(cfg, tol)
    verdict = PennyVerdict(False, contact=contact)

    m = expected.edge_count
    ranked = sorted(pair_squared_distances(cfg), key=lambda t: (t[2], t[0], t[1]))
    limit = _threshold(contact.diameter_sq, tol)
    for i, j, s in ranked[:m]:
        if s > limit:
            dist = math.sqrt(float(s))
            verdict.violations.append(
                PairViolation(i, j, dist, dist / contact.diameter - 1.0)
            )
    if verdict.violations:
        verdict.reasons.append(
            f"{len(verdict.violations)} of the {m} shortest pairs are not at the packing diameter"
        )
    if len(contact.edges) > m:
        verdict.extra_contacts = list(contact.edges)
        verdict.reasons.append(f"{len(contact.edges)} contacts, expected {m}")
    witness = is_isomorphic(contact.graph(), expected)
    if witness is None:
        verdict.reasons.append("contact graph is not isomorphic to the expected graph")
    verdict.witness = witness
    verdict.passed = witness is not None and not verdict.violations
    return verdict


@dataclass
class PackingReport:
    diameter: float
    diameter_squared_exact: Optional[Fraction]
    contact_graph: ContactGraph
    degree_sequence: list[int]
    named_match: Optional[str]
    planar: bool
    bipartite: Optional[tuple[tuple[int, ...], tuple[int, ...]]]
    regular: Optional[int]
    label: Optional[str] = None

    def to_dict(self) -> dict:
        """JSON-ready view; vertex numbers are 1-based."""
        cg = self.contact_graph
        return {
            "label": self.label,
            "node_numbering": "1-based",
            "n": cg.n,
            "diameter": self.diameter,
            "diameter_squared": (
                str(self.diameter_squared_exact)
                if self.diameter_squared_exact is not None
                else self.diameter * self.diameter
            ),
            "diameter_squared_exact": self.diameter_squared_exact is not None,
            "contact_edges": [[i + 1, j + 1] for i, j in cg.edges],
            "edge_multiplicities": [cg.multiplicity(i, j) for i, j in cg.edges],
            "edge_count": len(cg.edges),
            "degree_sequence": self.degree_sequence,
            "named_match": self.named_match,
            "planar": self.planar,
            "bipartite": (
                [[v + 1 for v in side] for side in self.bipartite]
                if self.bipartite is not None
                else None
            ),
            "regular": self.regular,
        }


def analyze(cfg: Configuration, tol: Optional[float] = None) -> PackingReport:
    """Contact graph plus its graph-theoretic profile. ``tol`` defaults to 0
    for exact configurations and 1e-9 otherwise."""
    if tol is None:
        tol = 0 if cfg.exact else DEFAULT_TOL
    contact = contact_graph(cfg, tol)
    g = contact.graph()
    return PackingReport(
        diameter=contact.diameter,
        diameter_squared_exact=contact.diameter_sq if cfg.exact else None,
        contact_graph=contact,
        degree_sequence=g.degrees(),
        named_match=identify(g),
        planar=is_planar(g, witness=False).planar,
        bipartite=is_bipartite(g),
        regular=g.regular_degree(),
        label=cfg.label,
    )


def translate(cfg: Configuration, shift: Sequence) -> Configuration:
    sx, sy = shift
    return Configuration.from_coords(
        [(p.x + sx, p.y + sy) for p in cfg.points], label=cfg.label
    )
