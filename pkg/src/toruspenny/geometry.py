"""Metric geometry of the flat unit square torus R^2 / Z^2.

Points are stored on the origin-centred fundamental domain [-1/2, 1/2)^2.
Coordinates are either :class:`fractions.Fraction` (exact mode) or ``float``;
every routine here works on both, and stays exact when all inputs are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .errors import DegeneratePairError, InvalidInputError, ModeError

Coord = Union[Fraction, float]

HALF = Fraction(1, 2)

# Offsets used for brute-force image enumeration; canonical coordinate
# differences lie in (-1, 1) so these always contain the minimum.
OFFSETS: tuple[tuple[int, int], ...] = tuple(
    (mx, my) for mx in (-1, 0, 1) for my in (-1, 0, 1)
)

FLOAT_EPS = 1e-12


def _coerce(v) -> Coord:
    if isinstance(v, bool):
        raise InvalidInputError(f"boolean is not a coordinate: {v!r}")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, Rational):  # int and friends
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"cannot parse coordinate {v!r}") from exc
    if isinstance(v, Real):
        f = float(v)
        if not math.isfinite(f):
            raise InvalidInputError(f"non-finite coordinate {v!r}")
        return f
    raise InvalidInputError(f"unsupported coordinate type {type(v).__name__}")


def coerce_pair(x, y) -> tuple[Coord, Coord]:
    cx, cy = _coerce(x), _coerce(y)
    if isinstance(cx, Fraction) != isinstance(cy, Fraction):
        cx, cy = float(cx), float(cy)
    return cx, cy


def _reduce(v: Coord) -> tuple[Coord, int]:
    """Return ``(r, m)`` with ``r = v + m`` in [-1/2, 1/2) and integer ``m``."""
    if isinstance(v, Fraction):
        m = -math.floor(v + HALF)
        return v + m, m
    m = -math.floor(v + 0.5)
    r = v + m
    # float rounding can leave r one ulp outside the half-open window
    if r >= 0.5:
        r -= 1.0
        m -= 1
    elif r < -0.5:
        r += 1.0
        m += 1
    return r, m


@dataclass(frozen=True)
class TorusPoint:
    """Canonical representative of a point on the unit square torus."""

    x: Coord
    y: Coord

    def __post_init__(self) -> None:
        x, y = coerce_pair(self.x, self.y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        for c in (x, y):
            if not (-HALF <= c < HALF):
                raise InvalidInputError(
                    f"({self.x}, {self.y}) is not canonical; use wrap() first"
                )

    @property
    def exact(self) -> bool:
        return isinstance(self.x, Fraction)

    def to_float(self) -> "TorusPoint":
        return TorusPoint(float(self.x), float(self.y))

    def as_tuple(self) -> tuple[Coord, Coord]:
        return (self.x, self.y)

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class Displacement:
    """Lifted vector ``q - p + offset`` between two torus points."""

    dx: Coord
    dy: Coord
    offset: tuple[int, int] = (0, 0)

    @property
    def exact(self) -> bool:
        return isinstance(self.dx, Fraction) and isinstance(self.dy, Fraction)

    @property
    def norm_sq(self) -> Coord:
        return self.dx * self.dx + self.dy * self.dy

    @property
    def norm(self) -> float:
        dx, dy = float(self.dx), float(self.dy)
        return math.sqrt(dx * dx + dy * dy)

    def __neg__(self) -> "Displacement":
        return Displacement(-self.dx, -self.dy, (-self.offset[0], -self.offset[1]))


def wrap(p) -> TorusPoint:
    """Reduce a raw point (pair or TorusPoint) to its canonical representative."""
    if isinstance(p, TorusPoint):
        return p
    try:
        x, y = p
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"expected an (x, y) pair, got {p!r}") from exc
    x, y = coerce_pair(x, y)
    return TorusPoint(_reduce(x)[0], _reduce(y)[0])


def _diff(p: TorusPoint, q: TorusPoint) -> tuple[Coord, Coord]:
    dx, dy = q.x - p.x, q.y - p.y
    return dx, dy


def min_displacement(p: TorusPoint, q: TorusPoint) -> Displacement:
    """Shortest lifted vector from ``p`` to ``q``.

    Per-coordinate reduction is exact on the square torus. Ties (a
    coordinate difference of exactly 1/2) resolve to the negative side,
    matching the half-open canonical window.
    """
    dx, dy = _diff(p, q)
    rx, mx = _reduce(dx)
    ry, my = _reduce(dy)
    return Displacement(rx, ry, (mx, my))


def squared_distance(p: TorusPoint, q: TorusPoint) -> Coord:
    """Squared torus distance; a Fraction when both points are exact."""
    return min_displacement(p, q).norm_sq


def torus_distance(p: TorusPoint, q: TorusPoint, exact: bool = False) -> Coord:
    """Torus distance, or with ``exact=True`` the exact squared distance."""
    if exact:
        if not (p.exact and q.exact):
            raise ModeError("exact distance needs rational coordinates")
        return squared_distance(p, q)
    d = min_displacement(p, q)
    dx, dy = float(d.dx), float(d.dy)
    return math.sqrt(dx * dx + dy * dy)


def _within(value, reference, tol) -> bool:
    """``value <= reference * (1 + tol)**2``, exact when the inputs are."""
    if isinstance(value, Fraction) and isinstance(reference, Fraction):
        t = Fraction(tol) if not isinstance(tol, Fraction) else tol
        return value <= reference * (1 + t) ** 2
    return float(value) <= float(reference) * (1.0 + float(tol)) ** 2


def realizing_displacements(
    p: TorusPoint, q: TorusPoint, tol: float = 1e-9
) -> list[Displacement]:
    """All lifts ``q - p + m`` (m in {-1,0,1}^2) within ``tol`` of the shortest."""
    if p == q:
        raise DegeneratePairError()
    dx, dy = _diff(p, q)
    lifts = [Displacement(dx + mx, dy + my, (mx, my)) for mx, my in OFFSETS]
    best = min(d.norm_sq for d in lifts)
    if best == 0:
        raise DegeneratePairError()
    out = [d for d in lifts if _within(d.norm_sq, best, tol)]
    out.sort(key=lambda d: (d.norm_sq, d.offset))
    return out


def distance_multiplicity(p: TorusPoint, q: TorusPoint, tol: float = 1e-9) -> int:
    return len(realizing_displacements(p, q, tol))


# ---------------------------------------------------------------------------
# Isometries
# ---------------------------------------------------------------------------

Linear = tuple[int, int, int, int]  # row-major 2x2 (a, b, c, d)

POINT_GROUP: dict[str, Linear] = {
    "identity": (1, 0, 0, 1),
    "rot90": (0, -1, 1, 0),
    "rot180": (-1, 0, 0, -1),
    "rot270": (0, 1, -1, 0),
    "reflect_x_axis": (1, 0, 0, -1),
    "reflect_y_axis": (-1, 0, 0, 1),
    "reflect_diagonal": (0, 1, 1, 0),
    "reflect_antidiagonal": (0, -1, -1, 0),
}
_LINEAR_NAMES = {v: k for k, v in POINT_GROUP.items()}


def _matmul(a: Linear, b: Linear) -> Linear:
    return (
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    )


def _apply_linear(m: Linear, x: Coord, y: Coord) -> tuple[Coord, Coord]:
    return m[0] * x + m[1] * y, m[2] * x + m[3] * y


@dataclass(frozen=True)
class IsometryMap:
    """``p -> linear * p + translation`` reduced mod 1."""

    linear: Linear = POINT_GROUP["identity"]
    translation: TorusPoint = TorusPoint(Fraction(0), Fraction(0))

    def __post_init__(self) -> None:
        lin = tuple(int(v) for v in self.linear)
        if lin not in _LINEAR_NAMES:
            raise InvalidInputError(f"{self.linear} is not a symmetry of the square lattice")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", wrap(self.translation))

    @property
    def name(self) -> str:
        return _LINEAR_NAMES[self.linear]

    @classmethod
    def from_name(cls, name: str, translation=(0, 0)) -> "IsometryMap":
        try:
            lin = POINT_GROUP[name]
        except KeyError:
            raise InvalidInputError(f"unknown point-group element {name!r}") from None
        return cls(lin, wrap(translation))

    def __call__(self, p: TorusPoint) -> TorusPoint:
        return apply_isometry(self, p)

    def compose(self, other: "IsometryMap") -> "IsometryMap":
        """``self ∘ other``: apply ``other`` first."""
        tx, ty = _apply_linear(self.linear, other.translation.x, other.translation.y)
        t = wrap(coerce_pair(tx + self.translation.x, ty + self.translation.y))
        return IsometryMap(_matmul(self.linear, other.linear), t)

    def inverse(self) -> "IsometryMap":
        a, b, c, d = self.linear
        inv = (a, c, b, d)  # orthogonal: inverse is transpose
        tx, ty = _apply_linear(inv, self.translation.x, self.translation.y)
        return IsometryMap(inv, wrap(coerce_pair(-tx, -ty)))

    def to_dict(self) -> dict:
        return {
            "linear": self.name,
            "matrix": [list(self.linear[:2]), list(self.linear[2:])],
            "translation": [_coord_json(self.translation.x), _coord_json(self.translation.y)],
        }


def _coord_json(v: Coord):
    return str(v) if isinstance(v, Fraction) else float(v)


def apply_isometry(iso: IsometryMap, p: TorusPoint) -> TorusPoint:
    x, y = _apply_linear(iso.linear, p.x, p.y)
    t = iso.translation
    return wrap(coerce_pair(x + t.x, y + t.y))


def _points_of(cfg) -> Sequence[TorusPoint]:
    pts = getattr(cfg, "points", cfg)
    return [wrap(p) for p in pts]


def _coord_gap(p: TorusPoint, q: TorusPoint) -> Coord:
    d = min_displacement(p, q)
    return max(abs(d.dx), abs(d.dy))


def find_isometry(
    a, b, tol: float = 1e-7
) -> Optional[tuple[IsometryMap, tuple[int, ...]]]:
    """Search for an isometry plus relabelling carrying ``a`` onto ``b``.

    Returns ``(iso, perm)`` where ``iso(a[k])`` lies within ``tol`` (per
    coordinate, on the torus) of ``b[perm[k]]``, or ``None``. Point 0 of
    ``a`` is anchored to each point of ``b`` in turn under each of the eight
    linear parts; the rest of the matching is forced.
    """
    pa, pb = _points_of(a), _points_of(b)
    if len(pa) != len(pb):
        raise InvalidInputError(f"configuration sizes differ: {len(pa)} vs {len(pb)}")
    n = len(pa)
    if n == 0:
        return IsometryMap(), ()
    for lin in POINT_GROUP.values():
        ax, ay = _apply_linear(lin, pa[0].x, pa[0].y)
        for j in range(n):
            t = wrap(coerce_pair(pb[j].x - ax, pb[j].y - ay))
            iso = IsometryMap(lin, t)
            perm = _match(iso, pa, pb, tol)
            if perm is not None:
                return iso, perm
    return None


def _match(iso, pa, pb, tol) -> Optional[tuple[int, ...]]:
    used = [False] * len(pb)
    perm = []
    for p in pa:
        img = apply_isometry(iso, p)
        best, best_gap = -1, None
        for m, q in enumerate(pb):
            if used[m]:
                continue
            gap = _coord_gap(img, q)
            if gap <= tol and (best_gap is None or gap < best_gap):
                best, best_gap = m, gap
        if best < 0:
            return None
        used[best] = True
        perm.append(best)
    return tuple(perm)


# ---------------------------------------------------------------------------
# Geodesic segments
# ---------------------------------------------------------------------------


class Segment(NamedTuple):
    start: TorusPoint
    disp: Displacement


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _as_segment(s) -> Segment:
    start, disp = s
    if not isinstance(disp, Displacement):
        dx, dy = coerce_pair(*disp)
        disp = Displacement(dx, dy)
    return Segment(wrap(start), disp)


def _segment_exact(s: Segment) -> bool:
    return s.start.exact and s.disp.exact


def _lift_overlap(a: Coord, b: Coord, c: Coord, d: Coord) -> range:
    """Integer shifts t with [c, d] + t meeting [a, b]."""
    return range(math.ceil(a - d), math.floor(b - c) + 1)


def _interior_hit(ax, ay, rx, ry, cx, cy, sx, sy, eps) -> bool:
    qx, qy = cx - ax, cy - ay
    denom = _cross(rx, ry, sx, sy)
    qr = _cross(qx, qy, rx, ry)
    if abs(denom) <= eps:
        if abs(qr) > eps:
            return False  # parallel, distinct lines
        rr = rx * rx + ry * ry
        t0 = (qx * rx + qy * ry) / rr
        t1 = t0 + (sx * rx + sy * ry) / rr
        lo, hi = min(t0, t1), max(t0, t1)
        return min(hi, 1) - max(lo, 0) > eps
    t = _cross(qx, qy, sx, sy) / denom
    u = qr / denom
    return eps < t < 1 - eps and eps < u < 1 - eps


def segments_cross(s1, s2) -> bool:
    """True iff two geodesic segments meet at a point interior to both.

    Each segment is ``(start, displacement)``. The lift of ``s1`` is tested
    against every lattice translate of the lift of ``s2`` whose bounding box
    overlaps it. Touching at an endpoint is not a crossing; collinear
    overlap of positive length is.
    """
    s1, s2 = _as_segment(s1), _as_segment(s2)
    for s in (s1, s2):
        if s.disp.norm_sq == 0:
            raise InvalidInputError("zero-length segment")
        if s.disp.norm_sq >= 1:
            raise InvalidInputError("segment displacement must have norm < 1")
    exact = _segment_exact(s1) and _segment_exact(s2)
    if exact:
        eps = 0
        a, r, c, s = s1.start, s1.disp, s2.start, s2.disp
        ax, ay, rx, ry = a.x, a.y, r.dx, r.dy
        cx, cy, sx, sy = c.x, c.y, s.dx, s.dy
    else:
        eps = FLOAT_EPS
        ax, ay = float(s1.start.x), float(s1.start.y)
        rx, ry = float(s1.disp.dx), float(s1.disp.dy)
        cx, cy = float(s2.start.x), float(s2.start.y)
        sx, sy = float(s2.disp.dx), float(s2.disp.dy)
    shifts_x = _lift_overlap(min(ax, ax + rx), max(ax, ax + rx), min(cx, cx + sx), max(cx, cx + sx))
    shifts_y = _lift_overlap(min(ay, ay + ry), max(ay, ay + ry), min(cy, cy + sy), max(cy, cy + sy))
    for tx in shifts_x:
        for ty in shifts_y:
            if _interior_hit(ax, ay, rx, ry, cx + tx, cy + ty, sx, sy, eps):
                return True
    return False


def as_points(coords: Iterable) -> list[TorusPoint]:
    return [wrap(c) for c in coords]
