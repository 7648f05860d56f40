import itertools
import math
import random
from fractions import Fraction as F

import pytest

from toruspenny.catalog import k5_config, k33_config
from toruspenny.errors import DegeneratePairError, InvalidInputError, ModeError
from toruspenny.geometry import (
    POINT_GROUP,
    Displacement,
    IsometryMap,
    TorusPoint,
    apply_isometry,
    distance_multiplicity,
    find_isometry,
    min_displacement,
    realizing_displacements,
    segments_cross,
    torus_distance,
    wrap,
)
from toruspenny.packing import Configuration


def brute_sq(p, q, reach=2):
    """Shortest squared lift over offsets in {-reach..reach}^2."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    return min(
        (dx + mx) ** 2 + (dy + my) ** 2
        for mx in range(-reach, reach + 1)
        for my in range(-reach, reach + 1)
    )


def rand_point(rng):
    return TorusPoint(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))


# -- wrap ------------------------------------------------------------------


def test_wrap_float():
    p = wrap((0.7, -0.6))
    assert p.x == pytest.approx(-0.3, abs=1e-15)
    assert p.y == pytest.approx(0.4, abs=1e-15)


def test_wrap_half_open_boundary():
    assert wrap((F(-1, 2), F(1, 2))) == TorusPoint(F(-1, 2), F(-1, 2))


def test_wrap_keeps_canonical_rational():
    p = wrap((F(13, 36), F(-13, 36)))
    assert (p.x, p.y) == (F(13, 36), F(-13, 36))
    assert p.exact


@pytest.mark.parametrize("bad", [(math.nan, 0.0), (0.0, math.inf), (-math.inf, 1.0)])
def test_wrap_rejects_non_finite(bad):
    with pytest.raises(InvalidInputError):
        wrap(bad)


def test_wrap_idempotent_on_awkward_floats():
    for v in (0.5, -0.5, 0.49999999999999994, -0.5000000000000001, 1e-300, -1e-300, 2.5, -7.5):
        p = wrap((v, -v))
        assert -0.5 <= p.x < 0.5 and -0.5 <= p.y < 0.5
        assert wrap((p.x, p.y)) == p


def test_torus_point_rejects_non_canonical():
    with pytest.raises(InvalidInputError):
        TorusPoint(0.5, 0.0)


def test_exact_and_float_agree():
    p = TorusPoint(F(13, 36), F(-11, 36))
    q = p.to_float()
    assert abs(q.x - 13 / 36) <= 1e-15 and abs(q.y + 11 / 36) <= 1e-15


# -- min_displacement / distance ----------------------------------------------


def test_min_displacement_k5_pair():
    d = min_displacement(TorusPoint(F(-2, 5), F(2, 5)), TorusPoint(F(0), F(-2, 5)))
    assert (d.dx, d.dy) == (F(2, 5), F(1, 5))
    assert d.offset == (0, 1)


def test_min_displacement_identity():
    p = TorusPoint(0.1, -0.2)
    d = min_displacement(p, p)
    assert (d.dx, d.dy, d.offset) == (0, 0, (0, 0))


def test_min_displacement_wraps():
    d = min_displacement(TorusPoint(0.45, 0.0), TorusPoint(-0.45, 0.0))
    assert d.dx == pytest.approx(0.1, abs=1e-15)
    assert d.dy == 0
    assert d.offset == (1, 0)


def test_torus_distance_examples():
    k5, k33 = k5_config().points, k33_config().points
    assert torus_distance(k5[0], k5[1]) == pytest.approx(1 / math.sqrt(5), abs=1e-15)
    assert torus_distance(k5[0], k5[1], exact=True) == F(1, 5)
    assert torus_distance(k33[0], k33[1], exact=True) == F(25, 162)
    assert torus_distance(k33[2], k33[2]) == 0


def test_torus_distance_exact_needs_rationals():
    with pytest.raises(ModeError):
        torus_distance(TorusPoint(0.1, 0.1), TorusPoint(0.2, 0.2), exact=True)


def test_per_coordinate_matches_brute_force():
    rng = random.Random(11)
    for _ in range(10_000):
        p, q = rand_point(rng), rand_point(rng)
        d = min_displacement(p, q)
        assert abs(d.norm_sq - brute_sq((p.x, p.y), (q.x, q.y))) <= 1e-15
        assert abs(d.dx) <= 0.5 and abs(d.dy) <= 0.5


def test_metric_properties():
    rng = random.Random(5)
    for _ in range(10_000):
        p, q, r = rand_point(rng), rand_point(rng), rand_point(rng)
        pq = torus_distance(p, q)
        assert pq == torus_distance(q, p)
        assert pq <= math.sqrt(2) / 2 + 1e-15
        assert pq <= torus_distance(p, r) + torus_distance(r, q) + 1e-12


# -- multiplicity ----------------------------------------------------------


def test_multiplicity_examples():
    o = TorusPoint(F(0), F(0))
    assert distance_multiplicity(o, TorusPoint(F(-1, 2), F(0))) == 2
    assert distance_multiplicity(o, TorusPoint(F(-1, 2), F(-1, 2))) == 4
    k5 = k5_config().points
    assert distance_multiplicity(k5[0], k5[1]) == 1


def test_multiplicity_offsets_for_half_shift():
    o = TorusPoint(0.0, 0.0)
    offs = {d.offset for d in realizing_displacements(o, TorusPoint(-0.5, 0.0))}
    assert offs == {(0, 0), (1, 0)}


def test_multiplicity_degenerate_pair():
    p = TorusPoint(0.25, 0.25)
    with pytest.raises(DegeneratePairError):
        distance_multiplicity(p, p)


# -- isometries --------------------------------------------------------------


def test_apply_isometry_examples():
    p = TorusPoint(F(1, 5), F(1, 5))
    assert apply_isometry(IsometryMap(), p) == p
    assert apply_isometry(IsometryMap.from_name("rot90"), TorusPoint(F(1, 5), F(0))) == TorusPoint(F(0), F(1, 5))
    shift = IsometryMap.from_name("identity", (F(1, 2), F(0)))
    assert apply_isometry(shift, TorusPoint(F(1, 4), F(0))) == TorusPoint(F(-1, 4), F(0))


def test_point_group_is_closed():
    isos = [IsometryMap.from_name(n) for n in POINT_GROUP]
    names = set(POINT_GROUP)
    for a, b in itertools.product(isos, isos):
        assert a.compose(b).name in names


def test_inverse_and_compose_exact():
    rng = random.Random(2)
    for name in POINT_GROUP:
        t = (F(rng.randint(-18, 17), 36), F(rng.randint(-18, 17), 36))
        g = IsometryMap.from_name(name, t)
        p = TorusPoint(F(rng.randint(-18, 17), 36), F(rng.randint(-18, 17), 36))
        assert g.inverse()(g(p)) == p
        assert g.compose(g.inverse())(p) == p


def test_isometries_preserve_distance():
    rng = random.Random(3)
    names = list(POINT_GROUP)
    for _ in range(2000):
        g = IsometryMap.from_name(rng.choice(names), (rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)))
        p, q = rand_point(rng), rand_point(rng)
        assert abs(torus_distance(g(p), g(q)) - torus_distance(p, q)) <= 1e-12


def test_isometry_exact_distance_preserved():
    g = IsometryMap.from_name("reflect_diagonal", (F(1, 7), F(-2, 9)))
    pts = k33_config().points
    for p, q in itertools.combinations(pts, 2):
        assert torus_distance(g(p), g(q), exact=True) == torus_distance(p, q, exact=True)


def test_rejects_non_lattice_linear_part():
    with pytest.raises(InvalidInputError):
        IsometryMap((2, 0, 0, 1))


def test_find_isometry_rotation_reversed():
    a = k33_config()
    rot = IsometryMap.from_name("rot90")
    b = Configuration([rot(p) for p in reversed(a.points)], exact=True)
    found = find_isometry(a, b)
    assert found is not None
    iso, perm = found
    for i, p in enumerate(a.points):
        q = iso(p)
        assert q == b.points[perm[i]]


def test_find_isometry_size_mismatch():
    with pytest.raises(InvalidInputError):
        find_isometry(k5_config(), k33_config())


def test_find_isometry_rejects_small_perturbation():
    a = k33_config().to_float()
    pts = list(a.points)
    pts[2] = TorusPoint(pts[2].x + 1e-3, pts[2].y)
    assert find_isometry(a, Configuration(pts), tol=1e-9) is None


def test_find_isometry_random_six_point():
    rng = random.Random(8)
    names = list(POINT_GROUP)
    for _ in range(100):
        pts = [rand_point(rng) for _ in range(6)]
        g = IsometryMap.from_name(rng.choice(names), (rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)))
        img = [g(p) for p in pts]
        rng.shuffle(img)
        assert find_isometry(Configuration(pts), Configuration(img), tol=1e-7) is not None


# -- segments ---------------------------------------------------------------


def seg(x, y, dx, dy):
    return (TorusPoint(x, y), Displacement(dx, dy))


def test_plus_sign_crosses():
    assert segments_cross(seg(-0.25, 0.0, 0.5, 0.0), seg(0.0, -0.25, 0.0, 0.5))


def test_parallel_segments_do_not_cross():
    assert not segments_cross(seg(-0.25, 0.0, 0.5, 0.0), seg(-0.25, 0.25, 0.5, 0.0))


def test_wrapping_crossing():
    assert segments_cross(seg(0.4, 0.0, 0.2, 0.0), seg(-0.45, -0.1, 0.0, 0.2))


def test_shared_endpoint_not_a_crossing():
    a = (TorusPoint(F(0), F(0)), Displacement(F(1, 4), F(0)))
    b = (TorusPoint(F(0), F(0)), Displacement(F(0), F(1, 4)))
    assert not segments_cross(a, b)
    c = (TorusPoint(F(1, 4), F(0)), Displacement(F(0), F(1, 4)))
    assert not segments_cross(a, c)


def test_touching_interior_to_endpoint_not_a_crossing():
    a = (TorusPoint(F(-1, 4), F(0)), Displacement(F(1, 2), F(0)))
    t = (TorusPoint(F(0), F(0)), Displacement(F(0), F(1, 4)))
    assert not segments_cross(a, t)


def test_collinear_overlap_counts():
    a = (TorusPoint(F(-1, 4), F(0)), Displacement(F(1, 2), F(0)))
    b = (TorusPoint(F(0), F(0)), Displacement(F(1, 2), F(0)))
    assert segments_cross(a, b)


def test_segment_errors():
    with pytest.raises(InvalidInputError):
        segments_cross(seg(0.0, 0.0, 0.0, 0.0), seg(0.1, 0.1, 0.1, 0.0))
    with pytest.raises(InvalidInputError):
        segments_cross(seg(0.0, 0.0, 1.0, 0.0), seg(0.1, 0.1, 0.1, 0.0))


def test_long_segments_cross():
    a = (TorusPoint(F(-2, 5), F(-2, 5)), Displacement(F(9, 10), F(0)))
    b = (TorusPoint(F(-1, 5), F(1, 5)), Displacement(F(0), F(-9, 10)))
    assert segments_cross(a, b)
