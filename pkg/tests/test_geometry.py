import math

import numpy as np
import pytest
from gmpy2 import mpq

from cornerscatter.errors import DegenerateTangents, GeometryError, InvalidProfile, SideMismatch
from cornerscatter.geometry import (
    ArcPiece,
    BoundaryCurve,
    CircularCap,
    GraphPiece,
    PolarPiece,
    TurningPiece,
    build_corner_domain,
    check_independent,
    disk,
    germ_from_json,
    make_analytic_arc,
    make_strong_corner,
    make_weak_profile,
    profile_normal,
)

# -- exact germs ----------------------------------------------------------------


@pytest.mark.parametrize("args,beta", [((1, 2, -1, 2), 2), ((1, 2, 1, 3), 2), ((2, 3, 0, 5), 3),
                                       ((0, 4, 1, 3), 3), ((1, 3, -2, 5), 3)])
def test_singularity_order(args, beta):
    assert make_weak_profile(*args).beta == beta


@pytest.mark.parametrize("args", [(1, 1, -1, 2), (1, 2, 1, 2), (0, 2, 0, 3), (1, 2.5, 1, 3), (0.5, 2, 1, 3),
                                  ("x", 2, 1, 3)])
def test_invalid_profiles(args):
    with pytest.raises(InvalidProfile):
        make_weak_profile(*args)


def test_profile_accepts_exact_fractions():
    p = make_weak_profile("2/3", 2, mpq(-1, 4), 3)
    assert p.c1 == mpq(2, 3) and p.side(2) == (mpq(-1, 4), 3)
    with pytest.raises(ValueError):
        p.side(3)


def test_profile_normal_and_side_mismatch():
    p = make_weak_profile(1, 2, -1, 3)
    assert profile_normal(p, 1, mpq(1, 2)) == (mpq(1), mpq(-1))
    assert profile_normal(p, 2, -1) == (mpq(-3), mpq(-1))
    assert profile_normal(p, 1, 0) == (mpq(0), mpq(-1))
    with pytest.raises(SideMismatch):
        profile_normal(p, 1, -1)
    with pytest.raises(SideMismatch):
        profile_normal(p, 2, mpq(1, 3))


def test_strong_corner_validation():
    corner = make_strong_corner(0, 1)
    assert corner.tangents() == ((1, 0), (1, 1))
    with pytest.raises(InvalidProfile):
        make_strong_corner(2, 2)
    with pytest.raises(InvalidProfile):
        make_strong_corner([1, 1], [0, 2])
    with pytest.raises(InvalidProfile):
        make_analytic_arc([1, 0])
    with pytest.raises(DegenerateTangents):
        check_independent((1, 2), (-2, -4))


@pytest.mark.parametrize("germ", [make_weak_profile(1, 2, -1, 3), make_strong_corner([0, 1, mpq(1, 2)], -2),
                                  make_analytic_arc([0, 1, 1])])
def test_germ_json_roundtrip(germ):
    assert germ_from_json(germ.to_json()) == germ
    with pytest.raises(InvalidProfile):
        germ_from_json({"kind": "spline"})


# -- numeric pieces ----------------------------------------------------------------


PIECES = [
    GraphPiece((0.0, 0.5, -1.0, 2.0), -1.0, 0.5),
    ArcPiece((0.3, -0.2), 1.5, 0.4, 2.0),
    PolarPiece((0.0, 0.5), 0.3, 2.5, (1.2, -0.4, 0.8), (0.9, 0.2, -1.5)),
    TurningPiece((0.0, 0.0), 3.0, 0.2, 4.0, 0.7, -0.3, (0.2, -0.1, 0.05)),
]


@pytest.mark.parametrize("piece", PIECES, ids=lambda p: type(p).__name__)
def test_piece_derivatives_match_finite_differences(piece):
    t = np.linspace(0.05, 0.95, 13)
    h = 1e-5
    pos, vel, acc = piece.evaluate(t)
    pp, vp, _ = piece.evaluate(t + h)
    pm, vm, _ = piece.evaluate(t - h)
    np.testing.assert_allclose((pp - pm) / (2 * h), vel, atol=1e-7)
    np.testing.assert_allclose((vp - vm) / (2 * h), acc, atol=1e-6)


def test_polar_piece_matches_its_end_jets():
    piece = PIECES[2]
    for t, jet in ((0.0, piece.jet_start), (1.0, piece.jet_end)):
        got = [float(piece.radius(np.array([t]), k)[0]) for k in range(3)]
        np.testing.assert_allclose(got, jet, atol=1e-12)


def test_turning_piece_keeps_end_angles():
    piece = PIECES[3]
    assert piece.angle(np.array([0.0]))[0] == pytest.approx(piece.theta0)
    assert piece.angle(np.array([1.0]))[0] == pytest.approx(piece.theta0 + piece.turn)
    # end curvatures are set by the cubic terms alone
    assert piece.angle(np.array([0.0]), 1)[0] == pytest.approx(piece.turn + piece.cp)
    assert piece.angle(np.array([1.0]), 1)[0] == pytest.approx(piece.turn + piece.cq)


# -- closed curves --------------------------------------------------------------------


def _tangent_and_curvature(piece, t):
    _, v, a = piece.evaluate(np.array([t]))
    v, a = v[0], a[0]
    speed = np.linalg.norm(v)
    return v / speed, (v[0] * a[1] - v[1] * a[0]) / speed**3


def _assert_c2_junction(left_piece, right_piece):
    ta, ka = _tangent_and_curvature(left_piece, 1.0)
    tb, kb = _tangent_and_curvature(right_piece, 0.0)
    np.testing.assert_allclose(ta, tb, atol=1e-9)
    assert ka == pytest.approx(kb, abs=1e-7)


GERMS = [make_weak_profile(1, 2, -1, 2), make_weak_profile(1, 2, 1, 3), make_weak_profile(2, 3, 0, 5),
         make_weak_profile(1, 3, -2, 5), make_strong_corner(0, 1), make_strong_corner(0, 2),
         make_strong_corner(1, -1)]


@pytest.fixture(scope="module")
def domains():
    return [build_corner_domain(g) for g in GERMS]


def test_corner_domains_are_closed_simple_and_marked(domains):
    for dom in domains:
        assert len(dom.pieces) == 3
        assert dom.corner_points == (1,)
        np.testing.assert_allclose(dom.corner_locations(), [[0.0, 0.0]], atol=1e-15)
        assert dom.signed_area > 0
        assert dom.diameter() < 20


def test_cap_meets_the_germ_with_second_order_contact(domains):
    for dom in domains:
        left, right, cap = dom.pieces
        _assert_c2_junction(right, cap)
        _assert_c2_junction(cap, left)


def test_weak_corner_is_c1_but_not_c2(domains):
    left, right, _ = domains[0].pieces
    ta, ka = _tangent_and_curvature(left, 1.0)
    tb, kb = _tangent_and_curvature(right, 0.0)
    np.testing.assert_allclose(ta, tb, atol=1e-15)
    assert abs(ka - kb) > 1


def test_strong_corner_has_a_tangent_jump(domains):
    left, right, _ = domains[4].pieces
    ta, _ = _tangent_and_curvature(left, 1.0)
    tb, _ = _tangent_and_curvature(right, 0.0)
    assert math.degrees(math.acos(float(ta @ tb))) == pytest.approx(45.0)


def test_polar_cap_by_center():
    dom = build_corner_domain(make_weak_profile(1, 2, -1, 2), CircularCap((-1.0, 0.25)))
    left, right, cap = dom.pieces
    assert isinstance(cap, PolarPiece)
    _assert_c2_junction(right, cap)
    _assert_c2_junction(cap, left)


@pytest.mark.parametrize("center", [(0.0, 0.0), (0.5, 0.25), (0.0, 0.5)])
def test_bad_cap_centers(center):
    with pytest.raises(GeometryError):
        build_corner_domain(make_weak_profile(1, 2, -1, 2), CircularCap(center))


def test_corner_domain_needs_a_corner_germ():
    with pytest.raises(GeometryError):
        build_corner_domain(make_analytic_arc([0, 1]))


def test_disk():
    d = disk(2.0, (1.0, -1.0))
    assert d.corner_points == ()
    assert d.piece_lengths()[0] == pytest.approx(4 * math.pi)
    assert d.signed_area == pytest.approx(4 * math.pi, rel=1e-4)
    assert d.diameter() == pytest.approx(4.0, rel=1e-3)
    with pytest.raises(GeometryError):
        disk(0.0)


def test_boundary_curve_rejections():
    with pytest.raises(GeometryError):
        BoundaryCurve(())
    with pytest.raises(GeometryError):
        BoundaryCurve((ArcPiece((0.0, 0.0), 1.0, 0.0, math.pi),))
    with pytest.raises(GeometryError):
        BoundaryCurve((ArcPiece((0.0, 0.0), 1.0, 0.0, -2 * math.pi),))
    with pytest.raises(GeometryError):
        BoundaryCurve((ArcPiece((0.0, 0.0), 1.0, 0.0, 4 * math.pi),))
    with pytest.raises(GeometryError):
        BoundaryCurve((ArcPiece((0.0, 0.0), 1.0, 0.0, 2 * math.pi),), corner_points=(3,))
    loop = PolarPiece((0.0, 0.0), 0.0, 2 * math.pi, (1.0, 0.0, 0.0), (1.0, 0.0, 0.0))
    assert BoundaryCurve((loop,)).signed_area == pytest.approx(math.pi, rel=1e-4)


def _segment(a, b):
    d = np.subtract(b, a)
    return TurningPiece(tuple(a), float(np.hypot(*d)), math.atan2(d[1], d[0]), 0.0, 0.0, 0.0)


def test_self_intersecting_curve_is_rejected():
    corners = [(-1.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0)]
    bowtie = tuple(_segment(corners[i], corners[(i + 1) % 4]) for i in range(4))
    with pytest.raises(GeometryError, match="intersects"):
        BoundaryCurve(bowtie)
    square = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
    curve = BoundaryCurve(tuple(_segment(square[i], square[(i + 1) % 4]) for i in range(4)), corner_points=(0, 1, 2, 3))
    assert curve.signed_area == pytest.approx(4.0, rel=1e-3)
