import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtchains.hyperbolic import (
    IDENTITY,
    TAU,
    Isometry,
    apply,
    classify,
    direction_at,
    dist,
    oriented_angle,
    point_at,
    rotation_about,
    side_from_angles,
    triangle_area,
    triangle_from_angles,
    unsigned_angle,
)


@st.composite
def points(draw):
    x = draw(st.floats(-5, 5, allow_nan=False))
    y = draw(st.floats(0.05, 20, allow_nan=False))
    return complex(x, y)


@st.composite
def isometries(draw):
    """Random products of a rotation and an upper-triangular frame."""
    p = draw(points())
    theta = draw(st.floats(0.01, TAU - 0.01))
    q = draw(points())
    y = q.imag
    frame = Isometry(math.sqrt(y), q.real / math.sqrt(y), 0.0, 1.0 / math.sqrt(y))
    return frame * rotation_about(p, theta)


def test_apply_inversion():
    g = Isometry(0.0, -1.0, 1.0, 0.0)  # z -> -1/z
    assert apply(g, 2j) == pytest.approx(0.5j)


def test_determinant_is_renormalized():
    g = Isometry(2.0, 0.0, 0.0, 2.0)
    assert g.a == pytest.approx(1.0)
    assert g.d == pytest.approx(1.0)


def test_orientation_reversing_rejected():
    with pytest.raises(ValueError):
        Isometry(1.0, 0.0, 0.0, -1.0)


def test_dist_unit_along_axis():
    # arc of the vertical geodesic from i to e*i has length exactly 1
    assert dist(1j, 1j * math.e) == pytest.approx(1.0, abs=1e-14)


def test_dist_frozen_value():
    # acosh(1 + |p-q|^2 / (2 Im p Im q)) evaluated separately
    assert dist(1j, 1 + 2j) == pytest.approx(0.9624236501192069, abs=1e-14)


def test_rotation_about_i_quarter_turn():
    g = rotation_about(1j, math.pi / 2)
    r = math.sqrt(2) / 2
    assert g.a == pytest.approx(r)
    assert g.b == pytest.approx(r)
    assert g.c == pytest.approx(-r)
    assert g.d == pytest.approx(r)


def test_rotation_about_off_axis_half_turn():
    # hand-multiplied T R(pi) T^{-1} for p = 1 + 2i
    g = rotation_about(1 + 2j, math.pi)
    assert g.a == pytest.approx(-0.5)
    assert g.b == pytest.approx(2.5)
    assert g.c == pytest.approx(-0.5)
    assert g.d == pytest.approx(0.5)


def test_classify_elliptic_roundtrip():
    for theta in (0.3, 1.0, math.pi, 5.0, TAU - 0.3):
        for p in (1j, 1 + 2j, -3 + 0.25j):
            cls = classify(rotation_about(p, theta))
            assert cls.kind == "elliptic"
            assert cls.angle == pytest.approx(theta, abs=1e-9)
            assert abs(cls.fixed_point - p) < 1e-9
            assert not cls.near_boundary


def test_classify_hyperbolic():
    cls = classify(Isometry(2.0, 1.0, 1.0, 1.0))
    assert cls.kind == "hyperbolic"
    assert cls.translation_length == pytest.approx(1.9248473002384139)


def test_classify_parabolic_and_identity_flags():
    par = classify(Isometry(1.0, 1.0, 0.0, 1.0))
    assert par.kind == "parabolic"
    assert par.near_boundary
    ident = classify(IDENTITY)
    assert ident.kind == "identity"
    assert ident.near_boundary
    # -I is I in PSL(2,R)
    assert classify(Isometry(-1.0, 0.0, 0.0, -1.0)).kind == "identity"


def test_classify_angle_sign_stable_under_negation():
    g = rotation_about(0.5 + 1.5j, 2 * math.pi - 0.1)
    h = Isometry(-g.a, -g.b, -g.c, -g.d)
    assert classify(g).angle == pytest.approx(classify(h).angle)
    assert classify(g).angle == pytest.approx(2 * math.pi - 0.1)


def test_directions_at_i():
    assert direction_at(1j, 2j) == pytest.approx(0.0)  # north
    assert direction_at(1j, 0.5j) == pytest.approx(math.pi)  # south
    # east along the unit half-circle
    e = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
    assert direction_at(1j, e) == pytest.approx(-math.pi / 2)
    # west
    w = complex(-math.cos(math.pi / 4), math.sin(math.pi / 4))
    assert direction_at(1j, w) == pytest.approx(math.pi / 2)


def test_oriented_angle_north_to_east():
    e = complex(math.cos(1.0), math.sin(1.0))
    assert oriented_angle(1j, 2j, e) == pytest.approx(1.5 * math.pi)
    assert oriented_angle(1j, e, 2j) == pytest.approx(0.5 * math.pi)


def test_oriented_angle_degenerate_ray():
    with pytest.raises(ValueError):
        oriented_angle(1j, 1j, 2j)


@given(points(), st.floats(0.01, TAU - 0.01), st.floats(0.05, 3.0))
@settings(max_examples=60, deadline=None)
def test_point_at_consistency(p, psi, s):
    q = point_at(p, psi, s)
    assert dist(p, q) == pytest.approx(s, abs=1e-9)
    got = direction_at(p, q) % TAU
    assert min(abs(got - psi), TAU - abs(got - psi)) < 1e-9


@given(points(), st.floats(0.05, TAU - 0.05), st.floats(0.05, TAU - 0.05), st.floats(0.1, 2.0))
@settings(max_examples=60, deadline=None)
def test_rotation_moves_directions_ccw(p, psi, phi, s):
    q = point_at(p, psi, s)
    q2 = apply(rotation_about(p, phi), q)
    assert dist(q2, point_at(p, psi + phi, s)) < 1e-9


@given(isometries(), isometries(), points())
@settings(max_examples=60, deadline=None)
def test_composition_acts_functorially(g, h, p):
    assert abs(apply(g * h, p) - apply(g, apply(h, p))) < 1e-10


@given(isometries(), points(), points())
@settings(max_examples=60, deadline=None)
def test_dist_isometry_invariant(g, p, q):
    assert dist(apply(g, p), apply(g, q)) == pytest.approx(dist(p, q), abs=1e-9)


def test_side_from_angles_frozen_value():
    assert side_from_angles(math.pi / 4, math.pi / 3, math.pi / 6) == pytest.approx(
        1.3120735182656984, abs=1e-14
    )


def test_side_from_angles_degenerate_sum():
    # angle sum pi means the triangle collapses: zero side
    assert side_from_angles(0.5, 1.0, math.pi - 1.5) == 0.0


def test_triangle_from_angles_realizes_its_angles():
    t1, t2, t3 = 0.4, 0.7, 1.1
    v1, v2, v3 = triangle_from_angles(t1, t2, t3)
    assert v1 == pytest.approx(1j)
    assert v2.real == pytest.approx(0.0, abs=1e-12)  # first edge on the axis
    assert v2.imag > 1.0
    assert unsigned_angle(v1, v2, v3) == pytest.approx(t1, abs=1e-9)
    assert unsigned_angle(v2, v3, v1) == pytest.approx(t2, abs=1e-9)
    assert unsigned_angle(v3, v1, v2) == pytest.approx(t3, abs=1e-9)


def test_triangle_from_angles_is_clockwise():
    # at the first vertex, ccw from the ray to the last vertex to the ray
    # to the next vertex equals the interior angle
    t1, t2, t3 = 0.4, 0.7, 1.1
    v1, v2, v3 = triangle_from_angles(t1, t2, t3)
    assert oriented_angle(v1, v3, v2) == pytest.approx(t1, abs=1e-9)
    assert oriented_angle(v2, v1, v3) == pytest.approx(t2, abs=1e-9)
    assert oriented_angle(v3, v2, v1) == pytest.approx(t3, abs=1e-9)


def test_triangle_area_is_angle_defect():
    tri = triangle_from_angles(0.4, 0.7, 1.1)
    assert triangle_area(tri) == pytest.approx(math.pi - 2.2, abs=1e-9)


def test_triangle_area_degenerate():
    assert triangle_area((1j, 1j, 2j)) == 0.0


@given(isometries())
@settings(max_examples=40, deadline=None)
def test_triangle_area_isometry_invariant(g):
    tri = triangle_from_angles(0.5, 0.6, 0.9)
    moved = tuple(apply(g, v) for v in tri)
    assert triangle_area(moved) == pytest.approx(triangle_area(tri), abs=1e-9)


def test_triangle_from_angles_rejects_bad_input():
    with pytest.raises(ValueError):
        triangle_from_angles(1.5, 1.5, 1.5)
    with pytest.raises(ValueError):
        triangle_from_angles(-0.1, 0.5, 0.5)


@given(isometries())
@settings(max_examples=40, deadline=None)
def test_classify_then_rebuild_elliptic(g):
    p = 0.7 + 1.3j
    e = rotation_about(p, 2.1)
    h = g * e * g.inverse()
    cls = classify(h)
    assert cls.kind == "elliptic"
    rebuilt = rotation_about(cls.fixed_point, cls.angle)
    scale = max(1.0, abs(h.a), abs(h.b), abs(h.c), abs(h.d))
    # locating the fixed point cancels (d-a)^2 + 4bc down to an O(1)
    # discriminant, so the round-trip error grows with scale^2
    assert h.dist_to(rebuilt) < max(1e-9 * scale, 1e-10 * scale * scale)
