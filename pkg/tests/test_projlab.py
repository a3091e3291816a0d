import random

import pytest
from hypothesis import given, strategies as st

from scrollforge.idealkit import Ideal
from scrollforge.k3pipeline import build_cubic_scroll
from scrollforge.polycore import Ring
from scrollforge.projlab import (
    GeometryError, LinearSubspace, NodeCertificationError, ProjScheme, certify_nodes,
    certify_point_node, certify_smooth, intersection_length, point_data, point_ideal, points_ideal,
    project_from, reduced_scheme, residual, scheme_length, singular_along, singular_locus, span,
)

P = 32003


def plane():
    R = Ring(3, P)
    return R, R.gens()


def test_span_of_two_points():
    R = Ring(6, P)
    X = ProjScheme.from_ideal(points_ideal(R, [(1, 2, 3, 4, 5, 6), (0, 1, 0, 7, 0, 1)]))
    L = span(X)
    assert L.codim == 4


def test_span_of_plane_is_itself():
    R = Ring(6, P)
    x = R.gens()
    Pi = LinearSubspace.from_forms(R, [x[0], x[1] - x[2], x[3]])
    assert span(Pi).same_as(Pi)


def test_project_cubic_scroll_from_disjoint_line():
    sc = build_cubic_scroll(P)
    rng = random.Random(4)
    R = sc.Z.ring
    while True:
        L = LinearSubspace.from_forms(R, [R.linear_form([rng.randrange(P) for _ in range(5)])
                                          for _ in range(3)])
        if ProjScheme.from_ideal(L.ideal + sc.Z.ideal).is_empty():
            break
    img = project_from(sc.Z, L)
    assert img.ideal.is_zero() or all(g.is_zero() for g in img.ideal.gens)


def twisted_cubic():
    R = Ring(4, P)
    a, b, c, d = R.gens()
    return ProjScheme.from_gens(R, [a * c - b ** 2, b * d - c ** 2, a * d - b * c])


def test_project_twisted_cubic_from_point_on_it():
    C = twisted_cubic()
    R = C.ring
    a, b, c, d = R.gens()
    center = LinearSubspace.from_forms(R, [b, c, d])  # the point (1:0:0:0)
    img = project_from(C, center)
    assert img.hilbert_data().degree == 2 and img.dim() == 1
    # oracle: (s^3 : s^2 t : s t^2 : t^3) -> (s^2 t : s t^2 : t^3) ~ (s^2 : s t : t^2)
    for s, t in [(1, 2), (3, 5), (7, 11)]:
        q = (s * s * t % P, s * t * t % P, t ** 3 % P)
        assert all(g.evaluate(q) == 0 for g in img.ideal.gens)


def test_project_a_point():
    R = Ring(4, P)
    X = ProjScheme.from_ideal(point_ideal(R, (1, 2, 3, 4)))
    center = LinearSubspace.from_forms(R, [R.var(1), R.var(2), R.var(3) - R.var(0)])
    img = project_from(X, center)
    assert img.dim() == 0 and img.degree() == 1


def test_project_inside_center():
    R = Ring(4, P)
    X = ProjScheme.from_ideal(point_ideal(R, (1, 0, 0, 0)))
    center = LinearSubspace.from_forms(R, [R.var(1), R.var(2), R.var(3)])
    with pytest.raises(GeometryError):
        project_from(X, center)


def test_singular_locus_of_smooth_conic():
    R, (x, y, z) = plane()
    C = ProjScheme.from_gens(R, [x * z - y ** 2])
    assert singular_locus(C, 1).is_empty()


def test_nodal_cubic():
    R, (x, y, z) = plane()
    F = z * y ** 2 - x ** 3 - x ** 2 * z
    X = ProjScheme.from_gens(R, [F])
    S = singular_locus(X, 1)
    assert scheme_length(S.ideal) == 1
    # oracle: the Jacobian vanishes at (0:0:1)
    assert all(F.diff(i).evaluate((0, 0, 1)) == 0 for i in range(3))
    assert point_data(S.ideal).rational_points == [(0, 0, 1)]
    certs = certify_nodes(X, S)
    assert len(certs) == 1 and certs[0].ok


def test_cusp_is_not_a_node():
    R, (x, y, z) = plane()
    X = ProjScheme.from_gens(R, [z * y ** 2 - x ** 3])
    with pytest.raises(NodeCertificationError):
        certify_nodes(X, singular_locus(X, 1))


def test_space_curve_node():
    # the image of the nodal cubic under a linear embedding into P^3
    R = Ring(4, P)
    x, y, z, w = R.gens()
    X = ProjScheme.from_gens(R, [w - x - y, z * y ** 2 - x ** 3 - x ** 2 * z])
    cert = certify_point_node(X, (0, 0, 1, 0), "curve")
    assert cert.ok


def test_residual_of_two_lines():
    R, (x, y, z) = plane()
    total = ProjScheme.from_gens(R, [x * y])
    line = ProjScheme.from_gens(R, [x])
    assert residual(total, line).same_as(ProjScheme.from_gens(R, [y]))
    with pytest.raises(GeometryError):
        residual(line, ProjScheme.from_gens(R, [z]))


def test_intersection_of_lines():
    R, (x, y, z) = plane()
    assert intersection_length(ProjScheme.from_gens(R, [x - 3 * y]), ProjScheme.from_gens(R, [y + z])) == 1
    with pytest.raises(GeometryError):
        intersection_length(ProjScheme.from_gens(R, [x]), ProjScheme.from_gens(R, [x]))


def non_residue(p):
    return next(a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1)


def test_point_data_irrational_orbit():
    R, (x, y, z) = plane()
    a = non_residue(P)
    data = point_data(Ideal(R, [x ** 2 - a * z ** 2, y]))
    assert (data.length, data.distinct, data.rational_points) == (2, 2, [])
    assert data.orbit_sizes == (2,)


def test_reduced_scheme_removes_nilpotents():
    R, (x, y, z) = plane()
    fat = Ideal(R, [x ** 2, y])
    red = reduced_scheme(fat)
    assert scheme_length(fat) == 2 and scheme_length(red) == 1
    assert red == Ideal(R, [x, y])
    pts = points_ideal(R, [(1, 2, 3), (4, 5, 1), (0, 1, 1)])
    assert reduced_scheme(pts) == pts


def test_singular_along_exact():
    R, (x, y, z) = plane()
    X = ProjScheme.from_gens(R, [z * y ** 2 - x ** 3 - x ** 2 * z])
    assert singular_along(X, point_ideal(R, (0, 0, 1)))
    assert not singular_along(X, point_ideal(R, (0, 1, 0)))


def test_certify_smooth():
    assert certify_smooth(twisted_cubic())
    R, (x, y, z) = plane()
    assert not certify_smooth(ProjScheme.from_gens(R, [z * y ** 2 - x ** 3]))
    sc = build_cubic_scroll(P)
    assert certify_smooth(sc.Z)


@given(st.integers(0, 10 ** 6))
def test_projection_vanishes_on_image_points(seed):
    rng = random.Random(seed)
    C = twisted_cubic()
    R = C.ring
    center = LinearSubspace.from_forms(R, [R.linear_form([rng.randrange(P) for _ in range(4)])
                                           for _ in range(3)])
    lin = center.forms()
    # center is a point; skip the rare case where it lies on the curve
    if C.contains(center):
        return
    img = project_from(C, center)
    for _ in range(3):
        s, t = rng.randrange(P), rng.randrange(P)
        q = (s ** 3, s * s * t, s * t * t, t ** 3)
        v = tuple(l.evaluate(q) for l in lin)
        if any(v):
            assert all(g.evaluate(v) == 0 for g in img.ideal.gens)


@given(st.integers(0, 10 ** 6))
def test_span_idempotent_and_monotone(seed):
    rng = random.Random(seed)
    R = Ring(5, P)
    pts = [tuple(rng.randrange(P) for _ in range(5)) for _ in range(3)]
    small = ProjScheme.from_ideal(points_ideal(R, pts[:2]))
    big = ProjScheme.from_ideal(points_ideal(R, pts))
    L = span(small)
    assert span(L).same_as(L)
    assert span(big).contains(L)


@given(st.integers(0, 10 ** 6))
def test_residual_degrees_on_plane(seed):
    rng = random.Random(seed)
    R, _ = plane()
    f, g = R.random_poly(rng, 1), R.random_poly(rng, 2)
    total = ProjScheme.from_gens(R, [f * g])
    res = residual(total, ProjScheme.from_gens(R, [f]))
    assert res.same_as(ProjScheme.from_gens(R, [g]))
    assert res.degree() + 1 == total.degree()
