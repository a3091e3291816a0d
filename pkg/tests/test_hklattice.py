from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from scrollforge import hklattice as hk
from scrollforge.hklattice import CURVE, DIVISOR, DoublePointInput, LatticeClass


def test_form_values():
    assert hk.bb_q(hk.delta_p()) == Fraction(-1, 2)
    assert hk.bb_q(hk.f_p()) == 42
    assert hk.bb_q(hk.f_p(), hk.delta_p()) == 0
    assert hk.bb_q(hk.delta()) == -2
    assert hk.bb_q(LatticeClass(3, -27, CURVE)) == Fraction(27, 2)
    assert hk.bb_q(LatticeClass(55, -252, DIVISOR)) == 42 == hk.bb_q(hk.f())
    assert hk.bb_q(hk.plucker_class()) == 6


def test_mixed_sides_rejected():
    with pytest.raises(ValueError):
        hk.bb_q(hk.f(), hk.f_p())
    with pytest.raises(ValueError):
        hk.pair(hk.f_p(), hk.f())
    with pytest.raises(ValueError):
        LatticeClass(1, 1, "other")


def test_pairing_table():
    assert hk.pair(hk.f(), hk.f_p()) == 42
    assert hk.pair(hk.delta(), hk.delta_p()) == -1
    assert hk.pair(hk.f(), hk.delta_p()) == 0 == hk.pair(hk.delta(), hk.f_p())
    assert hk.pair(LatticeClass(2, -9), hk.delta_p()) == 9


def test_plucker_degrees():
    assert hk.plucker_degree(hk.delta_p()) == 9
    assert hk.plucker_degree(LatticeClass(6, -55, CURVE)) == 9
    assert hk.plucker_degree(hk.f_p()) == 84


def test_degree9_enumeration():
    got = {str(c.cls): (c.q, c.r_squared, c.accepted) for c in hk.enumerate_degree9()}
    assert got == {
        "δ_p": (Fraction(-1, 2), 41, True),
        "3f_p-27δ_p": (Fraction(27, 2), 27, False),
        "6f_p-55δ_p": (Fraction(-1, 2), 41, True),
    }
    assert hk.lattice_discriminant(((3, 9), (9, 41))) == 42
    assert hk.required_self_intersection(42) == 41


def test_degree9_enumeration_exhaustive():
    brute = set()
    for a in range(-100, 101):
        for b in range(-1000, 1001):
            c = LatticeClass(a, b, CURVE)
            if hk.plucker_degree(c) == 9 and hk.bb_q(c) >= Fraction(-5, 2):
                brute.add((a, b))
    assert brute == {(c.cls.a, c.cls.b) for c in hk.enumerate_degree9()}


def test_double_points():
    assert hk.double_points(DoublePointInput(41, 9, 8, -11, 4)).value == 8
    assert hk.double_points(DoublePointInput(0, 0, 0, 0, 0)).value == 0
    assert hk.double_points(DoublePointInput(27, 9, 8, -11, 4)).value == 1
    half = hk.double_points(DoublePointInput(28, 9, 8, -11, 4))
    assert not half.integral and half.value == Fraction(3, 2)


@given(*[st.integers(-50, 50)] * 5)
def test_double_points_affine(r, h, k, hk_, chi):
    base = hk.double_points(DoublePointInput(r, h, k, hk_, chi)).value
    bumped = hk.double_points(DoublePointInput(r + 2, h, k, hk_, chi)).value
    assert bumped - base == 1


def test_hassett_examples():
    for d in (14, 26, 42):
        v = hk.hassett_verdict(d)
        assert (v.divisorial, v.k3_associated) == (True, True)
    assert [2 * (n * n + n + 1) for n in (2, 3, 4)] == [14, 26, 42]
    v = hk.hassett_verdict(8)
    assert (v.divisorial, v.k3_associated) == (True, False)
    assert not hk.hassett_verdict(6).divisorial
    with pytest.raises(ValueError):
        hk.hassett_verdict(0)


@given(st.integers(1, 2000))
def test_hassett_implication(d):
    v = hk.hassett_verdict(d)
    assert not v.k3_associated or v.divisorial


def test_involution():
    r = hk.involution_transport
    assert r(hk.delta()) == LatticeClass(12, -55, DIVISOR)
    assert r(hk.f()) == LatticeClass(55, -252, DIVISOR)
    assert r(hk.delta_p()) == LatticeClass(6, -55, CURVE)
    M = hk.DIVISOR_INVOLUTION
    assert hk.matmul2(M, M) == ((1, 0), (0, 1))
    N = hk.curve_involution()
    assert hk.matmul2(N, N) == ((1, 0), (0, 1))
    assert all(isinstance(v, int) for row in N for v in row)
    with pytest.raises(ValueError):
        r(hk.f(), "sideways")


@given(st.integers(-1000, 1000), st.integers(-1000, 1000), st.sampled_from([DIVISOR, CURVE]))
def test_involution_isometry(a, b, side):
    x = LatticeClass(a, b, side)
    y = hk.involution_transport(x)
    assert hk.bb_q(y) == hk.bb_q(x)
    assert hk.involution_transport(y, "pull") == x


@given(st.integers(-100, 100), st.integers(-100, 100), st.integers(-100, 100), st.integers(-100, 100))
def test_pairing_compatible_with_involution(a, b, c, d):
    D, C = LatticeClass(a, b, DIVISOR), LatticeClass(c, d, CURVE)
    assert hk.pair(hk.involution_transport(D), C) == hk.pair(D, hk.involution_transport(C))


@given(st.integers(-100, 100), st.integers(-100, 100), st.integers(-100, 100), st.integers(-100, 100),
       st.integers(-9, 9))
def test_bilinear_symmetric(a, b, c, d, k):
    x, y = LatticeClass(a, b, CURVE), LatticeClass(c, d, CURVE)
    assert hk.bb_q(x, y) == hk.bb_q(y, x)
    assert hk.bb_q(k * x + y, y) == k * hk.bb_q(x, y) + hk.bb_q(y)
    D = LatticeClass(a, b)
    assert hk.pair(D, x + y) == hk.pair(D, x) + hk.pair(D, y)


def test_census_rows():
    data = hk.census()
    rows = {r["d"]: r for r in data["discriminants"]}
    assert sorted(rows) == list(range(7, 101))
    assert all(rows[d]["k3_associated"] for d in (14, 26, 42))
    assert sum(c["accepted"] for c in data["degree9_classes"]) == 2
    assert data["double_points"]["D"] == "8"
    assert len(data["notes"]) == 2
