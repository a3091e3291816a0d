import random
from itertools import product

import numpy as np
from hypothesis import given, strategies as st

from scrollforge.linalg import rank
from scrollforge.linsys import (
    BaseCondition, PlaneClass, RationalMapModel, class_arithmetic, forms_with_base_conditions,
    image_scheme,
)
from scrollforge.polycore import Ring, monomials
from scrollforge.projlab import point_ideal, points_ideal

P = 32003
ORIGIN = (0, 0, 1)


def plane():
    return Ring(3, P)


def derivative_oracle(ring, d, conds):
    """Dimension of forms of degree ``d`` with all partials of order < m vanishing at each point."""
    mons = list(monomials(3, d))
    rows = []
    for q, m in conds:
        for order in range(m):
            for a, b in product(range(order + 1), repeat=2):
                if a + b != order:
                    continue
                row = []
                for e in mons:
                    f = ring.monomial(e)
                    for _ in range(a):
                        f = f.diff(0)
                    for _ in range(b):
                        f = f.diff(1)
                    row.append(f.evaluate(q))
                rows.append(row)
    if not rows:
        return len(mons)
    return len(mons) - rank(np.array(rows, dtype=np.int64), ring.p)


def test_conics_through_origin():
    R = plane()
    FB = forms_with_base_conditions(R, 2, [BaseCondition(point_ideal(R, ORIGIN))])
    assert FB.dim == 5 and FB.generic


def test_quintics_with_fourfold_point():
    R = plane()
    FB = forms_with_base_conditions(R, 5, [BaseCondition(point_ideal(R, ORIGIN), 4)])
    assert FB.dim == 11


def random_points(rng, n):
    # affine points z = 1 keep the derivative oracle in the chart
    return [(rng.randrange(P), rng.randrange(P), 1) for _ in range(n)]


def test_quartics_through_nine_points():
    R = plane()
    pts = random_points(random.Random(7), 9)
    FB = forms_with_base_conditions(R, 4, [BaseCondition(points_ideal(R, pts))])
    assert FB.dim == 6


@given(st.integers(0, 10 ** 6), st.integers(1, 6), st.integers(1, 3), st.integers(0, 3))
def test_dimension_matches_derivative_oracle(seed, d, m, k):
    rng = random.Random(seed)
    R = plane()
    pts = random_points(rng, k)
    conds = [BaseCondition(point_ideal(R, ORIGIN), m)] + [BaseCondition(point_ideal(R, q)) for q in pts]
    FB = forms_with_base_conditions(R, d, conds)
    assert FB.dim == derivative_oracle(R, d, [(ORIGIN, m)] + [(q, 1) for q in pts])
    assert FB.dim >= FB.expected
    for f in FB.forms:
        assert all(c.condition_ideal().contains(f) for c in conds)


def test_cubic_scroll_image():
    R = plane()
    FB = forms_with_base_conditions(R, 2, [BaseCondition(point_ideal(R, ORIGIN))])
    Z = image_scheme(RationalMapModel(R, tuple(FB.forms)), max_degree=2)
    hd = Z.hilbert_data()
    assert (hd.dim, hd.degree) == (2, 3)


def test_septic_surface_image():
    R = plane()
    pts = random_points(random.Random(11), 9)
    FB = forms_with_base_conditions(R, 4, [BaseCondition(points_ideal(R, pts))])
    T = image_scheme(RationalMapModel(R, tuple(FB.forms)), max_degree=3)
    hd = T.hilbert_data()
    assert (hd.dim, hd.degree) == (2, 7)
    assert T.h0_ideal(2) == 3


def test_class_arithmetic_examples():
    C = PlaneClass(6, (4,))
    assert class_arithmetic(C)["self_intersection"] == 20 and C.arithmetic_genus() == 4
    assert PlaneClass(4, (2,)).arithmetic_genus() == 2
    G = PlaneClass(3, (2,))
    assert G.self_intersection() == 5 and G.arithmetic_genus() == 0
    two = PlaneClass(8, (2,) * 9)
    h = PlaneClass(4, (1,) * 9)
    assert class_arithmetic(two, h)["product"] == 14
    # the pencil count: 28 - 10 - 16 = 2 forms
    assert PlaneClass(6, (4,) + (1,) * 16).expected_dim() == 2


@given(st.integers(-10, 10), st.lists(st.integers(-4, 4), max_size=5),
       st.integers(-10, 10), st.lists(st.integers(-4, 4), max_size=5))
def test_intersection_form_symmetric(a, b, c, d):
    x, y = PlaneClass(a, tuple(b)), PlaneClass(c, tuple(d))
    assert x.dot(y) == y.dot(x)
    # adjunction makes C^2 + K.C even
    assert (x.self_intersection() + x.k_pairing()) % 2 == 0
