from fractions import Fraction

from pseudoflat.flats import Implicit, intersection_cardinality
from pseudoflat.flats.polynomial import (
    Poly,
    UPoly,
    eliminate_last,
    interpolate,
    sturm_root_count,
    sylvester_resultant,
    upoly_gcd,
)

x, y = Poly.variable(2, 0), Poly.variable(2, 1)


def test_poly_arithmetic():
    p = (x + 1) ** 2
    assert p.degree == 2
    assert p.evaluate((2, 0)) == 9
    assert (p - p).is_zero()
    assert (2 * x - 2).monic() == x - 1
    assert p.partial({0: 1}).evaluate((0, 5)) == 4


def test_compose_and_restrict():
    circle = x**2 + y**2 - 25
    s = Poly.variable(1, 0)
    on_chord = circle.compose([s, Poly.constant(1, 3)]).to_upoly(0)
    assert on_chord == UPoly([-16, 0, 1])


def test_interval_enclosure():
    lo, hi = (x**2 - 1).interval([(Fraction(-1), Fraction(2)), (Fraction(0), Fraction(1))])
    assert (lo, hi) == (-1, 3)


def test_univariate_roots():
    p = UPoly([-16, 0, 1])
    assert p.rational_roots() == [-4, 4]
    assert sturm_root_count(p) == 2
    assert sturm_root_count(UPoly([1, 0, 1])) == 0
    assert sturm_root_count(UPoly([1, -2, 1])) == 1


def test_gcd_and_resultant():
    a = UPoly([-1, 1]) * UPoly([-2, 1])
    b = UPoly([-1, 1]) * UPoly([3, 1])
    assert upoly_gcd(a, b) == UPoly([-1, 1])
    assert sylvester_resultant(UPoly([-1, 1]), UPoly([-1, 0, 1])) == 0
    assert sylvester_resultant(UPoly([-1, 1]), UPoly([-2, 1])) != 0


def test_interpolate():
    assert interpolate([0, 1, 2], [1, 2, 5]) == UPoly([1, 0, 1])


def test_eliminate_last_gives_projection():
    res = eliminate_last(x**2 + y**2 - 25, y - 3, 2)
    assert res.rational_roots() == [-4, 4]


def test_implicit_canonical_form():
    assert Implicit([2 * x - 2], 1) == Implicit([x - 1], 1)
    assert Implicit([x - 1, x - 1], 1).equations() == [x - 1]


def test_circle_meets_hyperbola_in_four_points():
    circle = Implicit([x**2 + y**2 - 25], 1)
    hyperbola = Implicit([x * y - 12], 1)
    card = intersection_cardinality(circle, hyperbola)
    assert card.exact and card.count == 4
