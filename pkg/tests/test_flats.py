from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from pseudoflat.errors import (
    CoincidentPoints,
    CollinearPoints,
    DimensionMismatch,
    DuplicateFlat,
    EqualSurfaces,
    UnsupportedFlat,
)
from pseudoflat.exact import Cube, Point, make_cutting
from pseudoflat.flats import (
    Circle,
    EmptyFlat,
    FlatFamily,
    Implicit,
    Line,
    Plane,
    Sphere,
    check_type_r,
    incident,
    intersect_surfaces,
    intersection_cardinality,
    line_through,
    nonempty_cells,
    plane_through,
    rational_common_points,
    type_r_bound,
)


def test_line_through_is_canonical():
    line = line_through(Point.of(0, 0), Point.of(2, 2))
    assert line.direction == (1, 1)
    assert line.base == (0, 0)
    assert line_through(Point.of(2, 2), Point.of(0, 0)).key() == line.key()
    horizontal = line_through(Point.of(0, 1), Point.of(2, 1))
    assert horizontal.direction == (1, 0)
    with pytest.raises(CoincidentPoints):
        line_through(Point.of(0, 0), Point.of(0, 0))


def test_plane_through_is_permutation_invariant():
    pts = [Point.of(1, 0, 0), Point.of(0, 1, 0), Point.of(0, 0, 1)]
    planes = {plane_through(*perm) for perm in permutations(pts)}
    assert planes == {Plane((1, 1, 1), 1)}
    z0 = plane_through(Point.of(0, 0, 0), Point.of(1, 0, 0), Point.of(0, 1, 0))
    assert z0.normal == (0, 0, 1) and z0.offset == 0
    with pytest.raises(CollinearPoints):
        plane_through(Point.of(0, 0, 0), Point.of(1, 1, 1), Point.of(2, 2, 2))


def test_incident():
    assert incident(Line((0, 0), (1, 1)), Point.of(2, 2))
    assert incident(Plane((1, 1, 1), 1), Point.of("1/3", "1/3", "1/3"))
    assert not incident(Circle((0, 0), 25), Point.of(3, 3))
    with pytest.raises(DimensionMismatch):
        incident(Line((0, 0), (1, 1)), Point.of(1, 1, 1))


def test_type_r_table():
    for d in range(1, 5):
        assert type_r_bound(d, 2, 1) == d * d + 1
        for n in (3, 4):
            assert type_r_bound(d, n, 1) == d * (2 * d - 1) ** (n - 1) + 1
        assert type_r_bound(d, 3, 2) == d * (2 * d - 1) ** 2 + 1
    with pytest.raises(UnsupportedFlat):
        type_r_bound(1, 4, 2)


def test_plane_pairs():
    meet = intersect_surfaces(Plane((0, 0, 1), 0), Plane((0, 1, 0), 0))
    assert meet == Line((0, 0, 0), (1, 0, 0))
    assert isinstance(intersect_surfaces(Plane((0, 0, 1), 0), Plane((0, 0, 1), 1)), EmptyFlat)
    with pytest.raises(EqualSurfaces):
        intersect_surfaces(Plane((0, 0, 1), 0), Plane((0, 0, 2), 0))


def test_unit_spheres_meet_in_circle_on_x_half():
    curve = intersect_surfaces(Sphere((0, 0, 0), 1), Sphere((1, 0, 0), 1))
    assert isinstance(curve, Implicit) and curve.flat_dim == 1
    (plane_eq,) = curve.linear_equations()
    assert plane_eq.evaluate((Fraction(1, 2), 7, -3)) == 0


def test_sphere_pair_with_rational_points():
    curve = intersect_surfaces(Sphere((0, 0, 0), 25), Sphere((6, 0, 0), 25))
    assert curve.contains(Point.of(3, 4, 0))
    assert curve.contains(Point.of(3, 0, -4))
    assert not curve.contains(Point.of(3, 4, 1))
    assert isinstance(intersect_surfaces(Sphere((0, 0, 0), 1), Plane((0, 0, 1), 5)), EmptyFlat)


def test_nonempty_cells_examples():
    square = Cube(1, 2)
    assert nonempty_cells(Line((0, 0), (1, 1)), make_cutting(square, 4)) == 4
    assert nonempty_cells(Line((0, Fraction(1, 8)), (1, 1)), make_cutting(square, 4)) == 7
    assert nonempty_cells(Plane((0, 0, 1), Fraction(51, 100)), make_cutting(Cube(1, 3), 2)) == 4
    assert nonempty_cells(EmptyFlat(2), make_cutting(square, 4)) == 0


def test_cardinalities():
    assert intersection_cardinality(Line((0, 0), (1, 1)), Line((0, 1), (1, -1))).count == 1
    circle, chord = Circle((0, 0), 25), Line((0, 3), (1, 0))
    assert intersection_cardinality(circle, chord).count == 2
    assert rational_common_points(circle, chord) == [Point.of(-4, 3), Point.of(4, 3)]
    assert intersection_cardinality(circle, circle).is_infinite


def test_type_r_checker():
    lines = FlatFamily((Line((0, 0), (1, 1)), Line((0, 1), (1, 0)), Line((1, 0), (0, 1))), r=2)
    assert check_type_r(lines, trials=40, seed=0).passed
    circles = FlatFamily((Circle((0, 0), 25), Circle((6, 0), 25)), r=3)
    assert check_type_r(circles, trials=40, seed=1).max_multiplicity <= 1
    doubled = FlatFamily((Line((0, 0), (1, 1)), Line((0, 0), (2, 2))), r=2, allow_duplicates=True)
    report = check_type_r(doubled, trials=40, seed=2)
    assert not report.passed
    assert report.witness_members == (0, 1)


def test_family_validation():
    with pytest.raises(DuplicateFlat):
        FlatFamily((Line((0, 0), (1, 1)), Line((1, 1), (3, 3))), r=2)
    with pytest.raises(DimensionMismatch):
        FlatFamily((Line((0, 0), (1, 1)), Plane((0, 0, 1), 0)), r=2)


small = st.integers(min_value=-2, max_value=2)
normals = st.tuples(small, small, small).filter(any)
grid_points = st.tuples(small, small, small).map(lambda c: Point.of(*c))


@given(a=normals, b=normals, u=small, v=small, p=grid_points)
def test_plane_meet_is_common_incidence(a, b, u, v, p):
    S, T = Plane(a, u), Plane(b, v)
    assume(S != T)
    curve = intersect_surfaces(S, T)
    assert curve.contains(p) == (S.contains(p) and T.contains(p))


coords = st.integers(min_value=1, max_value=63).map(lambda u: Fraction(u, 8))


@given(
    x=coords,
    y=coords,
    d=st.tuples(st.integers(-3, 3), st.integers(-3, 3)).filter(any),
    t=st.integers(min_value=1, max_value=9),
)
def test_lines_meet_at_most_n_t_cells(x, y, d, t):
    assert nonempty_cells(Line((x, y), d), make_cutting(Cube(8, 2), t)) <= 2 * t


@given(
    p=st.tuples(coords, coords, coords),
    d=st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)).filter(any),
    t=st.integers(min_value=1, max_value=9),
)
def test_space_lines_meet_at_most_n_t_cells(p, d, t):
    assert nonempty_cells(Line(p, d), make_cutting(Cube(8, 3), t)) <= 3 * t


@given(n=normals, u=st.integers(min_value=-6, max_value=12), t=st.integers(min_value=1, max_value=6))
def test_planes_meet_at_most_3t2_cells(n, u, t):
    assert nonempty_cells(Plane(n, u), make_cutting(Cube(4, 3), t)) <= 3 * t * t


radii = st.integers(min_value=1, max_value=40)


@given(c1=st.tuples(small, small), c2=st.tuples(small, small), r1=radii, r2=radii)
def test_circles_share_at_most_two_points(c1, c2, r1, r2):
    a, b = Circle(c1, r1), Circle(c2, r2)
    assume(a != b)
    card = intersection_cardinality(a, b)
    assert card.count is not None and card.count <= 2
