from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pseudoflat.errors import GeometryError, NoParent, NotDyadic, OnBoundary, OutOfCube
from pseudoflat.exact import (
    CellIndex,
    Cube,
    Cutting,
    Point,
    dyadic_cutting,
    dyadic_depth,
    lattice_side,
    locate,
    make_cutting,
    next_prime,
    parent_cell,
    primitive_vector,
    to_fraction,
)


def test_floats_are_refused():
    with pytest.raises(TypeError):
        to_fraction(0.5)
    assert Point.of("1/3", 2).coords == (Fraction(1, 3), Fraction(2))


def test_dyadic_depth_table():
    assert [dyadic_depth(a) for a in (1, 2, 3, 8, 100)] == [1, 2, 3, 4, 8]


def test_locate_open_cells():
    cutting = make_cutting(Cube(4, 2), 4)
    assert locate(cutting, Point.of("1/2", "3/2")).j == (1, 2)
    with pytest.raises(OnBoundary):
        locate(cutting, Point.of(1, "1/2"))
    with pytest.raises(OutOfCube):
        locate(cutting, Point.of(0, "1/2"))


def test_cutting_level_must_match_resolution():
    with pytest.raises(NotDyadic):
        Cutting(Cube(4, 2), 3, level=2)
    assert dyadic_cutting(Cube(4, 2), 2).t == 4
    assert make_cutting(Cube(4, 3), 2).cell_count == 8


def test_parent_cell():
    assert parent_cell(CellIndex(4, (3, 4), 2)) == CellIndex(2, (2, 2), 1)
    with pytest.raises(NoParent):
        parent_cell(CellIndex(1, (1, 1), 0))
    with pytest.raises(NotDyadic):
        parent_cell(CellIndex(4, (1, 1)))


def test_cell_index_range():
    with pytest.raises(GeometryError):
        CellIndex(2, (0, 1))


def test_small_helpers():
    assert primitive_vector((-2, 4)) == (1, -2)
    assert primitive_vector((0, Fraction(1, 2), Fraction(3, 4))) == (0, 2, 3)
    assert lattice_side(27, 3) == 3
    assert lattice_side(28, 3) == 4
    assert lattice_side(100, 2) == 10
    assert next_prime(7) == 11
    assert next_prime(1) == 2


odd_coord = st.integers(min_value=0, max_value=511).map(lambda u: Fraction(2 * u + 1, 128))


@given(x=odd_coord, y=odd_coord, level=st.integers(min_value=1, max_value=5))
def test_parent_contains_child(x, y, level):
    cube = Cube(8, 2)
    p = Point((x, y))
    child = locate(dyadic_cutting(cube, level), p)
    assert parent_cell(child) == locate(dyadic_cutting(cube, level - 1), p)
