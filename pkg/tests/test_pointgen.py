import pytest

from pseudoflat.errors import GeometryError
from pseudoflat.exact import Cube, Point, dyadic_cutting, locate
from pseudoflat.flats import FlatFamily, Line
from pseudoflat.pointgen import (
    PointSet,
    dump_points,
    dumps_points,
    homogeneity_check,
    integer_grid,
    load_points,
    loads_points,
    perturbed_lattice,
    points_on_flats,
)


def test_perturbed_lattice_shape():
    P = perturbed_lattice(3, 27, seed=4)
    assert P.cube == Cube(3, 3)
    assert P.N == 27
    report = homogeneity_check(P)
    assert report.passed
    assert report.max_unit_occupancy <= 2**3


def test_lattice_is_seeded():
    assert perturbed_lattice(2, 100, seed=0).points == perturbed_lattice(2, 100, seed=0).points
    assert perturbed_lattice(2, 100, seed=0).points != perturbed_lattice(2, 100, seed=1).points
    assert homogeneity_check(perturbed_lattice(2, 100, seed=0)).max_unit_occupancy <= 4


def test_grid_homogeneity():
    P = integer_grid(10, 2, c_hom=4)
    assert P.N == 100
    assert homogeneity_check(P).passed


def test_points_avoid_dyadic_walls():
    P = perturbed_lattice(2, 30, seed=9)
    for level in range(P.depth + 1):
        cutting = dyadic_cutting(P.cube, level)
        for p in P:
            locate(cutting, p)


def test_crowded_unit_cube_fails_homogeneity():
    P = PointSet((Point.of("1/3", "1/3"), Point.of("2/3", "2/3")), Cube(2, 2), c_hom=1)
    assert not homogeneity_check(P).passed


def test_point_set_validation():
    with pytest.raises(GeometryError):
        PointSet((Point.of("1/3", "1/3"), Point.of("1/3", "1/3")), Cube(2, 2))
    with pytest.raises(GeometryError):
        PointSet((Point.of(3, "1/3"),), Cube(2, 2))
    with pytest.raises(GeometryError):
        integer_grid(1, 2)


def test_text_format(tmp_path):
    P = perturbed_lattice(3, 20, seed=5)
    assert loads_points(dumps_points(P)) == P
    path = dump_points(P, tmp_path / "pts.txt")
    assert load_points(path).points == P.points
    assert path.read_text().splitlines()[0] == f"3 20 {P.cube.side} 5"


def test_malformed_point_files():
    with pytest.raises(GeometryError):
        loads_points("2 1\n1/2 1/2\n")
    with pytest.raises(GeometryError):
        loads_points("2 2 4 0\n1/2 1/2\n")
    with pytest.raises(GeometryError):
        loads_points("2 1 4 0\n1/2 1/2 1/2\n")


def test_points_on_flats_are_tagged():
    family = FlatFamily((Line((0, 0), (1, 2)), Line((0, 1), (3, 1))), r=2)
    P = points_on_flats(family, per_flat=5, background=10, cube=Cube(8, 2), seed=3)
    for p, tag in zip(P, P.tags):
        if tag.startswith("flat:"):
            assert family[int(tag[5:])].contains(p)
    assert P.tags.count("flat:0") == 5
    assert P.tags.count("background") <= 10
