"""Curves and surfaces with exact incidence predicates."""
from .algebra import (
    INFINITE,
    Cardinality,
    intersect_surfaces,
    intersection_cardinality,
    rational_common_points,
    sample_points,
)
from .base import EmptyFlat, Flat, FlatFamily, incident
from .cells import cell_count_is_exact, nonempty_cells
from .family import TypeRReport, check_type_r, type_r_bound
from .implicit import Implicit
from .linear import Line, Plane, line_through, plane_line_meet, plane_through
from .polynomial import Poly, UPoly
from .quadric import Circle, Sphere

__all__ = [
    "INFINITE",
    "Cardinality",
    "Circle",
    "EmptyFlat",
    "Flat",
    "FlatFamily",
    "Implicit",
    "Line",
    "Plane",
    "Poly",
    "Sphere",
    "TypeRReport",
    "UPoly",
    "cell_count_is_exact",
    "check_type_r",
    "incident",
    "intersect_surfaces",
    "intersection_cardinality",
    "line_through",
    "nonempty_cells",
    "plane_line_meet",
    "plane_through",
    "rational_common_points",
    "sample_points",
    "type_r_bound",
]
