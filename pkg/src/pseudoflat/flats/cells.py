"""Counting the open cells of a cutting that a flat meets.

Lines, planes, circles and spheres are counted exactly. Implicit flats get a
certified upper bound: a cell is dropped only when interval enclosures prove
that some equation has no zero on the closed cell or on any of its halves.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import ceil, floor
from typing import List, Sequence

from ..errors import DimensionMismatch, UnsupportedFlat
from ..exact import Cutting
from .base import EmptyFlat, Flat
from .implicit import Implicit
from .linear import Line, Plane
from .polynomial import Interval
from .quadric import Round, axis_dist_sq

EXACT_KINDS = frozenset({"line", "plane", "circle", "sphere", "empty"})


def cell_count_is_exact(flat: Flat) -> bool:
    return flat.kind in EXACT_KINDS


def nonempty_cells(flat: Flat, cutting: Cutting) -> int:
    """Number of open cells of ``cutting`` whose intersection with ``flat`` is nonempty."""
    if flat.ambient_dim != cutting.dim:
        raise DimensionMismatch(f"flat in R^{flat.ambient_dim}, cutting of R^{cutting.dim}")
    if isinstance(flat, EmptyFlat):
        return 0
    if isinstance(flat, Line):
        return _line_cells(flat, cutting)
    if isinstance(flat, Plane):
        return _plane_cells(flat, cutting)
    if isinstance(flat, Round):
        return _round_cells(flat, cutting)
    if isinstance(flat, Implicit):
        return _implicit_cells(flat, cutting)
    raise UnsupportedFlat(f"no cell counter for {flat.kind}")


def _on_wall(x: Fraction, cutting: Cutting) -> bool:
    return (x / cutting.width).denominator == 1


def _line_cells(line: Line, cutting: Cutting) -> int:
    a = Fraction(cutting.cube.side)
    lo = hi = None
    for b, d in zip(line.base, line.direction):
        if d == 0:
            if not 0 < b < a or _on_wall(b, cutting):
                return 0
            continue
        s1, s2 = sorted(((0 - b) / d, (a - b) / d))
        lo = s1 if lo is None else max(lo, s1)
        hi = s2 if hi is None else min(hi, s2)
    if not lo < hi:
        return 0
    # Each wall crossing strictly inside the cube starts a new cell.
    crossings = set()
    h = cutting.width
    for b, d in zip(line.base, line.direction):
        if d == 0:
            continue
        for m in range(1, cutting.t):
            s = (m * h - b) / d
            if lo < s < hi:
                crossings.add(s)
    return len(crossings) + 1


def _plane_cells(plane: Plane, cutting: Cutting) -> int:
    h = cutting.width
    a = Fraction(cutting.cube.side)
    n = plane.normal
    k = max(range(3), key=lambda i: abs(n[i]))
    i, j = [m for m in range(3) if m != k]
    total = 0
    for ji in range(1, cutting.t + 1):
        for jj in range(1, cutting.t + 1):
            # x_k over the open column is the open interval between these values.
            corners = [
                (plane.offset - n[i] * u - n[j] * w) / n[k]
                for u in ((ji - 1) * h, ji * h)
                for w in ((jj - 1) * h, jj * h)
            ]
            lo, hi = min(corners), max(corners)
            if lo == hi:
                total += 1 if 0 < lo < a and not _on_wall(lo, cutting) else 0
                continue
            lo, hi = max(lo, Fraction(0)), min(hi, a)
            if lo < hi:
                total += ceil(hi / h) - floor(lo / h)
    return total


def _round_cells(shape: Round, cutting: Cutting) -> int:
    h = cutting.width
    ranges = []
    for c in shape.center:
        ranges.append([axis_dist_sq(c, (m - 1) * h, m * h) for m in range(1, cutting.t + 1)])
    r2 = shape.radius_sq
    count = 0
    for per_axis in product(*ranges):
        near = sum(p[0] for p in per_axis)
        if near >= r2:
            continue
        if sum(p[1] for p in per_axis) > r2:
            count += 1
    return count


def _may_vanish(flat: Implicit, box: Sequence[Interval]) -> bool:
    for eq in flat.equations():
        lo, hi = eq.interval(box)
        if lo > 0 or hi < 0:
            return False
    return True


def _halves(box: Sequence[Interval]) -> List[List[Interval]]:
    splits = [((lo, (lo + hi) / 2), ((lo + hi) / 2, hi)) for lo, hi in box]
    return [list(choice) for choice in product(*splits)]


def _implicit_cells(flat: Implicit, cutting: Cutting) -> int:
    count = 0
    for cell in cutting.cells():
        box = cutting.cell_box(cell)
        if _may_vanish(flat, box) and any(_may_vanish(flat, sub) for sub in _halves(box)):
            count += 1
    return count
