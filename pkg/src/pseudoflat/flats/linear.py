"""Lines (any dimension) and planes in R^3, kept in canonical form."""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from ..errors import CoincidentPoints, CollinearPoints, DimensionMismatch, GeometryError
from ..exact import Point, dot, primitive_vector
from .base import Flat, LinearRow
from .polynomial import Interval, Poly

Rational = Union[int, Fraction]


def cross(u: Sequence[Rational], v: Sequence[Rational]) -> Tuple[Fraction, Fraction, Fraction]:
    return (
        Fraction(u[1]) * v[2] - Fraction(u[2]) * v[1],
        Fraction(u[2]) * v[0] - Fraction(u[0]) * v[2],
        Fraction(u[0]) * v[1] - Fraction(u[1]) * v[0],
    )


class Line(Flat):
    """Line {base + s·direction}.

    The direction is primitive and the base point has coordinate 0 on the pivot
    axis (the first axis where the direction is nonzero), which makes the pair
    unique for each line.
    """

    kind = "line"
    __slots__ = ("base", "direction", "pivot")

    def __init__(self, point: Sequence[Rational], direction: Sequence[Rational]) -> None:
        if len(point) != len(direction):
            raise DimensionMismatch("point and direction have different lengths")
        if len(point) < 2:
            raise DimensionMismatch("lines live in R^n with n >= 2")
        d = primitive_vector(direction)
        k = next(i for i, x in enumerate(d) if x)
        p = [Fraction(x) for x in point]
        s = p[k] / d[k]
        self.base: Tuple[Fraction, ...] = tuple(pi - s * di for pi, di in zip(p, d))
        self.direction: Tuple[int, ...] = d
        self.pivot = k

    @property
    def ambient_dim(self) -> int:
        return len(self.direction)

    @property
    def flat_dim(self) -> int:
        return 1

    @property
    def degree(self) -> int:
        return 1

    def key(self) -> tuple:
        return (self.direction, self.base)

    def point_at(self, s: Rational) -> Point:
        return Point(tuple(b + s * d for b, d in zip(self.base, self.direction)))

    def parameter_of(self, p: Point) -> Fraction:
        return p[self.pivot] / self.direction[self.pivot]

    def contains(self, p: Point) -> bool:
        s = self.parameter_of(p)
        return all(x == b + s * d for x, b, d in zip(p.coords, self.base, self.direction))

    def linear_system(self) -> List[LinearRow]:
        k, d = self.pivot, self.direction
        rows = []
        for i in range(self.ambient_dim):
            if i == k:
                continue
            normal = [0] * self.ambient_dim
            normal[i] = d[k]
            normal[k] = -d[i]
            rows.append((tuple(normal), d[k] * self.base[i]))
        return rows

    def equations(self) -> List[Poly]:
        return [Poly.linear(normal, -rhs) for normal, rhs in self.linear_system()]

    def clip(self, box: Sequence[Interval]) -> Optional[Tuple[Fraction, Fraction]]:
        """Parameter interval of the part of the line inside a closed box, or None."""
        lo: Optional[Fraction] = None
        hi: Optional[Fraction] = None
        for (blo, bhi), b, d in zip(box, self.base, self.direction):
            if d == 0:
                if not blo <= b <= bhi:
                    return None
                continue
            s1, s2 = (blo - b) / d, (bhi - b) / d
            if s1 > s2:
                s1, s2 = s2, s1
            lo = s1 if lo is None else max(lo, s1)
            hi = s2 if hi is None else min(hi, s2)
        if lo is None or lo > hi:
            return None
        return lo, hi

    def meets_closed_box(self, box: Sequence[Interval]) -> bool:
        return self.clip(box) is not None

    def describe(self) -> str:
        base = ", ".join(str(b) for b in self.base)
        direction = ", ".join(str(d) for d in self.direction)
        return f"line through ({base}) direction ({direction})"


class Plane(Flat):
    """Plane normal·x = offset in R^3 with a primitive integer normal."""

    kind = "plane"
    __slots__ = ("normal", "offset")

    def __init__(self, normal: Sequence[Rational], offset: Rational) -> None:
        if len(normal) != 3:
            raise DimensionMismatch(f"planes live in R^3, got a normal of length {len(normal)}")
        fracs = [Fraction(x) for x in normal]
        prim = primitive_vector(fracs)
        k = next(i for i, x in enumerate(prim) if x)
        scale = prim[k] / fracs[k]
        self.normal: Tuple[int, ...] = prim
        self.offset: Fraction = Fraction(offset) * scale

    @property
    def ambient_dim(self) -> int:
        return 3

    @property
    def flat_dim(self) -> int:
        return 2

    @property
    def degree(self) -> int:
        return 1

    def key(self) -> tuple:
        return (self.normal, self.offset)

    def contains(self, p: Point) -> bool:
        return dot(self.normal, p.coords) == self.offset

    def linear_system(self) -> List[LinearRow]:
        return [(self.normal, self.offset)]

    def equations(self) -> List[Poly]:
        return [Poly.linear(self.normal, -self.offset)]

    def meets_closed_box(self, box: Sequence[Interval]) -> bool:
        lo = hi = Fraction(0)
        for c, (blo, bhi) in zip(self.normal, box):
            lo += min(c * blo, c * bhi)
            hi += max(c * blo, c * bhi)
        return lo <= self.offset <= hi

    def describe(self) -> str:
        a, b, c = self.normal
        return f"plane {a}x + {b}y + {c}z = {self.offset}"


def line_through(p: Point, q: Point) -> Line:
    if p.dim != q.dim:
        raise DimensionMismatch(f"points in R^{p.dim} and R^{q.dim}")
    if p == q:
        raise CoincidentPoints(f"{p} and {q} coincide")
    return Line(p.coords, q - p)


def plane_through(p: Point, q: Point, s: Point) -> Plane:
    if not p.dim == q.dim == s.dim == 3:
        raise DimensionMismatch("plane_through needs three points in R^3")
    normal = cross(q - p, s - p)
    if not any(normal):
        raise CollinearPoints(f"{p}, {q}, {s} are collinear")
    return Plane(normal, dot(normal, p.coords))


def plane_line_meet(a: Plane, b: Plane) -> Optional[Line]:
    """Line where two non-parallel planes meet, None if they are parallel."""
    direction = cross(a.normal, b.normal)
    if not any(direction):
        return None
    k = max(range(3), key=lambda i: abs(direction[i]))
    i, j = [m for m in range(3) if m != k]
    # Solve the 2x2 system in the two remaining axes with x_k = 0.
    det = a.normal[i] * b.normal[j] - a.normal[j] * b.normal[i]
    if det == 0:
        raise GeometryError("degenerate plane pair")
    point = [Fraction(0)] * 3
    point[i] = (a.offset * b.normal[j] - a.normal[j] * b.offset) / det
    point[j] = (a.normal[i] * b.offset - a.offset * b.normal[i]) / det
    return Line(point, direction)
