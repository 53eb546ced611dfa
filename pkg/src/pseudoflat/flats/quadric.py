"""Circles in the plane and spheres in R^3, stored by center and squared radius."""
from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import List, Optional, Sequence, Tuple, Union

from ..errors import DimensionMismatch, GeometryError
from ..exact import Point
from .base import Flat
from .polynomial import Interval, Poly

Rational = Union[int, Fraction]


def axis_dist_sq(c: Fraction, lo: Fraction, hi: Fraction) -> Tuple[Fraction, Fraction]:
    """Min and max of (x - c)^2 for x in [lo, hi]."""
    near = Fraction(0) if lo <= c <= hi else min((lo - c) ** 2, (hi - c) ** 2)
    return near, max((lo - c) ** 2, (hi - c) ** 2)


def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


class Round(Flat):
    """Points at squared distance ``radius_sq`` from ``center``."""

    dim: int = 0
    __slots__ = ("center", "radius_sq")

    def __init__(self, center: Sequence[Rational], radius_sq: Rational) -> None:
        if len(center) != self.dim:
            raise DimensionMismatch(f"{self.kind} needs a center in R^{self.dim}")
        radius_sq = Fraction(radius_sq)
        if radius_sq <= 0:
            raise GeometryError(f"{self.kind} radius squared must be positive, got {radius_sq}")
        self.center: Tuple[Fraction, ...] = tuple(Fraction(c) for c in center)
        self.radius_sq = radius_sq

    @property
    def ambient_dim(self) -> int:
        return self.dim

    @property
    def flat_dim(self) -> int:
        return self.dim - 1

    @property
    def degree(self) -> int:
        return 2

    def key(self) -> tuple:
        return (self.center, self.radius_sq)

    @property
    def radius(self) -> Optional[Fraction]:
        """The radius when it is rational."""
        return rational_sqrt(self.radius_sq)

    def distance_sq(self, p: Sequence[Rational]) -> Fraction:
        return sum(((x - c) ** 2 for x, c in zip(p, self.center)), Fraction(0))

    def contains(self, p: Point) -> bool:
        return self.distance_sq(p.coords) == self.radius_sq

    def equations(self) -> List[Poly]:
        n = self.dim
        eq = Poly.constant(n, -self.radius_sq)
        for i, c in enumerate(self.center):
            eq = eq + (Poly.variable(n, i) - c) ** 2
        return [eq]

    def distance_sq_range(self, box: Sequence[Interval]) -> Tuple[Fraction, Fraction]:
        near = far = Fraction(0)
        for c, (lo, hi) in zip(self.center, box):
            a, b = axis_dist_sq(c, lo, hi)
            near += a
            far += b
        return near, far

    def meets_closed_box(self, box: Sequence[Interval]) -> bool:
        near, far = self.distance_sq_range(box)
        return near <= self.radius_sq <= far

    def describe(self) -> str:
        center = ", ".join(str(c) for c in self.center)
        return f"{self.kind} center ({center}) radius^2 {self.radius_sq}"


class Circle(Round):
    kind = "circle"
    dim = 2


class Sphere(Round):
    kind = "sphere"
    dim = 3
