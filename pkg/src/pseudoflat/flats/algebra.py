"""Pairwise intersections of flats.

``intersect_surfaces`` builds the curve S∩S′ of two surfaces in R^3.
``intersection_cardinality`` counts the common real points of two curves
exactly whenever the pair reduces to one variable (a line is involved, or both
curves lie in planes) or to two (plane curves, by resultants under a shear).
Anything else falls back to a sampled lower bound flagged ``exact=False``.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import ceil, floor
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionMismatch, EqualSurfaces, GeometryError, UnparametrizableFlat, UnsupportedFlat
from ..exact import Point, avoids_grids, dot, next_prime
from .base import EmptyFlat, Flat
from .implicit import Implicit
from .linear import Line, Plane, plane_line_meet
from .polynomial import Poly, UPoly, eliminate_last, sturm_root_count, upoly_gcd
from .quadric import Circle, Round, Sphere

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cardinality:
    """Number of common points; ``count`` is None when there are infinitely many."""

    count: Optional[int]
    exact: bool = True

    @property
    def is_infinite(self) -> bool:
        return self.count is None

    def __str__(self) -> str:
        if self.count is None:
            return "infinite"
        return str(self.count) if self.exact else f">= {self.count}"


INFINITE = Cardinality(None)


# surface ∩ surface


def _round_equation(center: Sequence[Fraction], radius_sq: Fraction) -> Poly:
    n = len(center)
    eq = Poly.constant(n, -radius_sq)
    for i, c in enumerate(center):
        eq = eq + (Poly.variable(n, i) - c) ** 2
    return eq


def _sphere_plane(sphere: Sphere, plane: Plane) -> Flat:
    normal = plane.normal
    nn = dot(normal, normal)
    delta = dot(normal, sphere.center) - plane.offset
    dist_sq = delta * delta / nn
    if dist_sq > sphere.radius_sq:
        return EmptyFlat(3)
    foot = tuple(c - delta / nn * n for c, n in zip(sphere.center, normal))
    # The circle is cut out by its plane and the sphere centered on the plane.
    return Implicit([_round_equation(foot, sphere.radius_sq - dist_sq), plane.equations()[0]], 1)


def _radical_normal(a: Round, b: Round) -> Tuple[Tuple[Fraction, ...], Fraction]:
    normal = tuple(2 * (cb - ca) for ca, cb in zip(a.center, b.center))
    rhs = dot(b.center, b.center) - dot(a.center, a.center) + a.radius_sq - b.radius_sq
    return normal, rhs


def intersect_surfaces(s: Flat, t: Flat) -> Flat:
    """The curve S∩S′ of two distinct surfaces in R^3, or ``EmptyFlat``."""
    for f in (s, t):
        if f.ambient_dim != 3 or f.flat_dim != 2:
            raise UnsupportedFlat(f"intersect_surfaces needs surfaces in R^3, got {f.describe()}")
    if s == t:
        raise EqualSurfaces(f"{s.describe()} intersected with itself")
    if isinstance(s, Plane) and isinstance(t, Plane):
        return plane_line_meet(s, t) or EmptyFlat(3)
    if isinstance(s, Sphere) and isinstance(t, Sphere):
        if s.center == t.center:
            return EmptyFlat(3)
        normal, rhs = _radical_normal(s, t)
        return _sphere_plane(s, Plane(normal, rhs))
    if isinstance(s, Sphere) and isinstance(t, Plane):
        return _sphere_plane(s, t)
    if isinstance(s, Plane) and isinstance(t, Sphere):
        return _sphere_plane(t, s)
    return Implicit(s.equations() + t.equations(), 1)


# restriction helpers


def _line_gcd(line: Line, flats: Sequence[Flat]) -> Optional[UPoly]:
    """Gcd of every equation restricted to the line; None when all vanish identically."""
    subs = [Poly.linear([d], b) for b, d in zip(line.base, line.direction)]
    polys = [eq.compose(subs).to_upoly(0) for f in flats for eq in f.equations()]
    nonzero = [p for p in polys if not p.is_zero()]
    if not nonzero:
        return None
    return reduce(upoly_gcd, nonzero[1:], nonzero[0].monic())


def _line_from_equation(normal: Sequence[Fraction], rhs: Fraction) -> Optional[Line]:
    """The line normal·x = rhs in the plane, None when the normal vanishes."""
    a, b = normal
    if a == 0 and b == 0:
        return None
    point = (rhs / a, Fraction(0)) if a != 0 else (Fraction(0), rhs / b)
    return Line(point, (-b, a))


def _supporting_plane(flat: Flat) -> Optional[Plane]:
    if isinstance(flat, Implicit):
        for eq in flat.linear_equations():
            zero = (0, 0, 0)
            normal = [eq.terms.get(tuple(1 if k == i else 0 for k in range(3)), 0) for i in range(3)]
            return Plane(normal, -eq.terms.get(zero, Fraction(0)))
    return None


def _plane_chart(plane: Plane) -> List[Poly]:
    """Affine coordinates (u, w) on the plane, as substitutions for x, y, z."""
    k = max(range(3), key=lambda i: abs(plane.normal[i]))
    i, j = [m for m in range(3) if m != k]
    n = plane.normal
    subs: List[Poly] = [Poly(2)] * 3
    subs[i] = Poly.variable(2, 0)
    subs[j] = Poly.variable(2, 1)
    subs[k] = Poly.linear([Fraction(-n[i], n[k]), Fraction(-n[j], n[k])], plane.offset / n[k])
    return subs


def _in_chart(flat: Flat, chart: List[Poly]) -> List[Poly]:
    reduced = {}
    for eq in flat.equations():
        p = eq.compose(chart)
        if not p.is_zero():
            p = p.monic()
            reduced[p.key()] = p
    return [reduced[k] for k in sorted(reduced)]


# curve ∩ curve


def _shears() -> Iterator[int]:
    yield 0
    lam = 1
    while True:
        yield lam
        yield -lam
        lam += 1


def _count_planar(f: Poly, g: Poly) -> Cardinality:
    """Distinct common real points of two plane curves f = 0 and g = 0.

    Shearing x -> x - λy makes the leading y-coefficients constant; the number
    of distinct real roots of Res_y is then the answer for all but at most
    C(P,2)+P values of λ (P = deg f·deg g), so a majority over 2B+1 shears is exact.
    """
    if f.degree < 1 or g.degree < 1:
        return Cardinality(0)
    total = f.degree * g.degree
    bad = total * (total - 1) // 2 + total
    x, y = Poly.variable(2, 0), Poly.variable(2, 1)
    tally: Counter = Counter()
    for lam in _shears():
        if f.top_form().evaluate((-lam, 1)) == 0 or g.top_form().evaluate((-lam, 1)) == 0:
            continue
        shear = [x - y * lam, y]
        res = eliminate_last(f.compose(shear), g.compose(shear), total)
        if res.is_zero():
            return INFINITE
        found = sturm_root_count(res)
        tally[found] += 1
        if tally[found] > bad:
            return Cardinality(found)
    raise AssertionError("unreachable")


def _sampled_lower_bound(v: Flat, w: Flat) -> Cardinality:
    rng = np.random.default_rng(0)
    seen = set()
    for a, b in ((v, w), (w, v)):
        try:
            pts = sample_points(a, 32, rng, side=1 << 20, inside=False)
        except (UnparametrizableFlat, GeometryError):
            continue
        seen.update(p for p in pts if b.contains(p))
    logger.debug(f"sampled lower bound {len(seen)} for {v.describe()} and {w.describe()}")
    return Cardinality(len(seen), exact=False)


def intersection_cardinality(v: Flat, w: Flat) -> Cardinality:
    """Number of common real points of two curves."""
    if isinstance(v, EmptyFlat) or isinstance(w, EmptyFlat):
        return Cardinality(0)
    if v.ambient_dim != w.ambient_dim:
        raise DimensionMismatch(f"curves in R^{v.ambient_dim} and R^{w.ambient_dim}")
    if v.flat_dim != 1 or w.flat_dim != 1:
        raise UnsupportedFlat("intersection_cardinality compares curves")
    if v == w:
        return INFINITE

    if isinstance(v, Line) or isinstance(w, Line):
        line, other = (v, w) if isinstance(v, Line) else (w, v)
        g = _line_gcd(line, [other])
        return INFINITE if g is None else Cardinality(sturm_root_count(g))

    if v.ambient_dim == 2:
        if isinstance(v, Circle) and isinstance(w, Circle):
            if v.center == w.center:
                return Cardinality(0)
            radical = _line_from_equation(*_radical_normal(v, w))
            return intersection_cardinality(radical, v)
        fv, fw = v.equations(), w.equations()
        if len(fv) == 1 and len(fw) == 1:
            return _count_planar(fv[0], fw[0])

    if v.ambient_dim == 3:
        pv, pw = _supporting_plane(v), _supporting_plane(w)
        if pv is not None and pw is not None:
            if pv == pw:
                chart = _plane_chart(pv)
                fv, fw = _in_chart(v, chart), _in_chart(w, chart)
                if len(fv) == 1 and len(fw) == 1:
                    return _count_planar(fv[0], fw[0])
            else:
                meet = plane_line_meet(pv, pw)
                if meet is None:
                    return Cardinality(0)
                g = _line_gcd(meet, [v, w])
                return INFINITE if g is None else Cardinality(sturm_root_count(g))

    return _sampled_lower_bound(v, w)


def rational_common_points(v: Flat, w: Flat) -> List[Point]:
    """The common points with rational coordinates, when they can be enumerated exactly."""
    if isinstance(v, EmptyFlat) or isinstance(w, EmptyFlat) or v == w:
        return []
    line: Optional[Line] = None
    others: List[Flat] = []
    if isinstance(v, Line) or isinstance(w, Line):
        line, other = (v, w) if isinstance(v, Line) else (w, v)
        others = [other]
    elif v.ambient_dim == 2 and isinstance(v, Circle) and isinstance(w, Circle):
        if v.center != w.center:
            line, others = _line_from_equation(*_radical_normal(v, w)), [v]
    elif v.ambient_dim == 3:
        pv, pw = _supporting_plane(v), _supporting_plane(w)
        if pv is not None and pw is not None and pv != pw:
            line, others = plane_line_meet(pv, pw), [v, w]
    if line is None:
        return []
    g = _line_gcd(line, others)
    if g is None or g.degree < 1:
        return []
    return [line.point_at(s) for s in g.rational_roots()]


# rational samples


def sample_points(
    flat: Flat,
    count: int,
    rng: np.random.Generator,
    side: int,
    horizon: Optional[int] = None,
    inside: bool = True,
    max_attempts: Optional[int] = None,
) -> List[Point]:
    """Distinct rational points on ``flat``.

    With ``inside`` set, every point is strictly inside [0, side]^n and no
    coordinate lies on a wall of a uniform cutting with t <= horizon.
    """
    if isinstance(flat, EmptyFlat) or count <= 0:
        return []
    if isinstance(flat, Implicit):
        raise UnparametrizableFlat(f"no rational parametrization for {flat.describe()}")
    if isinstance(flat, Round) and flat.radius is None:
        raise UnparametrizableFlat(f"{flat.describe()} has an irrational radius")
    horizon = max(horizon or 0, side)
    draw = _drawer(flat, count, rng, side, horizon)
    found: dict = {}
    for _ in range(max_attempts or 200 * count + 1000):
        p = draw()
        if not inside or all(0 < x < side and avoids_grids(x, side, horizon) for x in p.coords):
            found.setdefault(p, None)
            if len(found) == count:
                break
    if len(found) < count:
        raise GeometryError(f"placed only {len(found)} of {count} points on {flat.describe()}")
    return list(found)


def _denominator_bound(flat: Flat) -> int:
    values: List[Fraction] = []
    if isinstance(flat, Line):
        values = [*flat.base, *map(Fraction, flat.direction)]
    elif isinstance(flat, Plane):
        values = [flat.offset, *map(Fraction, flat.normal)]
    elif isinstance(flat, Round):
        values = [*flat.center, flat.radius_sq]
    return max([1] + [abs(v.numerator) for v in values] + [v.denominator for v in values])


def _drawer(flat: Flat, count: int, rng: np.random.Generator, side: int, horizon: int):
    q = next_prime(max(horizon, _denominator_bound(flat)))

    def draw_int(lo: int, hi: int) -> int:
        return int(rng.integers(lo, hi + 1))

    if isinstance(flat, Line):
        span = flat.clip([(Fraction(0), Fraction(side))] * flat.ambient_dim)
        if span is None or span[0] == span[1]:
            raise GeometryError(f"{flat.describe()} misses the cube [0,{side}]^{flat.ambient_dim}")
        lo, hi = span
        q = next_prime(max(q, ceil(4 * count / (hi - lo))))
        ulo, uhi = floor(lo * q) + 1, ceil(hi * q) - 1

        def draw_line() -> Point:
            return flat.point_at(Fraction(draw_int(ulo, uhi), q))

        return draw_line

    if isinstance(flat, Plane):
        n = flat.normal
        k = max(range(3), key=lambda i: abs(n[i]))
        i, j = [m for m in range(3) if m != k]

        def draw_plane() -> Point:
            coords = [Fraction(0)] * 3
            coords[i] = Fraction(draw_int(1, side * q - 1), q)
            coords[j] = Fraction(draw_int(1, side * q - 1), q)
            coords[k] = (flat.offset - n[i] * coords[i] - n[j] * coords[j]) / n[k]
            return Point(tuple(coords))

        return draw_plane

    if isinstance(flat, Round):
        r = flat.radius
        c = flat.center

        def draw_round() -> Point:
            s = Fraction(draw_int(-4 * q, 4 * q), q)
            if flat.dim == 2:
                den = 1 + s * s
                return Point((c[0] + r * (1 - s * s) / den, c[1] + r * 2 * s / den))
            u = Fraction(draw_int(-4 * q, 4 * q), q)
            den = 1 + s * s + u * u
            return Point(
                (c[0] + r * 2 * s / den, c[1] + r * 2 * u / den, c[2] + r * (s * s + u * u - 1) / den)
            )

        return draw_round

    raise UnparametrizableFlat(f"no rational parametrization for {flat.describe()}")
