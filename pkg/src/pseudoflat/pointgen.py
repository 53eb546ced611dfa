"""Homogeneous point sets: generators, the homogeneity check and the text format.

Every generator puts a single prime q above 2^I·a into the denominators, where
I is the dyadic depth of the enclosing cube [0,a]^n. A coordinate x then has
x/a with denominator at least q, so it lies on no wall of any uniform cutting
with t <= 2^I·a, dyadic cuttings included.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from io import StringIO
from math import floor, lcm
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from .errors import GeometryError, HomogeneityError
from .exact import (
    Cube,
    Point,
    dyadic_cutting,
    dyadic_depth,
    lattice_side,
    locate,
    next_prime,
)
from .flats.algebra import sample_points
from .flats.base import FlatFamily

logger = logging.getLogger(__name__)


def default_c_hom(n: int) -> int:
    return 2**n * 2


@dataclass(frozen=True)
class PointSet:
    points: Tuple[Point, ...]
    cube: Cube
    seed: int = 0
    c_hom: Optional[int] = None
    c_vol: Fraction = Fraction(2)
    tags: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        if self.c_hom is None:
            object.__setattr__(self, "c_hom", default_c_hom(self.cube.dim))
        for p in self.points:
            if p.dim != self.cube.dim:
                raise GeometryError(f"{p} is not a point of R^{self.cube.dim}")
            if not self.cube.contains_strictly(p):
                raise GeometryError(f"{p} is not strictly inside [0,{self.cube.side}]^{self.cube.dim}")
        if len(set(self.points)) != len(self.points):
            raise GeometryError("point set contains repeated points")

    @property
    def n(self) -> int:
        return self.cube.dim

    @property
    def N(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i: int) -> Point:
        return self.points[i]

    @property
    def depth(self) -> int:
        """The dyadic depth I of the enclosing cube."""
        return dyadic_depth(self.cube.side)

    @cached_property
    def denominator(self) -> int:
        return reduce(lcm, (x.denominator for p in self.points for x in p.coords), 1)

    @cached_property
    def scaled(self) -> List[Tuple[int, ...]]:
        """Coordinates multiplied by the common denominator, as Python ints."""
        den = self.denominator
        return [tuple(int(x * den) for x in p.coords) for p in self.points]


def boundary_horizon(side: int) -> int:
    return 2 ** dyadic_depth(side) * side


def _assert_sparse_at_depth(points: Sequence[Point], cube: Cube) -> None:
    finest = dyadic_cutting(cube, dyadic_depth(cube.side))
    seen: Dict[Tuple[int, ...], Point] = {}
    for p in points:
        j = locate(finest, p).j
        if j in seen:
            raise HomogeneityError(f"{seen[j]} and {p} share a level-{finest.level} cell")
        seen[j] = p


def _jittered_cells(
    rng: np.random.Generator, cells: np.ndarray, side: int, dim: int, q: int
) -> List[Point]:
    """One point per cell, uniform inside the middle half of the cell, denominator q."""
    corners = np.stack(np.unravel_index(cells, (side,) * dim), axis=1)
    jitter = rng.integers(q // 4 + 1, (3 * q) // 4 + 1, size=corners.shape)
    return [
        Point(tuple(Fraction(int(c) * q + int(u), q) for c, u in zip(corner, jit)))
        for corner, jit in zip(corners, jitter)
    ]


def perturbed_lattice(
    n: int, N: int, seed: int, c_hom: Optional[int] = None, c_vol: Fraction = Fraction(2)
) -> PointSet:
    """N points, one in each of N random unit cells of [0,a]^n with a = ceil(N^(1/n))."""
    if N < 1:
        raise GeometryError(f"need at least one point, got N={N}")
    side = lattice_side(N, n)
    cube = Cube(side, n)
    q = next_prime(boundary_horizon(side))
    rng = np.random.default_rng(seed)
    cells = np.sort(rng.choice(side**n, size=N, replace=False))
    points = _jittered_cells(rng, cells, side, n, q)
    _assert_sparse_at_depth(points, cube)
    logger.debug(f"perturbed lattice n={n} N={N} a={side} q={q}")
    return PointSet(tuple(points), cube, seed, c_hom, c_vol, tags=("lattice",) * N)


def integer_grid(
    m: int, n: int, seed: int = 0, c_hom: Optional[int] = None, c_vol: Fraction = Fraction(2)
) -> PointSet:
    """The m^n grid shifted by delta = 1/(2q) off every tested wall."""
    if m < 2:
        raise GeometryError(f"grid side must be >= 2, got {m}")
    cube = Cube(m, n)
    delta = Fraction(1, 2 * next_prime(boundary_horizon(m)))
    corners = np.stack(np.unravel_index(np.arange(m**n), (m,) * n), axis=1)
    points = [Point(tuple(int(c) + delta for c in corner)) for corner in corners]
    _assert_sparse_at_depth(points, cube)
    return PointSet(tuple(points), cube, seed, c_hom, c_vol, tags=("grid",) * len(points))


def points_on_flats(
    family: FlatFamily,
    per_flat: int,
    background: int,
    cube: Cube,
    seed: int,
    c_hom: Optional[int] = None,
) -> PointSet:
    """Rational points on each member plus background lattice points, tagged by origin."""
    rng = np.random.default_rng(seed)
    horizon = boundary_horizon(cube.side)
    tagged: Dict[Point, str] = {}
    for idx, member in enumerate(family):
        for p in sample_points(member, per_flat, rng, side=cube.side, horizon=horizon):
            tagged.setdefault(p, f"flat:{idx}")
    if background:
        if background > cube.volume:
            raise GeometryError(f"{background} background points do not fit in {cube.volume} unit cells")
        q = next_prime(horizon)
        cells = np.sort(rng.choice(cube.volume, size=background, replace=False))
        for p in _jittered_cells(rng, cells, cube.side, cube.dim, q):
            tagged.setdefault(p, "background")
    points = tuple(tagged)
    return PointSet(points, cube, seed, c_hom, tags=tuple(tagged[p] for p in points))


@dataclass
class HomogeneityReport:
    max_unit_occupancy: int
    shifted_bound: int
    volume_ratio: Fraction
    c_hom: int
    c_vol: Fraction

    @property
    def passed(self) -> bool:
        return self.max_unit_occupancy <= self.c_hom and Fraction(1, 2) <= self.volume_ratio <= 2 * self.c_vol

    def to_dict(self) -> Dict[str, object]:
        return {
            "max_unit_occupancy": self.max_unit_occupancy,
            "shifted_bound": self.shifted_bound,
            "volume_ratio": str(self.volume_ratio),
            "c_hom": self.c_hom,
            "c_vol": str(self.c_vol),
            "pass": self.passed,
        }


def homogeneity_check(P: PointSet) -> HomogeneityReport:
    """Occupancy of integer-aligned unit cubes and the volume ratio a^n/N.

    A shifted unit cube meets at most 2^n aligned ones, so ``shifted_bound``
    caps the occupancy of every unit cube.
    """
    occupancy = Counter(tuple(floor(x) for x in p.coords) for p in P.points)
    worst = max(occupancy.values(), default=0)
    ratio = Fraction(P.cube.volume, max(P.N, 1))
    report = HomogeneityReport(worst, 2**P.n * worst, ratio, P.c_hom, Fraction(P.c_vol))
    if not report.passed:
        logger.warning(f"⚠️  homogeneity check failed: occupancy {worst}, volume ratio {ratio}")
    return report


# text format: header "n N a seed", then one point per line as num/den fields


def write_points(P: PointSet, out: TextIO) -> None:
    out.write(f"{P.n} {P.N} {P.cube.side} {P.seed}\n")
    for p in P.points:
        out.write(" ".join(f"{x.numerator}/{x.denominator}" for x in p.coords) + "\n")


def read_points(src: TextIO) -> PointSet:
    header = src.readline().split()
    if len(header) != 4:
        raise GeometryError(f"bad point-file header {header!r}; expected 'n N a seed'")
    n, N, side, seed = (int(v) for v in header)
    points = []
    for lineno, line in enumerate(src, start=2):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != n:
            raise GeometryError(f"line {lineno}: expected {n} coordinates, got {len(fields)}")
        points.append(Point(tuple(Fraction(f) for f in fields)))
    if len(points) != N:
        raise GeometryError(f"header announces {N} points, file holds {len(points)}")
    return PointSet(tuple(points), Cube(side, n), seed)


def dump_points(P: PointSet, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        write_points(P, fh)
    return path


def load_points(path: Union[str, Path]) -> PointSet:
    with Path(path).open("r", encoding="utf-8") as fh:
        return read_points(fh)


def dumps_points(P: PointSet) -> str:
    buf = StringIO()
    write_points(P, buf)
    return buf.getvalue()


def loads_points(text: str) -> PointSet:
    return read_points(StringIO(text))
