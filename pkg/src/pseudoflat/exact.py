"""Exact rational points, enclosing cubes and grid/dyadic cuttings.

Coordinates are ``fractions.Fraction`` values, so every comparison below is exact.
Cells are open boxes: a point on a cell wall belongs to no cell and ``locate``
refuses it with ``OnBoundary``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from .errors import GeometryError, NoParent, NotDyadic, OnBoundary, OutOfCube

Scalar = Union[Fraction, int, str]


def to_fraction(value: Scalar) -> Fraction:
    """Convert ints, Fractions or ``"num/den"`` strings; floats are refused."""
    if isinstance(value, float):
        raise TypeError("floating-point coordinates are not allowed; pass a Fraction or a string")
    return Fraction(value)


@dataclass(frozen=True)
class Point:
    coords: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coords) < 2:
            raise GeometryError(f"points need at least 2 coordinates, got {len(self.coords)}")

    @classmethod
    def of(cls, *values: Scalar) -> "Point":
        return cls(tuple(to_fraction(v) for v in values))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def __getitem__(self, i: int) -> Fraction:
        return self.coords[i]

    def __sub__(self, other: "Point") -> Tuple[Fraction, ...]:
        return tuple(a - b for a, b in zip(self.coords, other.coords))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class Cube:
    """The enclosing cube [0, side]^dim."""

    side: int
    dim: int

    def __post_init__(self) -> None:
        if self.side < 1:
            raise GeometryError(f"cube side must be >= 1, got {self.side}")
        if self.dim < 2:
            raise GeometryError(f"cube dimension must be >= 2, got {self.dim}")

    @property
    def volume(self) -> int:
        return self.side**self.dim

    def contains_strictly(self, p: Point) -> bool:
        return all(0 < x < self.side for x in p.coords)


@dataclass(frozen=True)
class CellIndex:
    """Cell j in {1..t}^n of a cutting; ``level`` is set for dyadic cuttings."""

    t: int
    j: Tuple[int, ...]
    level: Optional[int] = None

    def __post_init__(self) -> None:
        if any(not 1 <= ji <= self.t for ji in self.j):
            raise GeometryError(f"cell index {self.j} outside 1..{self.t}")


@dataclass(frozen=True)
class Cutting:
    cube: Cube
    t: int
    level: Optional[int] = None
    width: Fraction = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.t < 1:
            raise GeometryError(f"cutting resolution must be >= 1, got {self.t}")
        if self.level is not None and 2**self.level != self.t:
            raise NotDyadic(f"level {self.level} does not match t={self.t}")
        object.__setattr__(self, "width", Fraction(self.cube.side, self.t))

    @property
    def kind(self) -> str:
        return "uniform" if self.level is None else "dyadic"

    @property
    def dim(self) -> int:
        return self.cube.dim

    @property
    def cell_count(self) -> int:
        return self.t**self.cube.dim

    def cell_box(self, cell: CellIndex) -> List[Tuple[Fraction, Fraction]]:
        """Open box of ``cell`` as (lower, upper) pairs per axis."""
        h = self.width
        return [((ji - 1) * h, ji * h) for ji in cell.j]

    def cells(self) -> Iterator[CellIndex]:
        for j in product(range(1, self.t + 1), repeat=self.cube.dim):
            yield CellIndex(self.t, j, self.level)


def make_cutting(cube: Cube, t: int) -> Cutting:
    """Subdivide ``cube`` into t^n congruent open cells."""
    return Cutting(cube, t)


def dyadic_cutting(cube: Cube, level: int) -> Cutting:
    if level < 0:
        raise GeometryError(f"dyadic level must be >= 0, got {level}")
    return Cutting(cube, 2**level, level)


def locate(cutting: Cutting, p: Point) -> CellIndex:
    """Return the unique open cell containing ``p``."""
    a = cutting.cube.side
    if p.dim != cutting.dim:
        raise GeometryError(f"point has dimension {p.dim}, cutting has {cutting.dim}")
    j: List[int] = []
    for x in p.coords:
        if x <= 0 or x >= a:
            raise OutOfCube(f"{p} is not strictly inside [0,{a}]^{cutting.dim}")
        s = x * cutting.t / a
        if s.denominator == 1:
            raise OnBoundary(f"{p} lies on a wall of the t={cutting.t} cutting")
        j.append(math.floor(s) + 1)
    return CellIndex(cutting.t, tuple(j), cutting.level)


def parent_cell(cell: CellIndex) -> CellIndex:
    """The level-(i-1) dyadic cell containing a level-i cell."""
    if cell.level is None:
        raise NotDyadic("parent cells exist only in dyadic cuttings")
    if cell.level == 0:
        raise NoParent("level 0 is the whole cube")
    return CellIndex(cell.t // 2, tuple((ji + 1) // 2 for ji in cell.j), cell.level - 1)


def dyadic_depth(side: int) -> int:
    """I = ceil(log2 a) + 1, so level-I cells have side a/2^I <= 1/2."""
    if side < 1:
        raise GeometryError(f"cube side must be >= 1, got {side}")
    return (side - 1).bit_length() + 1


def lattice_side(count: int, dim: int) -> int:
    """Smallest integer a with a^dim >= count."""
    if count < 1:
        raise GeometryError(f"point count must be >= 1, got {count}")
    a = max(1, round(count ** (1.0 / dim)))
    while a**dim < count:
        a += 1
    while a > 1 and (a - 1) ** dim >= count:
        a -= 1
    return a


def dyadic_depth_for(count: int, dim: int) -> int:
    return dyadic_depth(lattice_side(count, dim))


def common_denominator(points: Sequence[Point]) -> int:
    """Least common multiple of every coordinate denominator."""
    return reduce(math.lcm, (x.denominator for p in points for x in p.coords), 1)


def dot(u: Sequence[Union[int, Fraction]], v: Sequence[Union[int, Fraction]]) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def primitive_vector(vec: Sequence[Union[int, Fraction]]) -> Tuple[int, ...]:
    """Scale a nonzero rational vector to coprime integers, first nonzero entry positive."""
    fracs = [Fraction(x) for x in vec]
    if not any(fracs):
        raise GeometryError("the zero vector has no primitive form")
    scale = reduce(math.lcm, (f.denominator for f in fracs), 1)
    ints = [int(f * scale) for f in fracs]
    g = reduce(math.gcd, (abs(x) for x in ints), 0)
    ints = [x // g for x in ints]
    if next(x for x in ints if x != 0) < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def avoids_grids(x: Union[int, Fraction], side: int, horizon: int) -> bool:
    """True when x lies on no wall of any uniform cutting of [0, side] with t <= horizon."""
    return (Fraction(x) / side).denominator > horizon


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % f for f in range(3, math.isqrt(n) + 1, 2))


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    candidate = max(n + 1, 2)
    while not is_prime(candidate):
        candidate += 1
    return candidate
