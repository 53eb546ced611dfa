"""Abstract flat interface and the family container."""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

from ..errors import DimensionMismatch, DuplicateFlat
from ..exact import Point
from .polynomial import Interval, Poly

LinearRow = Tuple[Tuple[int, ...], Fraction]


class Flat(ABC):
    """A curve or surface with an exact membership predicate.

    Subclasses are immutable. Two flats are equal iff their kinds and canonical
    keys are equal, so a family can deduplicate by hashing.
    """

    kind: str = "flat"

    @property
    @abstractmethod
    def ambient_dim(self) -> int:
        raise NotImplementedError

    @property
    @abstractmethod
    def flat_dim(self) -> int:
        raise NotImplementedError

    @property
    @abstractmethod
    def degree(self) -> int:
        raise NotImplementedError

    @abstractmethod
    def key(self) -> tuple:
        """Canonical representation; equal for equal flats."""
        raise NotImplementedError

    @abstractmethod
    def equations(self) -> List[Poly]:
        raise NotImplementedError

    def contains(self, p: Point) -> bool:
        return all(eq.evaluate(p.coords) == 0 for eq in self.equations())

    def linear_system(self) -> Optional[List[LinearRow]]:
        """Rows (normal, rhs) with normal·x = rhs, for flats cut out by linear equations."""
        return None

    def meets_closed_box(self, box: Sequence[Interval]) -> bool:
        """Conservative test: False only when the flat misses the closed box."""
        for eq in self.equations():
            lo, hi = eq.interval(box)
            if lo > 0 or hi < 0:
                return False
        return True

    def describe(self) -> str:
        return f"{self.kind}: " + ", ".join(f"{eq} = 0" for eq in self.equations())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Flat) and self.kind == other.kind and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.kind, self.key()))

    def __repr__(self) -> str:
        return f"<{self.describe()}>"


class EmptyFlat(Flat):
    """The empty intersection of two surfaces. A value, never an error."""

    kind = "empty"

    def __init__(self, ambient_dim: int = 3) -> None:
        self._ambient_dim = ambient_dim

    @property
    def ambient_dim(self) -> int:
        return self._ambient_dim

    @property
    def flat_dim(self) -> int:
        return 1

    @property
    def degree(self) -> int:
        return 0

    def key(self) -> tuple:
        return (self._ambient_dim,)

    def equations(self) -> List[Poly]:
        return [Poly.constant(self._ambient_dim, 1)]

    def contains(self, p: Point) -> bool:
        return False

    def meets_closed_box(self, box: Sequence[Interval]) -> bool:
        return False

    def describe(self) -> str:
        return "empty"


def incident(f: Flat, p: Point) -> bool:
    """Exact membership of ``p`` in ``f``."""
    if p.dim != f.ambient_dim:
        raise DimensionMismatch(f"point in R^{p.dim} tested against a flat in R^{f.ambient_dim}")
    return f.contains(p)


@dataclass(frozen=True)
class FlatFamily:
    """A type-r family of flats sharing ambient and flat dimension.

    ``allow_duplicates`` exists so that broken families can be built and then
    caught by ``check_type_r``; every constructor in this package leaves it off.
    """

    members: Tuple[Flat, ...]
    r: int
    ambient_dim: Optional[int] = None
    flat_dim: Optional[int] = None
    allow_duplicates: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(self.members))
        if self.members:
            first = self.members[0]
            if self.ambient_dim is None:
                object.__setattr__(self, "ambient_dim", first.ambient_dim)
            if self.flat_dim is None:
                object.__setattr__(self, "flat_dim", first.flat_dim)
        for m in self.members:
            if m.ambient_dim != self.ambient_dim or m.flat_dim != self.flat_dim:
                raise DimensionMismatch(
                    f"family mixes {m.flat_dim}-flats in R^{m.ambient_dim} with "
                    f"{self.flat_dim}-flats in R^{self.ambient_dim}"
                )
        if not self.allow_duplicates and len(set(self.members)) != len(self.members):
            raise DuplicateFlat("family members must be distinct")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Flat]:
        return iter(self.members)

    def __getitem__(self, i: int) -> Flat:
        return self.members[i]

    def index(self, flat: Flat) -> int:
        return self.members.index(flat)
