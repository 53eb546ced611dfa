"""Algebraic sets given by a list of polynomial equations.

Irreducibility is assumed, not tested. The canonical form makes each equation
monic, then sorts and deduplicates the list; two different equation lists for
the same set are therefore distinct flats.
"""
from __future__ import annotations

from typing import List, Sequence

from ..errors import DimensionMismatch, GeometryError
from .base import Flat
from .polynomial import Poly


class Implicit(Flat):
    kind = "implicit"
    __slots__ = ("polys", "_flat_dim")

    def __init__(self, equations: Sequence[Poly], flat_dim: int) -> None:
        eqs = [eq.monic() for eq in equations if not eq.is_zero()]
        if not eqs:
            raise GeometryError("an implicit flat needs at least one nonzero equation")
        n = eqs[0].nvars
        if any(eq.nvars != n for eq in eqs):
            raise DimensionMismatch("equations use different numbers of variables")
        if not 1 <= flat_dim < n:
            raise DimensionMismatch(f"flat dimension {flat_dim} impossible in R^{n}")
        unique = {eq.key(): eq for eq in eqs}
        self.polys: tuple = tuple(unique[k] for k in sorted(unique))
        self._flat_dim = flat_dim

    @property
    def ambient_dim(self) -> int:
        return self.polys[0].nvars

    @property
    def flat_dim(self) -> int:
        return self._flat_dim

    @property
    def degree(self) -> int:
        return max(eq.degree for eq in self.polys)

    def key(self) -> tuple:
        return (self._flat_dim, tuple(eq.key() for eq in self.polys))

    def equations(self) -> List[Poly]:
        return list(self.polys)

    def linear_equations(self) -> List[Poly]:
        return [eq for eq in self.polys if eq.degree == 1]
