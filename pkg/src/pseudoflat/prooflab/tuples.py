"""Double counting of good r-tuples over a uniform cutting.

A good r-tuple is r distinct points in one open cell. The total M is counted
per cell; each k-rich flat contributes its own good tuples, and on a type-r
family no tuple is shared, so the flat-wise sum stays below M.
"""
from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import SubsetCapExceeded
from ..exact import CellIndex, Cutting, locate, make_cutting
from ..flats.base import Flat, FlatFamily
from ..flats.cells import nonempty_cells
from ..incidence import IncidenceStructure, build_incidences
from ..pointgen import PointSet

logger = logging.getLogger(__name__)


@dataclass
class TupleCount:
    t: int
    level: Optional[int]
    r: int
    M: int
    occupancy: Dict[Tuple[int, ...], int]

    def to_dict(self) -> Dict[str, object]:
        return {
            "t": self.t,
            "level": self.level,
            "r": self.r,
            "M": self.M,
            "nonempty_cells": len(self.occupancy),
            "max_occupancy": max(self.occupancy.values(), default=0),
        }


def cells_of(P: PointSet, cutting: Cutting, ids: Optional[Sequence[int]] = None) -> List[CellIndex]:
    ids = range(P.N) if ids is None else ids
    return [locate(cutting, P[i]) for i in ids]


def good_tuples(P: PointSet, cutting: Cutting, r: int) -> TupleCount:
    """M = sum over cells of C(n_cell, r), unordered tuples."""
    occupancy = Counter(c.j for c in cells_of(P, cutting))
    M = sum(comb(n, r) for n in occupancy.values())
    return TupleCount(cutting.t, cutting.level, r, M, dict(occupancy))


def good_tuples_in_flat(
    P: PointSet, cutting: Cutting, V: Flat, r: int, on_flat: Optional[Sequence[int]] = None
) -> int:
    """Good r-tuples made of points of P on V."""
    ids = on_flat if on_flat is not None else [i for i, p in enumerate(P) if V.contains(p)]
    occupancy = Counter(c.j for c in cells_of(P, cutting, ids))
    return sum(comb(n, r) for n in occupancy.values())


@dataclass
class Theorem13Report:
    k: int
    r: int
    n: int
    N: int
    t: int
    M_total: int
    rich_count: int
    flat_tuples: List[int] = field(default_factory=list)
    flat_cells: List[int] = field(default_factory=list)
    tuple_multiplicity: int = 0
    envelope: float = 0.0

    @property
    def flat_sum(self) -> int:
        return sum(self.flat_tuples)

    @property
    def exclusivity_holds(self) -> bool:
        return self.flat_sum <= self.M_total

    @property
    def type_r_holds(self) -> bool:
        return self.tuple_multiplicity <= 1

    @property
    def implied_bound(self) -> Optional[float]:
        """M_total / min M_flat, an upper bound on the number of k-rich flats."""
        smallest = min(self.flat_tuples, default=0)
        return self.M_total / smallest if smallest else None

    @property
    def bound_status(self) -> str:
        """One of holds, fails or "no bound"; the last when a k-rich flat has no good tuple at this t."""
        if self.rich_count == 0:
            return "holds"
        smallest = min(self.flat_tuples, default=0)
        if not smallest:
            return "no bound"
        return "holds" if self.rich_count * smallest <= self.M_total else "fails"

    @property
    def bound_holds(self) -> bool:
        return self.bound_status != "fails"

    @property
    def passed(self) -> bool:
        return self.exclusivity_holds and self.type_r_holds and self.bound_holds

    def to_dict(self) -> Dict[str, object]:
        return {
            "k": self.k,
            "r": self.r,
            "n": self.n,
            "N": self.N,
            "t": self.t,
            "M_total": self.M_total,
            "rich_count": self.rich_count,
            "flat_tuple_sum": self.flat_sum,
            "min_flat_tuples": min(self.flat_tuples, default=0),
            "tuple_multiplicity": self.tuple_multiplicity,
            "exclusivity": self.exclusivity_holds,
            "implied_bound": self.implied_bound,
            "bound": self.bound_status,
            "bound_holds": self.bound_holds,
            "max_cells_per_flat": max(self.flat_cells, default=0),
            "k_over_r": self.k / self.r,
            "envelope": self.envelope,
            "verdict": "pass" if self.passed else "fail",
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def theorem13_diagnostic(
    P: PointSet,
    F: FlatFamily,
    k: int,
    incidences: Optional[IncidenceStructure] = None,
    subset_cap: int = 10**6,
) -> Theorem13Report:
    """Compare the two counts of good r-tuples on a concrete instance.

    The cutting uses t = max(1, floor(k / 2r)). Every k-rich flat's good tuples
    are enumerated so that a tuple shared by two flats shows up as a
    multiplicity above one.
    """
    r = F.r
    t = max(1, k // (2 * r))
    cutting = make_cutting(P.cube, t)
    total = good_tuples(P, cutting, r)
    IS = incidences if incidences is not None else build_incidences(P, F)
    cell_of = {i: c.j for i, c in enumerate(cells_of(P, cutting))}
    report = Theorem13Report(
        k=k, r=r, n=P.n, N=P.N, t=t, M_total=total.M, rich_count=0,
        envelope=P.N**r / k ** (P.n * (r - 1) + 1),
    )
    shared: Counter = Counter()
    for f in range(len(IS)):
        ids = IS.point_ids(f)
        if len(ids) < k:
            continue
        report.rich_count += 1
        by_cell: Dict[Tuple[int, ...], List[int]] = {}
        for i in ids:
            by_cell.setdefault(cell_of[i], []).append(i)
        report.flat_tuples.append(sum(comb(len(v), r) for v in by_cell.values()))
        report.flat_cells.append(nonempty_cells(F[f], cutting))
        for members in by_cell.values():
            if comb(len(members), r) > subset_cap:
                raise SubsetCapExceeded(f"{comb(len(members), r)} tuples in one cell exceed the cap {subset_cap}")
            shared.update(combinations(members, r))
    report.tuple_multiplicity = max(shared.values(), default=0)
    if report.bound_status == "no bound":
        logger.info(f"no implied bound at k={k}: a {k}-rich flat has no good {r}-tuple at t={t}")
    if not report.passed:
        logger.warning(f"⚠️  good-tuple double count failed at k={k}: {report.to_dict()}")
    return report
