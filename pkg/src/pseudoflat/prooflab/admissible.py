"""Admissible triples (S, V, j) at the selected index level, and the combined surface report.

A triple is admissible when V = S ∩ S' for another member S' and V carries at
least 2^l points of P inside the level cell j. The density exponent l is chosen
by pigeonholing the occupancy of the core points P0(S) over the level cells.
"""
from __future__ import annotations

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..errors import PointNotOnSurface, SubsetCapExceeded
from ..exact import Point
from ..flats.algebra import intersect_surfaces
from ..flats.base import Flat
from ..incidence import IncidenceStructure
from ..pointgen import PointSet
from .index import (
    CaseOneCount,
    Family,
    IndexTable,
    LemmaReport,
    ProofContext,
    case_one_count,
    core_size,
    index_lemma_check,
    pigeonhole_levels,
)

logger = logging.getLogger(__name__)


class _NotAligned:
    """Marker for a cell whose points do not sit on one intersection curve."""

    _instance: Optional["_NotAligned"] = None

    def __new__(cls) -> "_NotAligned":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return "NOT_ALIGNED"


NOT_ALIGNED = _NotAligned()


def uniqueness_of_cell_curve(
    points: Sequence[Point], S: Flat, family: Family, subset_cap: int = 10**6
) -> Union[Flat, _NotAligned]:
    """The single curve S ∩ S' carrying every point, or NOT_ALIGNED.

    Every (r+1)-subset must lie on some other member; the curves obtained from
    all such members have to coincide.
    """
    r = family.r
    if len(points) < r + 1:
        return NOT_ALIGNED
    for p in points:
        if not S.contains(p):
            raise PointNotOnSurface(f"{p} is not on {S.describe()}")
    if comb(len(points), r + 1) > subset_cap:
        raise SubsetCapExceeded(f"{comb(len(points), r + 1)} subsets exceed the cap {subset_cap}")
    # only members through at least r+1 of the points can hold a subset
    nearby = [
        m for m in family if m != S and sum(1 for p in points if m.contains(p)) >= r + 1
    ]
    curves = set()
    for subset in combinations(points, r + 1):
        holders = [m for m in nearby if all(m.contains(p) for p in subset)]
        if not holders:
            return NOT_ALIGNED
        curves.update(intersect_surfaces(S, m) for m in holders)
    if len(curves) != 1:
        logger.warning(f"⚠️  {len(curves)} distinct curves through one cell of {S.describe()}")
        return NOT_ALIGNED
    curve = curves.pop()
    if not all(curve.contains(p) for p in points):
        return NOT_ALIGNED
    return curve


@dataclass
class DensityChoice:
    """Occupancy pigeonhole of the core points over the cells at the index level."""

    log_k: int
    core: Dict[int, List[int]]
    cells_at_density: Dict[int, List[int]]
    flat_exponent: Dict[int, int]
    exponent: Optional[int]
    dense_flats: List[int]

    @property
    def threshold(self) -> int:
        return 2 ** (self.exponent or 0)

    @property
    def m(self) -> int:
        """Smallest count of dense cells over the selected members."""
        if self.exponent is None or not self.dense_flats:
            return 0
        return min(self.cells_at_density[f][self.exponent] for f in self.dense_flats)


def _occupancy(ctx: ProofContext, ids: Sequence[int], level: int) -> Counter:
    cells = ctx.cells[level]
    return Counter(cells[i] for i in ids)


def select_density(ctx: ProofContext, table: IndexTable) -> DensityChoice:
    """Choose l(S) maximizing m(l,S)·2^(l+1), then the most common l over the level class.

    Cells count toward m(l,S) when they hold between 2^l and 2^(l+1) core points,
    both ends included. Ties go to the smaller exponent.
    """
    k, level = table.k, table.level
    log_k = k.bit_length() - 1
    size = core_size(k, table.depth)
    core: Dict[int, List[int]] = {}
    density: Dict[int, List[int]] = {}
    chosen: Dict[int, int] = {}
    for f in table.level_class:
        core[f] = table.members(f, level)[:size]
        counts = _occupancy(ctx, core[f], level).values()
        density[f] = [
            sum(1 for c in counts if 2**l <= c <= 2 ** (l + 1)) for l in range(log_k + 1)
        ]
        chosen[f] = max(range(log_k + 1), key=lambda l: (density[f][l] * 2 ** (l + 1), -l))
    histogram = Counter(chosen.values())
    exponent = min(histogram, key=lambda l: (-histogram[l], l)) if histogram else None
    dense = sorted(f for f, l in chosen.items() if l == exponent)
    return DensityChoice(log_k, core, density, chosen, exponent, dense)


@dataclass
class AdmissibleCount:
    level: Optional[int]
    exponent: Optional[int]
    admissible: int
    witnesses: List[Tuple[int, int, Tuple[int, ...], int]] = field(default_factory=list)
    dense_count: int = 0
    m: int = 0
    level_cells: int = 0
    max_curves_per_cell: int = 0
    max_surfaces_per_curve_cell: int = 0
    density_holds: bool = True
    enough_points: bool = False
    enough_points_ratio: bool = False
    r: int = 2

    @property
    def threshold(self) -> int:
        return 2 ** (self.exponent or 0)

    @property
    def lower_bound(self) -> int:
        return self.dense_count * self.m

    @property
    def lower_bound_holds(self) -> bool:
        return self.admissible >= self.lower_bound

    @property
    def valid_instance(self) -> bool:
        """Cells at the threshold hold enough points to force a shared curve."""
        return self.enough_points

    def to_dict(self) -> Dict[str, object]:
        return {
            "level": self.level,
            "threshold": self.threshold,
            "admissible": self.admissible,
            "dense_flats": self.dense_count,
            "m": self.m,
            "lower_bound": self.lower_bound,
            "lower_bound_holds": self.lower_bound_holds,
            "density_check": self.density_holds,
            "enough_points": {
                "ratio": self.enough_points_ratio,
                "above_r_plus_one": self.enough_points,
            },
            "upper_ingredients": {
                "level_cells": self.level_cells,
                "max_curves_per_cell": self.max_curves_per_cell,
                "max_surfaces_per_curve_cell": self.max_surfaces_per_curve_cell,
            },
            "witnesses": [
                {"surface": s, "partner": g, "cell": list(j), "points": n}
                for s, g, j, n in self.witnesses
            ],
        }


def admissible_triples(
    P: PointSet,
    family: Family,
    table: IndexTable,
    exponent: Optional[int] = None,
    context: Optional[ProofContext] = None,
    choice: Optional[DensityChoice] = None,
) -> AdmissibleCount:
    """Count every admissible (S, V, j) exactly.

    V ∩ P equals the common incidences of S and S', so only partners sharing at
    least 2^l points with S are intersected. Partners giving the same curve
    count once.
    """
    ctx = context if context is not None else ProofContext(P, family, depth=table.depth)
    choice = choice if choice is not None else select_density(ctx, table)
    if exponent is None:
        exponent = choice.exponent
    level = table.level
    result = AdmissibleCount(level=level, exponent=exponent, admissible=0, r=ctx.r)
    if level is None or exponent is None:
        return result
    threshold = 2**exponent
    k, depth, log_k = table.k, table.depth, choice.log_k
    result.dense_count = len(choice.dense_flats) if exponent == choice.exponent else 0
    result.m = choice.m if exponent == choice.exponent else 0
    result.level_cells = 2 ** (P.n * level)
    result.density_holds = all(
        choice.cells_at_density[f][exponent] * 2 ** (exponent + 1) * 4 * depth * log_k >= k
        for f in choice.dense_flats
    )
    result.enough_points = threshold >= ctx.r + 1
    result.enough_points_ratio = result.m > 0 and threshold * 8 * depth * log_k * result.m >= k

    curves_in_cell: Dict[Tuple[int, ...], set] = defaultdict(set)
    surfaces_on: Counter = Counter()
    members = ctx.family
    for f in range(len(ctx)):
        shared: Dict[int, List[int]] = defaultdict(list)
        for x in ctx.on_flat[f]:
            for g in ctx.through[x]:
                if g != f:
                    shared[g].append(x)
        seen = set()
        for g in sorted(shared):
            ids = shared[g]
            if len(ids) < threshold:
                continue
            curve = intersect_surfaces(members[f], members[g])
            if curve in seen:
                continue
            seen.add(curve)
            for j, n in sorted(_occupancy(ctx, ids, level).items()):
                if n >= threshold:
                    result.admissible += 1
                    result.witnesses.append((f, g, j, n))
                    curves_in_cell[j].add(curve)
                    surfaces_on[(j, curve)] += 1
    result.max_curves_per_cell = max((len(v) for v in curves_in_cell.values()), default=0)
    result.max_surfaces_per_curve_cell = max(surfaces_on.values(), default=0)
    if result.valid_instance and not result.lower_bound_holds:
        logger.warning(f"⚠️  {result.admissible} admissible triples, expected at least {result.lower_bound}")
    return result


@dataclass
class AlignmentCheck:
    cells_checked: int = 0
    aligned: int = 0
    failures: List[Tuple[int, Tuple[int, ...]]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            "cells_checked": self.cells_checked,
            "aligned": self.aligned,
            "failures": [{"surface": f, "cell": list(j)} for f, j in self.failures],
        }


def check_cell_alignment(ctx: ProofContext, table: IndexTable, choice: DensityChoice) -> AlignmentCheck:
    """Run the cell-curve uniqueness on every dense cell of the selected members."""
    report = AlignmentCheck()
    level = table.level
    for f in choice.dense_flats:
        groups: Dict[Tuple[int, ...], List[int]] = defaultdict(list)
        for i in choice.core[f]:
            groups[ctx.cells[level][i]].append(i)
        for j, ids in sorted(groups.items()):
            if len(ids) < max(ctx.r + 1, choice.threshold):
                continue
            report.cells_checked += 1
            curve = uniqueness_of_cell_curve(
                [ctx.P[i] for i in ids], ctx.family[f], ctx.family, ctx.subset_cap
            )
            if curve is NOT_ALIGNED:
                report.failures.append((f, j))
            else:
                report.aligned += 1
    return report


@dataclass
class SurfaceReport:
    k: int
    lemma: LemmaReport
    table: IndexTable
    case_one: CaseOneCount
    count: AdmissibleCount
    alignment: AlignmentCheck

    @property
    def passed(self) -> bool:
        checks = [self.lemma.passed, self.table.pigeonhole_holds, self.case_one.holds, self.count.density_holds]
        if self.count.valid_instance:
            checks += [self.count.lower_bound_holds, not self.alignment.failures]
        return all(checks)

    def to_dict(self) -> Dict[str, object]:
        return {
            "k": self.k,
            "levels": self.table.to_dict(),
            "lemma": self.lemma.to_dict(),
            "case_split": self.case_one.to_dict(),
            "admissible": self.count.to_dict(),
            "alignment": self.alignment.to_dict(),
            "verdict": "pass" if self.passed else "fail",
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def surface_diagnostic(
    P: PointSet,
    IS: IncidenceStructure,
    k: int,
    c0: float = 1.0,
    subset_cap: int = 10**6,
    threads: int = 1,
) -> SurfaceReport:
    """Run the index machinery on the k-rich members of an incidence structure."""
    ctx = ProofContext.rich(P, IS, k, subset_cap=subset_cap)
    lemma = index_lemma_check(P, ctx.family, context=ctx, threads=threads)
    table = pigeonhole_levels(P, ctx.family, k, context=ctx, threads=threads)
    choice = select_density(ctx, table)
    report = SurfaceReport(
        k=k,
        lemma=lemma,
        table=table,
        case_one=case_one_count(ctx, table, c0),
        count=admissible_triples(P, ctx.family, table, context=ctx, choice=choice),
        alignment=check_cell_alignment(ctx, table, choice) if table.level is not None else AlignmentCheck(),
    )
    logger.info(f"surface diagnostic k={k}: {'pass' if report.passed else 'fail'}")
    return report
