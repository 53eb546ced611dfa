"""Defining tuples, the point index i(x,S) and the pigeonhole on index levels.

A same-cell (r+1)-tuple of points of S is *defining* at level i when no other
member of the family contains all of it. The index of x on S is the least
dyadic level at which x belongs to no defining tuple; cells only shrink with
the level, so membership is monotone and an ascending scan can stop early.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil, comb, log
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from ..errors import (
    GeometryError,
    NoDefiningTupleAtLevel0,
    NotSameCell,
    PointNotOnSurface,
    SubsetCapExceeded,
)
from ..exact import Cutting, Point, dyadic_cutting, locate
from ..flats.base import Flat, FlatFamily
from ..incidence import IncidenceStructure, SpannedFamily, _parallel_map, build_incidences
from ..pointgen import PointSet

logger = logging.getLogger(__name__)

Family = Union[FlatFamily, SpannedFamily]


def is_defining_tuple(
    points: Sequence[Point], S: Flat, family: Iterable[Flat], cutting: Optional[Cutting] = None
) -> bool:
    """True iff no member of ``family`` other than S contains every point."""
    if len(set(points)) != len(points):
        raise GeometryError("defining tuples are made of distinct points")
    for p in points:
        if not S.contains(p):
            raise PointNotOnSurface(f"{p} is not on {S.describe()}")
    if cutting is not None and len({locate(cutting, p).j for p in points}) > 1:
        raise NotSameCell(f"{len(points)} points do not share a cell of the t={cutting.t} cutting")
    return not any(m != S and all(m.contains(p) for p in points) for m in family)


class ProofContext:
    """Incidences of a family in id form plus the dyadic cell of every point per level.

    ``on_flat[f]`` lists point ids on member f, ``through[x]`` the members through
    point x. Only the members kept here count as "other surfaces" when deciding
    whether a tuple is defining.
    """

    def __init__(
        self,
        P: PointSet,
        family: Family,
        incidences: Optional[IncidenceStructure] = None,
        depth: Optional[int] = None,
        subset_cap: int = 10**6,
    ) -> None:
        self.P = P
        self.family = family
        self.r = family.r
        self.subset_cap = subset_cap
        IS = incidences if incidences is not None else build_incidences(P, family)
        self.on_flat: List[Tuple[int, ...]] = IS.point_lists()
        through: List[set] = [set() for _ in range(P.N)]
        for f, ids in enumerate(self.on_flat):
            for i in ids:
                through[i].add(f)
        self.through: List[FrozenSet[int]] = [frozenset(s) for s in through]
        self.depth = P.depth if depth is None else depth
        self.cells: List[List[Tuple[int, ...]]] = [
            [locate(dyadic_cutting(P.cube, level), p).j for p in P] for level in range(self.depth + 1)
        ]

    @classmethod
    def rich(
        cls,
        P: PointSet,
        IS: IncidenceStructure,
        k: int,
        depth: Optional[int] = None,
        subset_cap: int = 10**6,
    ) -> "ProofContext":
        """Context over the k-rich members of ``IS.flats`` only."""
        keep = [f for f, size in enumerate(IS.sizes) if size >= k]
        source = IS.flats
        members = tuple(source[f] for f in keep)
        family = FlatFamily(
            members,
            r=source.r,
            ambient_dim=source.ambient_dim,
            flat_dim=source.flat_dim,
            allow_duplicates=getattr(source, "allow_duplicates", False),
        )
        rich_IS = IncidenceStructure.from_lists(P, family, [IS.point_ids(f) for f in keep])
        logger.debug(f"{len(keep)} of {len(IS)} members are {k}-rich")
        return cls(P, family, rich_IS, depth=depth, subset_cap=subset_cap)

    def __len__(self) -> int:
        return len(self.on_flat)

    def point_id(self, x: Point) -> int:
        try:
            return self.P.points.index(x)
        except ValueError:
            raise PointNotOnSurface(f"{x} is not a point of the set") from None

    def flat_id(self, S: Flat) -> int:
        for f in range(len(self.family)):
            if self.family[f] == S:
                return f
        raise GeometryError(f"{S.describe()} is not a member of the family")

    def is_defining(self, ids: Sequence[int], f: int) -> bool:
        holders = set(self.through[ids[0]])
        for i in ids[1:]:
            holders &= self.through[i]
            if len(holders) <= 1:
                break
        return holders == {f}

    def cell_groups(self, f: int, level: int) -> Dict[Tuple[int, ...], List[int]]:
        groups: Dict[Tuple[int, ...], List[int]] = {}
        cells = self.cells[level]
        for i in self.on_flat[f]:
            groups.setdefault(cells[i], []).append(i)
        return groups

    def _check_cap(self, size: int, r: int) -> None:
        if comb(size, r) > self.subset_cap:
            raise SubsetCapExceeded(
                f"{comb(size, r)} subsets of {size} same-cell points exceed the cap {self.subset_cap}"
            )

    def in_defining_tuple(self, x: int, f: int, level: int) -> bool:
        cells = self.cells[level]
        others = [y for y in self.on_flat[f] if y != x and cells[y] == cells[x]]
        if len(others) < self.r:
            return False
        self._check_cap(len(others), self.r)
        return any(self.is_defining((x,) + rest, f) for rest in combinations(others, self.r))

    def defining_tuples(self, f: int, level: int) -> int:
        """Number of defining (r+1)-tuples for member f at ``level``."""
        count = 0
        for members in self.cell_groups(f, level).values():
            if len(members) <= self.r:
                continue
            self._check_cap(len(members), self.r + 1)
            count += sum(1 for tup in combinations(members, self.r + 1) if self.is_defining(tup, f))
        return count

    def has_defining_tuple(self, f: int, level: int = 0) -> bool:
        for members in self.cell_groups(f, level).values():
            if len(members) <= self.r:
                continue
            self._check_cap(len(members), self.r + 1)
            if any(self.is_defining(tup, f) for tup in combinations(members, self.r + 1)):
                return True
        return False

    def index(self, x: int, f: int) -> int:
        """Least level at which x is in no defining tuple for f; depth+1 if none."""
        for level in range(self.depth + 1):
            if not self.in_defining_tuple(x, f, level):
                if level == 0 and not self.has_defining_tuple(f, 0):
                    raise NoDefiningTupleAtLevel0(
                        f"{self.family[f].describe()} has no defining {self.r + 1}-tuple at level 0"
                    )
                return level
        return self.depth + 1

    def membership_levels(self, x: int, f: int) -> List[bool]:
        return [self.in_defining_tuple(x, f, level) for level in range(self.depth + 1)]

    def full_scan_index(self, x: int, f: int) -> int:
        """Index from membership at every level, without early exit."""
        outside = [level for level, inside in enumerate(self.membership_levels(x, f)) if not inside]
        return min(outside, default=self.depth + 1)

    def finest_occupancy(self) -> int:
        return max(Counter(self.cells[self.depth]).values(), default=0)


def index_of(
    x: Point,
    S: Flat,
    P: PointSet,
    family: Family,
    I: Optional[int] = None,
    context: Optional[ProofContext] = None,
) -> int:
    ctx = context if context is not None else ProofContext(P, family, depth=I)
    f = ctx.flat_id(S)
    xi = ctx.point_id(x)
    if xi not in ctx.on_flat[f]:
        raise PointNotOnSurface(f"{x} is not on {S.describe()}")
    return ctx.index(xi, f)


def _flat_indices(ctx: ProofContext, flats: Sequence[int], threads: int) -> List[Tuple[int, object]]:
    """Per member: either a list of (point id, index) pairs or the rejection error."""

    def run(chunk: range) -> list:
        out = []
        for pos in chunk:
            f = flats[pos]
            try:
                out.append((f, [(x, ctx.index(x, f)) for x in ctx.on_flat[f]]))
            except NoDefiningTupleAtLevel0 as exc:
                out.append((f, exc))
        return out

    return _parallel_map(run, len(flats), threads)


@dataclass
class LemmaReport:
    depth: int
    pairs_checked: int = 0
    violations: List[Tuple[int, int, int]] = field(default_factory=list)
    rejected: List[int] = field(default_factory=list)
    finest_occupancy: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations and not self.rejected and self.finest_occupancy <= 1

    def to_dict(self) -> Dict[str, object]:
        return {
            "depth": self.depth,
            "pairs_checked": self.pairs_checked,
            "violations": [list(v) for v in self.violations],
            "rejected_flats": self.rejected,
            "finest_occupancy": self.finest_occupancy,
            "verdict": "pass" if self.passed else "fail",
        }


def index_lemma_check(
    P: PointSet,
    family: Family,
    I: Optional[int] = None,
    context: Optional[ProofContext] = None,
    threads: int = 1,
) -> LemmaReport:
    """Check 1 <= i(x,S) <= I on every incident pair."""
    ctx = context if context is not None else ProofContext(P, family, depth=I)
    report = LemmaReport(depth=ctx.depth, finest_occupancy=ctx.finest_occupancy())
    for f, result in _flat_indices(ctx, range(len(ctx)), threads):
        if isinstance(result, NoDefiningTupleAtLevel0):
            report.rejected.append(f)
            continue
        for x, i in result:
            report.pairs_checked += 1
            if not 1 <= i <= ctx.depth:
                report.violations.append((x, f, i))
    if not report.passed:
        logger.warning(
            f"⚠️  index bounds failed: {len(report.violations)} violations, "
            f"{len(report.rejected)} members without a level-0 defining tuple"
        )
    return report


@dataclass
class IndexTable:
    k: int
    depth: int
    index: Dict[Tuple[int, int], int]
    class_sizes: Dict[int, List[int]]
    flat_level: Dict[int, int]
    level: Optional[int]
    level_class: List[int]
    considered: int
    rejected: List[int] = field(default_factory=list)

    def members(self, f: int, level: int) -> List[int]:
        """Point ids of member f with index ``level``, ascending."""
        return sorted(x for (x, g), i in self.index.items() if g == f and i == level)

    @property
    def class_threshold(self) -> Fraction:
        return Fraction(self.k, 2 * self.depth)

    @property
    def pigeonhole_holds(self) -> bool:
        return len(self.level_class) * 2 * self.depth >= self.considered

    def to_dict(self) -> Dict[str, object]:
        return {
            "k": self.k,
            "depth": self.depth,
            "level": self.level,
            "considered": self.considered,
            "level_class_size": len(self.level_class),
            "level_histogram": {str(lv): n for lv, n in sorted(Counter(self.flat_level.values()).items())},
            "class_sizes": {str(f): sizes for f, sizes in sorted(self.class_sizes.items())},
            "class_threshold": str(self.class_threshold),
            "pigeonhole": self.pigeonhole_holds,
            "rejected_flats": self.rejected,
        }


def pigeonhole_levels(
    P: PointSet,
    family: Family,
    k: int,
    I: Optional[int] = None,
    context: Optional[ProofContext] = None,
    threads: int = 1,
) -> IndexTable:
    """Pick i(S) per member, then the most common level and the members at it.

    i(S) is the least level whose index class holds at least k/2I points. Ties
    in the majority go to the smaller level. Members with fewer than k points
    are left out, members without a level-0 defining tuple are recorded as
    rejected.
    """
    ctx = context if context is not None else ProofContext(P, family, depth=I)
    depth = ctx.depth
    rich = [f for f in range(len(ctx)) if len(ctx.on_flat[f]) >= k]
    index: Dict[Tuple[int, int], int] = {}
    class_sizes: Dict[int, List[int]] = {}
    flat_level: Dict[int, int] = {}
    rejected: List[int] = []
    for f, result in _flat_indices(ctx, rich, threads):
        if isinstance(result, NoDefiningTupleAtLevel0):
            rejected.append(f)
            continue
        sizes = [0] * (depth + 2)
        for x, i in result:
            index[(x, f)] = i
            sizes[i] += 1
        class_sizes[f] = sizes
        chosen = next((lv for lv, size in enumerate(sizes) if size * 2 * depth >= k), None)
        if chosen is not None:
            flat_level[f] = chosen
    histogram = Counter(flat_level.values())
    level = min(histogram, key=lambda lv: (-histogram[lv], lv)) if histogram else None
    level_class = sorted(f for f, lv in flat_level.items() if lv == level)
    table = IndexTable(
        k=k,
        depth=depth,
        index=index,
        class_sizes=class_sizes,
        flat_level=flat_level,
        level=level,
        level_class=level_class,
        considered=len(flat_level),
        rejected=sorted(rejected),
    )
    logger.info(f"index level {level} holds {len(level_class)} of {len(flat_level)} members")
    return table


@dataclass
class CaseOneCount:
    level: Optional[int]
    defining: int
    same_cell_tuples: int
    lower_bound: Fraction
    case: str
    split_lhs: int
    split_rhs: float

    @property
    def holds(self) -> bool:
        return self.defining >= self.lower_bound

    def to_dict(self) -> Dict[str, object]:
        return {
            "level": self.level,
            "case": self.case,
            "split": {"k": self.split_lhs, "c0_scale": self.split_rhs},
            "defining_tuples": self.defining,
            "same_cell_tuples": self.same_cell_tuples,
            "lower_bound": str(self.lower_bound),
            "holds": self.holds,
        }


def case_one_count(ctx: ProofContext, table: IndexTable, c0: float = 1.0) -> CaseOneCount:
    """Count defining tuples one level above the selected index level.

    Every point of index i sits in a defining tuple at level i-1, and a tuple
    defines at most one member, so the count is at least |class|·(k/2I)/(r+1).
    The case label records whether k <= c0·4^i·log N·log k.
    """
    level, k, N = table.level, table.k, ctx.P.N
    rhs = c0 * 4 ** (level or 0) * log(max(N, 2)) * log(max(k, 2))
    case = "case 1" if k <= rhs else "case 2"
    if not level:
        return CaseOneCount(level, 0, 0, Fraction(0), case, k, rhs)
    defining = same_cell = 0
    for f in table.level_class:
        for members in ctx.cell_groups(f, level - 1).values():
            same_cell += comb(len(members), ctx.r + 1)
        defining += ctx.defining_tuples(f, level - 1)
    bound = len(table.level_class) * table.class_threshold / (ctx.r + 1)
    return CaseOneCount(level, defining, same_cell, bound, case, k, rhs)


def core_size(k: int, depth: int) -> int:
    """|P0(S)| = ceil(k / 2I)."""
    return ceil(Fraction(k, 2 * depth))
