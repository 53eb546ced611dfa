"""Type-r parameters and the sampled type-r checker."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import GeometryError, UnparametrizableFlat, UnsupportedFlat
from ..exact import Point
from .algebra import rational_common_points, sample_points
from .base import FlatFamily

logger = logging.getLogger(__name__)


def type_r_bound(d: int, n: int, flat_dim: int) -> int:
    """r for which bounded-degree curves or surfaces form a type-r family.

    Two distinct plane curves of degree d share at most d^2 points (Bezout),
    so any d^2+1 points pin down at most one curve.
    """
    if d < 1 or n < 2:
        raise GeometryError(f"need d >= 1 and n >= 2, got d={d}, n={n}")
    if flat_dim == 1 and n == 2:
        return d * d + 1
    if flat_dim == 1:
        return d * (2 * d - 1) ** (n - 1) + 1
    if flat_dim == 2 and n == 3:
        return d * (2 * d - 1) ** 2 + 1
    raise UnsupportedFlat(f"no type-r parameter for {flat_dim}-dimensional flats in R^{n}")


@dataclass
class TypeRReport:
    r: int
    trials: int
    subsets_tested: int = 0
    max_multiplicity: int = 0
    witness_points: Optional[Tuple[Point, ...]] = None
    witness_members: Tuple[int, ...] = ()
    skipped_members: List[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_multiplicity <= 1

    def to_dict(self) -> Dict[str, object]:
        return {
            "r": self.r,
            "trials": self.trials,
            "subsets_tested": self.subsets_tested,
            "max_multiplicity": self.max_multiplicity,
            "verdict": "pass" if self.passed else "fail",
            "witness_points": [str(p) for p in self.witness_points or ()],
            "witness_members": list(self.witness_members),
        }


class _PointPool:
    """Per-member rational points, filled lazily as trials touch members."""

    def __init__(self, family: FlatFamily, rng: np.random.Generator, per_member: int, side: int):
        self.family = family
        self.rng = rng
        self.per_member = per_member
        self.side = side
        self.pools: Dict[int, List[Point]] = {}
        self.skipped: List[int] = []

    def points(self, idx: int) -> List[Point]:
        if idx not in self.pools:
            try:
                pts = sample_points(
                    self.family[idx], self.per_member, self.rng, side=self.side, inside=False
                )
            except (UnparametrizableFlat, GeometryError):
                pts = []
                self.skipped.append(idx)
            self.pools[idx] = pts
        return self.pools[idx]

    def add_common(self, i: int, j: int) -> None:
        # Pairwise common points are where type-r failures live.
        common = rational_common_points(self.family[i], self.family[j])
        for idx in (i, j):
            pool = self.points(idx)
            pool.extend(p for p in common if p not in pool)


def check_type_r(
    family: FlatFamily,
    trials: int,
    seed: int,
    per_member: Optional[int] = None,
    side: int = 16,
) -> TypeRReport:
    """Sample r-subsets of points on members and count the members containing each.

    Each trial picks a member, sometimes adds the rational points it shares with
    a random partner, and draws r points from its pool. A quarter of the subsets
    swap one point for a random lattice point so unrelated members get probed.
    """
    r = family.r
    rng = np.random.default_rng(seed)
    report = TypeRReport(r=r, trials=trials)
    if not len(family):
        return report
    pool = _PointPool(family, rng, per_member or 2 * r + 2, side)
    for _ in range(trials):
        idx = int(rng.integers(len(family)))
        if len(family) > 1 and rng.random() < 0.5:
            partner = int(rng.integers(len(family) - 1))
            pool.add_common(idx, partner + (partner >= idx))
        points = pool.points(idx)
        if len(points) < r:
            continue
        picks = rng.choice(len(points), size=r, replace=False)
        subset = tuple(points[int(i)] for i in sorted(picks))
        if rng.random() < 0.25:
            extra = Point.of(*(int(x) for x in rng.integers(0, side, size=family.ambient_dim)))
            if extra not in subset:
                subset = subset[:-1] + (extra,)
        report.subsets_tested += 1
        holders = tuple(m for m, flat in enumerate(family) if all(flat.contains(p) for p in subset))
        if len(holders) > report.max_multiplicity:
            report.max_multiplicity = len(holders)
            if len(holders) > 1:
                report.witness_points = subset
                report.witness_members = holders
    report.skipped_members = sorted(pool.skipped)
    if not report.passed:
        logger.warning(f"⚠️  type-{r} violated: members {report.witness_members} share {r} points")
    return report
