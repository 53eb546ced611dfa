"""Point–flat incidences.

``build_incidences`` buckets the points by a coarse cutting and tests a flat
only against buckets whose closed box it meets; the final test is always the
exact predicate, so the result does not depend on the bucket resolution.

Spanned families are found by per-anchor scans over integer (common-denominator
scaled) coordinates: a flat is reported by the lowest-id point on it, so each
flat appears once and its incidence list falls out of the scan.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import floor
from pathlib import Path
from typing import Callable, DefaultDict, Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .errors import DimensionMismatch, GeometryError, IncidenceMismatch
from .exact import dot
from .flats.base import Flat, FlatFamily, LinearRow
from .flats.linear import Line, Plane, cross
from .flats.polynomial import Interval
from .pointgen import PointSet

logger = logging.getLogger(__name__)

INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class RichQuery:
    """A richness threshold for enumeration; profiles also accept k = 1."""

    k: int

    def __post_init__(self) -> None:
        if self.k < 2:
            raise GeometryError(f"rich queries need k >= 2, got {self.k}")


class PointBuckets:
    """Point ids grouped by the closed cells of a coarse t^n cutting."""

    def __init__(self, points: PointSet, t: int) -> None:
        if t < 1:
            raise GeometryError(f"bucket resolution must be >= 1, got {t}")
        self.points = points
        self.t = t
        self.width = Fraction(points.cube.side, t)
        self.buckets: DefaultDict[Tuple[int, ...], List[int]] = defaultdict(list)
        for i, p in enumerate(points):
            self.buckets[self._to_bucket(p.coords)].append(i)

    def _to_bucket(self, coords: Sequence[Fraction]) -> Tuple[int, ...]:
        return tuple(min(floor(x / self.width), self.t - 1) for x in coords)

    def box(self, bucket: Tuple[int, ...]) -> List[Interval]:
        return [(b * self.width, (b + 1) * self.width) for b in bucket]

    def candidates(self, flat: Flat) -> np.ndarray:
        hits = [ids for key, ids in sorted(self.buckets.items()) if flat.meets_closed_box(self.box(key))]
        if not hits:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate([np.asarray(ids, dtype=np.int64) for ids in hits]))


class _ScaledPoints:
    """Common-denominator integer coordinates, int64 when that is safe."""

    def __init__(self, points: PointSet) -> None:
        self.den = points.denominator
        rows = points.scaled
        self.max_abs = max((abs(x) for row in rows for x in row), default=0)
        dtype = np.int64 if self.max_abs < (1 << 61) else object
        self.coords = np.array(rows, dtype=dtype).reshape(len(rows), points.n)

    def linear_hits(self, rows: List[LinearRow], cand: np.ndarray) -> np.ndarray:
        X = self.coords[cand]
        mask = np.ones(len(cand), dtype=bool)
        for normal, rhs in rows:
            rhs = Fraction(rhs)
            bound = self.max_abs * sum(abs(c) for c in normal) * rhs.denominator
            target = rhs.numerator * self.den
            if X.dtype != object and (bound >= INT64_SAFE or abs(target) >= INT64_SAFE):
                X = X.astype(object)
            lhs = X @ np.array(normal, dtype=X.dtype)
            mask &= np.asarray(lhs * rhs.denominator == target, dtype=bool)
        return cand[mask]


@dataclass(eq=False)
class IncidenceStructure:
    """Incidence lists in CSR form: flat f holds ``ids[offsets[f]:offsets[f+1]]``."""

    points: PointSet
    flats: Union[FlatFamily, "SpannedFamily"]
    offsets: np.ndarray
    ids: np.ndarray

    @classmethod
    def from_lists(
        cls, points: PointSet, flats: Union[FlatFamily, "SpannedFamily"], lists: Sequence[Sequence[int]]
    ) -> "IncidenceStructure":
        sizes = np.array([len(ids) for ids in lists], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        ids = (
            np.concatenate([np.asarray(ids, dtype=np.int64) for ids in lists])
            if len(lists) and offsets[-1]
            else np.empty(0, dtype=np.int64)
        )
        return cls(points, flats, offsets, ids)

    def __len__(self) -> int:
        return len(self.offsets) - 1

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.offsets)

    def point_ids(self, f: int) -> Tuple[int, ...]:
        return tuple(int(i) for i in self.ids[self.offsets[f] : self.offsets[f + 1]])

    def point_lists(self) -> List[Tuple[int, ...]]:
        return [self.point_ids(f) for f in range(len(self))]

    @property
    def total(self) -> int:
        return int(self.ids.size)

    @property
    def max_richness(self) -> int:
        return int(self.sizes.max()) if len(self) else 0

    @cached_property
    def profile(self) -> Dict[int, int]:
        """k -> R(k), the number of flats with at least k points, for k = 1..max."""
        if not len(self):
            return {}
        hist = np.bincount(self.sizes)
        tail = np.cumsum(hist[::-1])[::-1]
        return {k: int(tail[k]) for k in range(1, len(hist)) if tail[k]}


def _chunks(count: int, parts: int) -> List[range]:
    parts = max(1, min(parts, count)) if count else 1
    step = -(-count // parts) if count else 0
    return [range(s, min(s + step, count)) for s in range(0, count, step)] if count else []


def _parallel_map(fn: Callable[[range], list], count: int, threads: int) -> list:
    parts = Parallel(n_jobs=threads, backend="threading")(delayed(fn)(c) for c in _chunks(count, threads))
    return [item for part in parts for item in part]


def build_incidences(
    P: PointSet, F: FlatFamily, bucket_t: int = 4, threads: int = 1
) -> IncidenceStructure:
    """Exact incidence lists, pruned by closed-bucket tests."""
    if len(F) and F.ambient_dim != P.n:
        raise DimensionMismatch(f"points in R^{P.n}, flats in R^{F.ambient_dim}")
    buckets = PointBuckets(P, bucket_t)
    scaled = _ScaledPoints(P)

    def hits(flat: Flat) -> np.ndarray:
        cand = buckets.candidates(flat)
        rows = flat.linear_system()
        if rows is not None:
            return scaled.linear_hits(rows, cand)
        return np.array([i for i in cand if flat.contains(P[int(i)])], dtype=np.int64)

    def scan(chunk: range) -> List[np.ndarray]:
        return [hits(F[f]) for f in chunk]

    lists = _parallel_map(scan, len(F), threads)
    structure = IncidenceStructure.from_lists(P, F, lists)
    logger.debug(f"incidences: {len(F)} flats, {P.N} points, total {structure.total}")
    return structure


def recount_incidences(
    family: "SpannedFamily", bucket_t: int = 4, threads: int = 1
) -> IncidenceStructure:
    """Recount a spanned family with the bucketed scan; both scans must agree member by member."""
    scanned = family.incidences()
    counted = build_incidences(family.points, family, bucket_t, threads)
    for f in range(len(family)):
        if sorted(counted.point_ids(f)) != sorted(scanned.point_ids(f)):
            raise IncidenceMismatch(
                f"member {f}: bucketed scan (t={bucket_t}) found {counted.point_ids(f)},"
                f" spanning scan {scanned.point_ids(f)}"
            )
    return scanned


def brute_force_incidences(P: PointSet, F: FlatFamily) -> List[Tuple[int, ...]]:
    """All-pairs exact scan, used as an oracle."""
    return [tuple(i for i, p in enumerate(P) if flat.contains(p)) for flat in F]


def rich_flats(IS: IncidenceStructure, k: Union[int, RichQuery]) -> Tuple[int, List[int]]:
    """Count and sorted ids of the flats with at least k incident points."""
    k = k.k if isinstance(k, RichQuery) else k
    if k < 1:
        raise GeometryError(f"k must be >= 1, got {k}")
    ids = [int(f) for f in np.nonzero(IS.sizes >= k)[0]]
    return len(ids), ids


def rich_profile(IS: IncidenceStructure) -> List[Tuple[int, int]]:
    return sorted(IS.profile.items())


# spanned families


def _normalize_rows(d: np.ndarray) -> np.ndarray:
    """Primitive integer rows with the first nonzero entry positive."""
    g = np.gcd.reduce(np.abs(d), axis=1)
    d = d // g[:, None]
    first = np.argmax(d != 0, axis=1)
    sign = np.sign(d[np.arange(len(d)), first])
    return d * sign[:, None]


def _owned_groups(
    anchor: int, others: np.ndarray, inverse: np.ndarray, count: int, pair_ids: List[np.ndarray]
) -> List[Tuple[int, np.ndarray]]:
    """Group member ids by key; keep groups whose lowest id is above the anchor."""
    lowest = np.full(count, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(lowest, inverse, np.minimum.reduce(pair_ids))
    owned = np.nonzero(lowest > anchor)[0]
    if not len(owned):
        return []
    keys = np.concatenate([inverse] * len(pair_ids))
    members = np.concatenate(pair_ids)
    keep = np.isin(keys, owned)
    pairs = np.unique(np.stack([keys[keep], members[keep]], axis=1), axis=0)
    starts = np.searchsorted(pairs[:, 0], owned, side="left")
    ends = np.searchsorted(pairs[:, 0], owned, side="right")
    return [
        (int(u), np.concatenate([[anchor], pairs[s:e, 1]]).astype(np.int64))
        for u, s, e in zip(owned, starts, ends)
    ]


def _lines_from_anchor(X: np.ndarray, i: int) -> List[Tuple[Tuple[int, ...], np.ndarray]]:
    others = np.delete(np.arange(len(X)), i)
    if not len(others):
        return []
    d = _normalize_rows(X[others] - X[i])
    uniq, inverse = np.unique(d, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    groups = _owned_groups(i, others, inverse, len(uniq), [others])
    return [(tuple(int(v) for v in uniq[u]), members) for u, members in groups]


def _planes_from_anchor(X: np.ndarray, i: int) -> List[Tuple[Tuple[int, ...], np.ndarray]]:
    others = np.delete(np.arange(len(X)), i)
    D = X[others] - X[i]
    a, b = np.triu_indices(len(others), k=1)
    normals = np.cross(D[a], D[b])
    keep = np.any(normals != 0, axis=1)
    a, b, normals = a[keep], b[keep], normals[keep]
    if not len(normals):
        return []
    uniq, inverse = np.unique(_normalize_rows(normals), axis=0, return_inverse=True)
    inverse = inverse.ravel()
    groups = _owned_groups(i, others, inverse, len(uniq), [others[a], others[b]])
    return [(tuple(int(v) for v in uniq[u]), members) for u, members in groups]


class SpannedFamily:
    """Lines or planes spanned by a point set, stored as (anchor id, integer vector).

    Members materialize as ``Line``/``Plane`` objects on access. The incidence
    lists come from the spanning scan itself.
    """

    r = 2

    def __init__(
        self,
        points: PointSet,
        kind: str,
        anchors: np.ndarray,
        vectors: List[Tuple[int, ...]],
        lists: List[np.ndarray],
    ) -> None:
        self.points = points
        self.kind = kind
        self.anchors = anchors
        self.vectors = vectors
        self.lists = lists

    @property
    def ambient_dim(self) -> int:
        return self.points.n

    @property
    def flat_dim(self) -> int:
        return 1 if self.kind == "line" else 2

    def __len__(self) -> int:
        return len(self.vectors)

    def __getitem__(self, f: int) -> Flat:
        p = self.points[int(self.anchors[f])]
        if self.kind == "line":
            return Line(p.coords, self.vectors[f])
        return Plane(self.vectors[f], dot(self.vectors[f], p.coords))

    def __iter__(self):
        return (self[f] for f in range(len(self)))

    def family(self) -> FlatFamily:
        return FlatFamily(tuple(self), r=self.r, ambient_dim=self.ambient_dim, flat_dim=self.flat_dim)

    def incidences(self) -> IncidenceStructure:
        return IncidenceStructure.from_lists(self.points, self, self.lists)


def _exact_span(P: PointSet, kind: str) -> List[Tuple[int, Tuple[int, ...], np.ndarray]]:
    """Pure-Python fallback for coordinates too large for int64 arithmetic."""
    found: Dict[Flat, List[int]] = {}
    scaled = P.scaled
    if kind == "line":
        for i, j in combinations(range(P.N), 2):
            line = Line(P[i].coords, tuple(b - a for a, b in zip(scaled[i], scaled[j])))
            found.setdefault(line, [i]).append(j)
    else:
        for i, j, k in combinations(range(P.N), 3):
            normal = cross(
                tuple(b - a for a, b in zip(scaled[i], scaled[j])),
                tuple(b - a for a, b in zip(scaled[i], scaled[k])),
            )
            if any(normal):
                plane = Plane(normal, dot(normal, P[i].coords))
                found.setdefault(plane, [i]).extend((j, k))
    out = []
    for flat, ids in found.items():
        members = np.array(sorted(set(ids)), dtype=np.int64)
        vector = flat.direction if kind == "line" else flat.normal
        out.append((int(members[0]), tuple(vector), members))
    return sorted(out, key=lambda rec: (rec[0], rec[1]))


def _span(P: PointSet, kind: str, threads: int) -> SpannedFamily:
    scaled = _ScaledPoints(P)
    limit = (1 << 60) if kind == "line" else (1 << 29)
    if scaled.max_abs < limit:
        X = scaled.coords.astype(np.int64)
        scan = _lines_from_anchor if kind == "line" else _planes_from_anchor

        def run(chunk: range) -> list:
            return [(i, vec, members) for i in chunk for vec, members in scan(X, i)]

        records = _parallel_map(run, P.N, threads)
    else:
        logger.info(f"coordinates exceed int64 range, spanning {kind}s with exact Python arithmetic")
        records = _exact_span(P, kind)
    anchors = np.array([rec[0] for rec in records], dtype=np.int64)
    return SpannedFamily(P, kind, anchors, [rec[1] for rec in records], [rec[2] for rec in records])


def span_lines(P: PointSet, threads: int = 1) -> SpannedFamily:
    return _span(P, "line", threads)


def span_planes(P: PointSet, threads: int = 1) -> SpannedFamily:
    if P.n != 3:
        raise DimensionMismatch(f"spanned planes need points in R^3, got R^{P.n}")
    return _span(P, "plane", threads)


def spanned_lines(P: PointSet, threads: int = 1) -> FlatFamily:
    """Every distinct line through at least two points of P."""
    return span_lines(P, threads).family()


def spanned_planes(P: PointSet, threads: int = 1) -> FlatFamily:
    """Every distinct plane through three affinely independent points of P."""
    return span_planes(P, threads).family()


# export


def _fmt(value: object) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def format_flat(flat: Flat) -> str:
    """One text line of canonical coefficients."""
    if isinstance(flat, Line):
        return " ".join(["line", *map(_fmt, flat.direction), "|", *map(_fmt, flat.base)])
    if isinstance(flat, Plane):
        return " ".join(["plane", *map(_fmt, flat.normal), "|", _fmt(flat.offset)])
    center = getattr(flat, "center", None)
    if center is not None:
        return " ".join([flat.kind, *map(_fmt, center), "|", _fmt(flat.radius_sq)])
    return flat.describe()


def profile_frame(IS: IncidenceStructure) -> pd.DataFrame:
    rows = rich_profile(IS)
    return pd.DataFrame(rows, columns=["k", "rich_count"]).astype({"k": "int64", "rich_count": "int64"})


def write_profile_csv(IS: IncidenceStructure, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    profile_frame(IS).to_csv(path, index=False, lineterminator="\n")
    return path


def write_flat_list(flats: Union[FlatFamily, SpannedFamily], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for flat in flats:
            fh.write(format_flat(flat) + "\n")
    return path
