"""Embedded oracle suite behind ``pseudoflat selftest``.

Each check is a small brute-force or closed-form comparison registered under
the module it exercises. A check fails by raising AssertionError; the message
names the invariant that broke.
"""
from __future__ import annotations

import logging
from collections import Counter
from contextlib import ExitStack, contextmanager
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple
from unittest import mock

import numpy as np

from .errors import NoDefiningTupleAtLevel0
from .exact import Cube, Point, dyadic_cutting, dyadic_depth, locate, make_cutting, parent_cell, primitive_vector
from .flats import Circle, Line, Plane, intersection_cardinality, line_through, nonempty_cells, type_r_bound
from .incidence import brute_force_incidences, build_incidences, span_lines, span_planes
from .pointgen import dumps_points, homogeneity_check, integer_grid, loads_points, perturbed_lattice
from .prooflab import ProofContext, good_tuples, theorem13_diagnostic
from .xplab import fit_exponent, incidence_exponents

logger = logging.getLogger(__name__)

FAULTS = ("canonicalization",)

Check = Callable[[FrozenSet[str]], None]
REGISTRY: List[Tuple[str, str, Check]] = []


def oracle(module: str, name: str) -> Callable[[Check], Check]:
    def register(fn: Check) -> Check:
        REGISTRY.append((module, name, fn))
        return fn

    return register


def _unsigned_vector(vec: Sequence) -> Tuple[int, ...]:
    """primitive_vector without the sign rule."""
    prim = primitive_vector(vec)
    first = next(Fraction(x) for x in vec if x)
    return tuple(-x for x in prim) if first < 0 else prim


def _unsigned_rows(d: np.ndarray) -> np.ndarray:
    return d // np.gcd.reduce(np.abs(d), axis=1)[:, None]


@contextmanager
def injected(faults: FrozenSet[str]) -> Iterator[None]:
    """Patch the library code paths named by ``faults`` for the duration of the block."""
    with ExitStack() as stack:
        if "canonicalization" in faults:
            stack.enter_context(mock.patch("pseudoflat.flats.linear.primitive_vector", _unsigned_vector))
            stack.enter_context(mock.patch("pseudoflat.incidence._normalize_rows", _unsigned_rows))
        yield


@dataclass
class CheckResult:
    module: str
    name: str
    passed: bool
    detail: str = ""


@oracle("exact", "dyadic depth")
def _dyadic_depth(faults: FrozenSet[str]) -> None:
    got = {a: dyadic_depth(a) for a in (1, 8, 100)}
    assert got == {1: 1, 8: 4, 100: 8}, f"dyadic depth table {got}"


@oracle("exact", "parent cell contains child")
def _parent_cells(faults: FrozenSet[str]) -> None:
    P = perturbed_lattice(2, 30, seed=3)
    cube = P.cube
    for p in P:
        for level in range(1, P.depth + 1):
            child = locate(dyadic_cutting(cube, level), p)
            assert parent_cell(child) == locate(dyadic_cutting(cube, level - 1), p), f"parent of {child}"


@oracle("flats", "canonical line keys")
def _canonical_lines(faults: FrozenSet[str]) -> None:
    pts = [Point.of(i, 2 * i + 1) for i in range(4)]
    keys = {line_through(p, q).key() for p, q in combinations(pts, 2)}
    keys |= {line_through(q, p).key() for p, q in combinations(pts, 2)}
    assert len(keys) == 1, f"one line gave {len(keys)} canonical keys"


@oracle("flats", "type-r parameters")
def _type_r(faults: FrozenSet[str]) -> None:
    got = (type_r_bound(1, 2, 1), type_r_bound(2, 3, 1), type_r_bound(2, 3, 2))
    assert got == (2, 19, 19), f"type-r table {got}"


@oracle("flats", "nonempty cells")
def _cells(faults: FrozenSet[str]) -> None:
    square = Cube(1, 2)
    diagonal = nonempty_cells(Line((0, 0), (1, 1)), make_cutting(square, 4))
    shifted = nonempty_cells(Line((0, Fraction(1, 8)), (1, 1)), make_cutting(square, 4))
    flat = nonempty_cells(Plane((0, 0, 1), Fraction(51, 100)), make_cutting(Cube(1, 3), 2))
    assert (diagonal, shifted, flat) == (4, 7, 4), f"cell counts {(diagonal, shifted, flat)}"


@oracle("flats", "Bezout cap for circles")
def _circles(faults: FrozenSet[str]) -> None:
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = Circle([Fraction(int(v), 4) for v in rng.integers(0, 16, 2)], Fraction(int(rng.integers(1, 20)), 4))
        b = Circle([Fraction(int(v), 4) for v in rng.integers(0, 16, 2)], Fraction(int(rng.integers(1, 20)), 4))
        if a == b:
            continue
        card = intersection_cardinality(a, b)
        assert card.count is not None and card.count <= 2, f"{a.describe()} and {b.describe()} meet {card}"


@oracle("pointgen", "grid homogeneity")
def _grid_homogeneity(faults: FrozenSet[str]) -> None:
    report = homogeneity_check(integer_grid(4, 2))
    assert report.passed, f"homogeneity {report.to_dict()}"


@oracle("pointgen", "text format")
def _text_format(faults: FrozenSet[str]) -> None:
    P = perturbed_lattice(3, 20, seed=5)
    assert loads_points(dumps_points(P)).points == P.points, "points changed through the text format"


@oracle("incidence", "3x3 grid profile")
def _grid_profile(faults: FrozenSet[str]) -> None:
    IS = span_lines(integer_grid(3, 2)).incidences()
    got = (len(IS), IS.profile.get(2), IS.profile.get(3), IS.total)
    assert got == (20, 20, 8, 48), f"3x3 grid (lines, R2, R3, total) = {got}"


@oracle("incidence", "bucketed scan equals brute force")
def _bucketed(faults: FrozenSet[str]) -> None:
    P = perturbed_lattice(2, 40, seed=7)
    F = span_lines(P).family()
    assert build_incidences(P, F).point_lists() == brute_force_incidences(P, F), "incidence lists differ"


@oracle("prooflab", "good tuples equal same-cell pairs")
def _good_tuples(faults: FrozenSet[str]) -> None:
    P = perturbed_lattice(2, 36, seed=2)
    cutting = make_cutting(P.cube, 3)
    cells = [locate(cutting, p).j for p in P]
    brute = sum(1 for a, b in combinations(range(P.N), 2) if cells[a] == cells[b])
    assert good_tuples(P, cutting, 2).M == brute, "per-cell binomial sum differs from pair count"


@oracle("prooflab", "good-tuple double count")
def _double_count(faults: FrozenSet[str]) -> None:
    report = theorem13_diagnostic(integer_grid(6, 2), span_lines(integer_grid(6, 2)).family(), 3)
    assert report.exclusivity_holds, "flat tuples exceed the total"
    assert report.bound_holds, "implied bound below the rich count"


@oracle("prooflab", "index scan equals full scan")
def _index_scan(faults: FrozenSet[str]) -> None:
    P = perturbed_lattice(3, 27, seed=1)
    ctx = ProofContext.rich(P, span_planes(P).incidences(), 3)
    for f in range(len(ctx)):
        for x in ctx.on_flat[f]:
            try:
                fast = ctx.index(x, f)
            except NoDefiningTupleAtLevel0:
                break
            assert fast == ctx.full_scan_index(x, f), f"index of point {x} on member {f}"


@oracle("xplab", "power-law slope")
def _slope(faults: FrozenSet[str]) -> None:
    ks = list(range(2, 9))
    fit = fit_exponent(ks, [1000 / k**3 for k in ks])
    assert abs(fit.slope + 3) < 1e-9, f"slope {fit.slope}"


@oracle("xplab", "incidence exponents")
def _incidence_exponents(faults: FrozenSet[str]) -> None:
    got = (incidence_exponents(2, 2), incidence_exponents(2, 3), incidence_exponents(2, 3, surfaces=True))
    want = (
        (Fraction(2, 3), Fraction(2, 3)),
        (Fraction(3, 4), Fraction(1, 2)),
        (Fraction(3, 4), Fraction(3, 4)),
    )
    assert got == want, f"incidence exponents {got}"


def modules() -> List[str]:
    return sorted({m for m, _, _ in REGISTRY})


def run_selftest(only: Optional[str] = None, faults: Sequence[str] = ()) -> List[CheckResult]:
    """Run the registered checks, optionally restricted to one module."""
    unknown = set(faults) - set(FAULTS)
    if unknown:
        raise ValueError(f"unknown faults {sorted(unknown)}; known: {list(FAULTS)}")
    active = frozenset(faults)
    results = []
    for module, name, check in REGISTRY:
        if only and module != only:
            continue
        try:
            with injected(active):
                check(active)
            results.append(CheckResult(module, name, True))
        except AssertionError as exc:
            results.append(CheckResult(module, name, False, str(exc)))
        except Exception as exc:  # a crash counts as a failed check
            results.append(CheckResult(module, name, False, f"{type(exc).__name__}: {exc}"))
        if not results[-1].passed:
            logger.warning(f"❌ {module}/{name}: {results[-1].detail}")
    return results


def summary(results: Sequence[CheckResult]) -> Dict[str, Tuple[int, int]]:
    """module -> (passed, total)."""
    totals: Counter = Counter()
    passed: Counter = Counter()
    for res in results:
        totals[res.module] += 1
        passed[res.module] += res.passed
    return {m: (passed[m], totals[m]) for m in sorted(totals)}
