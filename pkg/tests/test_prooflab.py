import json
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudoflat.errors import (
    GeometryError,
    NoDefiningTupleAtLevel0,
    NotSameCell,
    PointNotOnSurface,
    SubsetCapExceeded,
)
from pseudoflat.exact import Cube, Point, dyadic_cutting, locate, make_cutting
from pseudoflat.flats import FlatFamily, Line, Plane
from pseudoflat.incidence import span_lines, span_planes
from pseudoflat.pointgen import PointSet, integer_grid, perturbed_lattice
from pseudoflat.prooflab import (
    NOT_ALIGNED,
    IndexTable,
    ProofContext,
    Theorem13Report,
    admissible_triples,
    case_one_count,
    check_cell_alignment,
    good_tuples,
    good_tuples_in_flat,
    index_lemma_check,
    index_of,
    is_defining_tuple,
    pigeonhole_levels,
    select_density,
    surface_diagnostic,
    theorem13_diagnostic,
    uniqueness_of_cell_curve,
)
from pseudoflat.prooflab.index import core_size

DIAGONAL = Line((0, 0), (1, 1))

# three planes through the line y = z = 1/3
S1 = Plane((0, 0, 1), Fraction(1, 3))
S2 = Plane((0, 1, 0), Fraction(1, 3))
S3 = Plane((0, 1, -1), 0)
AXIS = Line((0, Fraction(1, 3), Fraction(1, 3)), (1, 0, 0))
ON_AXIS = [Point.of(x, "1/3", "1/3") for x in ("1/3", "2/3", "4/3", "5/3", "7/3")]


def diagonal(*xs):
    return PointSet(tuple(Point.of(x, x) for x in xs), Cube(8, 2))


@pytest.fixture
def single_line():
    P = diagonal("1/3", "2/3", "4/3", "16/3")
    family = FlatFamily((DIAGONAL,), r=2)
    return P, family, ProofContext(P, family)


@pytest.fixture
def pencil():
    P = PointSet(tuple(ON_AXIS), Cube(4, 3))
    family = FlatFamily((S1, S2, S3), r=2)
    return P, family, ProofContext(P, family)


# good tuples


def test_good_tuples_per_cell():
    P = diagonal("1/3", "4/3", "7/3", "10/3", "13/3")
    assert good_tuples(P, make_cutting(P.cube, 1), 2).M == 10
    assert good_tuples(P, make_cutting(P.cube, 8), 2).M == 0
    assert good_tuples_in_flat(P, make_cutting(P.cube, 1), DIAGONAL, 2) == 10
    assert good_tuples(P, make_cutting(P.cube, 1), 2).to_dict()["max_occupancy"] == 5


@settings(max_examples=25, deadline=None)
@given(N=st.integers(min_value=5, max_value=40), seed=st.integers(0, 1000), t=st.integers(1, 6))
def test_good_tuples_equal_same_cell_pairs(N, seed, t):
    P = perturbed_lattice(2, N, seed)
    cutting = make_cutting(P.cube, t)
    cells = [locate(cutting, p).j for p in P]
    brute = sum(1 for a, b in combinations(range(P.N), 2) if cells[a] == cells[b])
    assert good_tuples(P, cutting, 2).M == brute


def test_theorem13_on_grid():
    P = integer_grid(10, 2)
    spanned = span_lines(P)
    IS = spanned.incidences()
    report = theorem13_diagnostic(P, spanned, 5, incidences=IS)
    assert report.t == 1
    assert report.rich_count == IS.profile[5]
    assert report.implied_bound >= report.rich_count
    assert report.passed
    data = json.loads(report.to_json())
    assert list(data)[:3] == ["k", "r", "n"]
    assert data["verdict"] == "pass"


def test_theorem13_single_line():
    P = diagonal("1/3", "2/3", "4/3", "5/3", "7/3")
    report = theorem13_diagnostic(P, FlatFamily((DIAGONAL,), r=2), 5)
    assert report.flat_tuples == [10]
    assert report.M_total == 10
    assert report.implied_bound == 1.0
    assert report.passed


def test_theorem13_flags_shared_tuples():
    P = diagonal("1/3", "2/3", "4/3", "5/3", "7/3")
    doubled = FlatFamily((DIAGONAL, Line((0, 0), (2, 2))), r=2, allow_duplicates=True)
    report = theorem13_diagnostic(P, doubled, 5)
    assert report.tuple_multiplicity == 2
    assert not report.exclusivity_holds
    assert not report.passed


def test_theorem13_subset_cap():
    P = diagonal("1/3", "2/3", "4/3", "5/3", "7/3")
    with pytest.raises(SubsetCapExceeded):
        theorem13_diagnostic(P, FlatFamily((DIAGONAL,), r=2), 5, subset_cap=3)


def test_theorem13_without_good_tuples_has_no_bound():
    # one point per cell of the t=3 cutting, all on x + y + z = 27/2
    offset = {3: Fraction(3, 2), 4: Fraction(1, 2)}
    points = tuple(
        Point(tuple(3 * c + offset[sum(cell)] for c in cell))
        for cell in product(range(3), repeat=3)
        if sum(cell) in offset
    )
    P = PointSet(points, Cube(9, 3))
    report = theorem13_diagnostic(P, FlatFamily((Plane((1, 1, 1), Fraction(27, 2)),), r=2), 12)
    assert (report.t, report.rich_count, report.M_total, report.flat_tuples) == (3, 1, 0, [0])
    assert report.implied_bound is None
    assert report.bound_status == "no bound"
    assert report.passed
    assert report.to_dict()["bound"] == "no bound"


def test_theorem13_bound_status_fails_when_rich_flats_outnumber_the_bound():
    report = Theorem13Report(k=4, r=2, n=2, N=9, t=1, M_total=3, rich_count=2, flat_tuples=[3, 3])
    assert report.bound_status == "fails"
    assert not report.passed


# defining tuples and indices


def test_is_defining_tuple():
    triangle = [Point.of("1/3", "1/3", "1/3"), Point.of("2/3", "1/3", "1/3"), Point.of("1/3", "2/3", "1/3")]
    assert is_defining_tuple(ON_AXIS[:3], S1, [S1])
    assert not is_defining_tuple(ON_AXIS[:3], S1, [S1, S2])
    assert not is_defining_tuple(ON_AXIS[:3], S2, [S1, S2])
    assert is_defining_tuple(triangle, S1, [S1, S2])


def test_is_defining_tuple_errors():
    with pytest.raises(GeometryError):
        is_defining_tuple([ON_AXIS[0], ON_AXIS[0], ON_AXIS[1]], S1, [S1])
    with pytest.raises(PointNotOnSurface):
        is_defining_tuple([ON_AXIS[0], ON_AXIS[1], Point.of("1/3", "1/3", "2/3")], S1, [S1])
    with pytest.raises(NotSameCell):
        is_defining_tuple([ON_AXIS[0], ON_AXIS[1], ON_AXIS[4]], S1, [S1], dyadic_cutting(Cube(4, 3), 1))


def test_index_on_single_line(single_line):
    P, family, ctx = single_line
    assert ctx.depth == 4
    assert [ctx.index(x, 0) for x in range(4)] == [3, 3, 3, 1]
    assert [ctx.full_scan_index(x, 0) for x in range(4)] == [3, 3, 3, 1]
    assert ctx.membership_levels(0, 0) == [True, True, True, False, False]
    assert index_of(Point.of("16/3", "16/3"), DIAGONAL, P, family) == 1


def test_index_reaches_finest_level():
    P = diagonal("1/3", "2/3", "5/6")
    family = FlatFamily((DIAGONAL,), r=2)
    ctx = ProofContext(P, family)
    assert [ctx.index(x, 0) for x in range(3)] == [4, 4, 4]
    report = index_lemma_check(P, family, context=ctx)
    assert report.violations == []
    assert report.finest_occupancy == 2
    assert not report.passed


def test_index_lemma_passes(single_line):
    P, family, ctx = single_line
    report = index_lemma_check(P, family, context=ctx)
    assert report.passed
    assert report.pairs_checked == 4


def test_surface_on_one_curve_is_rejected():
    P = PointSet(tuple(ON_AXIS[:3]), Cube(4, 3))
    family = FlatFamily((S1, S2), r=2)
    ctx = ProofContext(P, family)
    with pytest.raises(NoDefiningTupleAtLevel0):
        ctx.index(0, 0)
    report = index_lemma_check(P, family, context=ctx)
    assert report.rejected == [0, 1]
    assert not report.passed


def test_index_matches_full_scan(lattice_planes):
    P, spanned = lattice_planes
    ctx = ProofContext.rich(P, spanned.incidences(), 3)
    for f in range(min(len(ctx), 150)):
        for x in ctx.on_flat[f]:
            try:
                fast = ctx.index(x, f)
            except NoDefiningTupleAtLevel0:
                break
            assert fast == ctx.full_scan_index(x, f)


# pigeonhole and case split


def test_pigeonhole_single_line(single_line):
    P, family, ctx = single_line
    table = pigeonhole_levels(P, family, 4, context=ctx)
    assert table.class_sizes == {0: [0, 1, 0, 3, 0, 0]}
    assert table.level == 1
    assert table.level_class == [0]
    assert table.members(0, 3) == [0, 1, 2]
    assert table.members(0, 1) == [3]
    assert table.class_threshold == Fraction(1, 2)
    assert table.pigeonhole_holds


def test_pigeonhole_without_rich_members(single_line):
    P, family, ctx = single_line
    table = pigeonhole_levels(P, family, 5, context=ctx)
    assert table.level is None and table.level_class == []
    count = case_one_count(ctx, table)
    assert count.defining == 0 and count.holds


def test_case_one_count(single_line):
    P, family, ctx = single_line
    table = pigeonhole_levels(P, family, 4, context=ctx)
    count = case_one_count(ctx, table)
    assert count.case == "case 1"
    assert count.defining == 4
    assert count.same_cell_tuples == 4
    assert count.lower_bound == Fraction(1, 6)
    assert count.holds
    assert case_one_count(ctx, table, c0=0.1).case == "case 2"


def test_core_size():
    assert core_size(4, 4) == 1
    assert core_size(10, 3) == 2


def test_density_choice(single_line):
    P, family, ctx = single_line
    table = pigeonhole_levels(P, family, 4, context=ctx)
    choice = select_density(ctx, table)
    assert choice.log_k == 2
    assert choice.core == {0: [3]}
    assert choice.cells_at_density == {0: [1, 0, 0]}
    assert choice.exponent == 0
    assert choice.dense_flats == [0]
    assert choice.m == 1
    assert check_cell_alignment(ctx, table, choice).cells_checked == 0


# admissible triples


def _table_at(level):
    return IndexTable(
        k=4, depth=3, index={}, class_sizes={}, flat_level={}, level=level, level_class=[], considered=0
    )


def test_admissible_pencil_of_planes(pencil):
    P, family, ctx = pencil
    count = admissible_triples(P, family, _table_at(1), exponent=1, context=ctx)
    # one level-1 cell holds 4 points of the common line
    assert count.admissible == 3
    assert count.max_curves_per_cell == 1
    assert count.max_surfaces_per_curve_cell == 3
    assert admissible_triples(P, family, _table_at(1), exponent=0, context=ctx).admissible == 6
    assert admissible_triples(P, family, _table_at(1), exponent=3, context=ctx).admissible == 0


def test_admissible_without_level(pencil):
    P, family, ctx = pencil
    count = admissible_triples(P, family, _table_at(None), exponent=1, context=ctx)
    assert count.admissible == 0
    assert count.to_dict()["witnesses"] == []


def test_cell_curve_uniqueness():
    family = FlatFamily((S1, S2, S3), r=2)
    assert uniqueness_of_cell_curve(ON_AXIS[:4], S1, family) == AXIS
    off_axis = ON_AXIS[:3] + [Point.of("1/3", "2/3", "1/3")]
    assert uniqueness_of_cell_curve(off_axis, S1, family) is NOT_ALIGNED
    assert uniqueness_of_cell_curve(ON_AXIS[:2], S1, family) is NOT_ALIGNED
    assert not NOT_ALIGNED
    assert repr(NOT_ALIGNED) == "NOT_ALIGNED"


def test_cell_curve_errors():
    family = FlatFamily((S1, S2, S3), r=2)
    with pytest.raises(PointNotOnSurface):
        uniqueness_of_cell_curve(ON_AXIS[:2] + [Point.of("1/3", "1/3", "2/3")], S1, family)
    with pytest.raises(SubsetCapExceeded):
        uniqueness_of_cell_curve(ON_AXIS[:4], S1, family, subset_cap=1)


def test_surface_diagnostic_report():
    P = perturbed_lattice(3, 12, seed=2)
    report = surface_diagnostic(P, span_planes(P).incidences(), 3, threads=2)
    data = json.loads(report.to_json())
    assert list(data) == ["k", "levels", "lemma", "case_split", "admissible", "alignment", "verdict"]
    assert report.lemma.violations == []
    assert report.table.pigeonhole_holds


@pytest.mark.parametrize("N,seed", [(8, 1), (10, 3), (12, 2), (12, 7)])
def test_surface_diagnostic_invariants_on_lattices(N, seed):
    P = perturbed_lattice(3, N, seed=seed)
    report = surface_diagnostic(P, span_planes(P).incidences(), 3)
    table, count = report.table, report.count
    assert not report.lemma.rejected and not report.lemma.violations
    assert len(table.level_class) * 2 * table.depth >= table.considered
    assert count.m * 2 ** (count.exponent + 1) * 4 * table.depth * ((3).bit_length() - 1) >= 3
    assert count.density_holds
    assert count.admissible >= count.dense_count * count.m
    assert count.lower_bound_holds
    assert not report.alignment.failures
    assert report.case_one.holds
    assert report.passed
