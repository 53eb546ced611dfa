"""Executable counting arguments: good tuples, defining tuples, indices and admissible triples."""
from .admissible import (
    NOT_ALIGNED,
    AdmissibleCount,
    AlignmentCheck,
    DensityChoice,
    SurfaceReport,
    admissible_triples,
    check_cell_alignment,
    select_density,
    surface_diagnostic,
    uniqueness_of_cell_curve,
)
from .index import (
    CaseOneCount,
    IndexTable,
    LemmaReport,
    ProofContext,
    case_one_count,
    index_lemma_check,
    index_of,
    is_defining_tuple,
    pigeonhole_levels,
)
from .tuples import (
    Theorem13Report,
    TupleCount,
    good_tuples,
    good_tuples_in_flat,
    theorem13_diagnostic,
)

__all__ = [
    "NOT_ALIGNED",
    "AdmissibleCount",
    "AlignmentCheck",
    "CaseOneCount",
    "DensityChoice",
    "IndexTable",
    "LemmaReport",
    "ProofContext",
    "SurfaceReport",
    "Theorem13Report",
    "TupleCount",
    "admissible_triples",
    "case_one_count",
    "check_cell_alignment",
    "good_tuples",
    "good_tuples_in_flat",
    "index_lemma_check",
    "index_of",
    "is_defining_tuple",
    "pigeonhole_levels",
    "select_density",
    "surface_diagnostic",
    "theorem13_diagnostic",
    "uniqueness_of_cell_curve",
]
