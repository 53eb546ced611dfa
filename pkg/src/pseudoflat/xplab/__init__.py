"""Sweeps, exponent fits, bound certificates and their outputs."""
from .certify import (
    BoundCertificate,
    IncidenceCheck,
    certify_bound,
    incidence_bound_check,
    incidence_exponents,
    rich_exponents,
)
from .emit import emit_outputs, rich_frame, write_csv, write_json
from .fitting import FitResult, fit_exponent
from .sweep import ExperimentConfig, ExperimentReport, RunRecord, run_once, run_rich_scaling

__all__ = [
    "BoundCertificate",
    "ExperimentConfig",
    "ExperimentReport",
    "FitResult",
    "IncidenceCheck",
    "RunRecord",
    "certify_bound",
    "emit_outputs",
    "fit_exponent",
    "incidence_bound_check",
    "incidence_exponents",
    "rich_exponents",
    "rich_frame",
    "run_once",
    "run_rich_scaling",
    "write_csv",
    "write_json",
]
