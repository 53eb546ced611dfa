"""Bound certificates for rich-flat counts and total incidences.

Counts are exact integers; only the constants and fits are floating point.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import log
from typing import Dict, List, Optional, Tuple

from ..errors import InsufficientData
from .fitting import FitResult, fit_exponent, profile_window
from .sweep import ExperimentReport, RunRecord

logger = logging.getLogger(__name__)


def rich_exponents(tag: str, r: int, n: int) -> Tuple[Fraction, int, Optional[Fraction]]:
    """(k exponent, N power, polylog power) of the rich-flat bound for ``tag``."""
    if tag == "1.3":
        return Fraction(n * (r - 1) + 1), r, None
    if tag == "1.5":
        return Fraction(3 * r, 2) + 1, r + 1, Fraction(3 * r, 2) + 2
    raise ValueError(f"unknown theorem tag {tag!r}")


def incidence_exponents(r: int, n: int, surfaces: bool = False) -> Tuple[Fraction, Fraction]:
    """(alpha, beta) in the incidence bound M^alpha·N^beta."""
    if surfaces:
        return Fraction(3 * r, 3 * r + 2), Fraction(2 * r + 2, 3 * r + 2)
    d = n * (r - 1) + 1
    return Fraction(n * (r - 1), d), Fraction(r, d)


def prior_work(n: int) -> List[str]:
    return [
        f"Elekes-Toth (non-degenerate hyperplanes): N^{n}/k^{n + 1} + N^{n - 1}/k^{n - 1}",
        f"Solymosi-Toth (homogeneous, non-degenerate): N^{n}/k^{n + 1}",
        f"Agarwal-Aronov (spanned hyperplanes): N^{n}/k^3 + N^{n - 1}/k",
    ]


def threshold_ok(run: RunRecord, c_thresh: Fraction, tag: str, n: int) -> bool:
    """No k-rich member for k >= C·N^(1/n) (C·N^(2/3) for surfaces), exactly."""
    if run.max_rich == 0:
        return True
    if tag == "1.5":
        return Fraction(run.max_rich) ** 3 < c_thresh**3 * run.N**2
    return Fraction(run.max_rich) ** n < c_thresh**n * run.N


def smallest_threshold(run: RunRecord, tag: str, n: int) -> float:
    """max_rich / N^(1/n); every larger C passes the threshold check."""
    power = 2 / 3 if tag == "1.5" else 1 / n
    return run.max_rich / run.N**power


@dataclass
class BoundCertificate:
    theorem: str
    r: int
    n: int
    exponent_theory: Fraction
    N_power: int
    polylog_power: Optional[Fraction]
    C: float
    c_thresh: Fraction
    threshold_pass: bool
    c_thresh_min: float
    fit_k_min: int = 3
    fit: Optional[FitResult] = None
    fit_in_N: Optional[FitResult] = None
    run_slopes: Dict[int, float] = field(default_factory=dict)
    c_bound: Optional[float] = None
    footer: List[str] = field(default_factory=list)

    @property
    def C_finite(self) -> bool:
        return self.C < float("inf")

    @property
    def passed(self) -> bool:
        frozen_ok = self.c_bound is None or self.C <= self.c_bound
        return self.threshold_pass and self.C_finite and frozen_ok

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def row(self) -> Tuple[str, int, int, str, str, str, str, str]:
        """Certificate CSV row: theorem,r,n,exponent_theory,slope_fit,slope_stderr,C,verdict."""
        slope = f"{self.fit.slope:.6f}" if self.fit else ""
        stderr = f"{self.fit.stderr:.6f}" if self.fit else ""
        return (self.theorem, self.r, self.n, str(self.exponent_theory), slope, stderr, f"{self.C:.6g}", self.verdict)

    def to_dict(self) -> Dict[str, object]:
        return {
            "theorem": self.theorem,
            "r": self.r,
            "n": self.n,
            "exponent_theory": str(self.exponent_theory),
            "N_power": self.N_power,
            "polylog_power": str(self.polylog_power) if self.polylog_power is not None else None,
            "C": self.C,
            "c_bound": self.c_bound,
            "c_thresh": str(self.c_thresh),
            "c_thresh_min": self.c_thresh_min,
            "threshold_pass": self.threshold_pass,
            "fit": self.fit.to_dict() if self.fit else None,
            "fit_in_N": self.fit_in_N.to_dict() if self.fit_in_N else None,
            "run_slopes": {str(k): v for k, v in self.run_slopes.items()},
            "verdict": self.verdict,
            "footer": self.footer,
        }


def _polylog(N: int, k: int, power: Optional[Fraction]) -> float:
    if power is None:
        return 1.0
    return (log(N) * log(k)) ** float(power)


def certify_bound(
    report: ExperimentReport,
    theorem: str,
    r: int,
    n: int,
    k_min: int = 3,
    k_max: Optional[int] = None,
    fit_k_min: Optional[int] = None,
    fit_k_max: Optional[int] = None,
    c_thresh: Fraction = Fraction(2),
    c_bound: Optional[float] = None,
) -> BoundCertificate:
    """Certify a rich-flat bound on every run of a sweep.

    C is the largest R(k)·k^e / (N^p·polylog) over runs and k in [k_min, k_max];
    k_max defaults to each run's richest member. The k-slope is fitted per run on
    [fit_k_min, fit_k_max] (defaults k_min and max_rich/2), and the largest run's fit is kept.
    R(fit_k_min) is also fitted against N across the sweep.
    """
    e, p, polylog = rich_exponents(theorem, r, n)
    fit_k_min = k_min if fit_k_min is None else fit_k_min
    C = 0.0
    fits: Dict[int, FitResult] = {}
    for run in report.runs:
        top = run.max_rich if k_max is None else min(k_max, run.max_rich)
        for k in range(max(k_min, 2), top + 1):
            R = run.rich_count(k)
            if R:
                C = max(C, R * k ** float(e) / (run.N**p * _polylog(run.N, k, polylog)))
        ks, Rs = profile_window(run.profile, fit_k_min, fit_k_max if fit_k_max is not None else run.max_rich // 2)
        try:
            run_fit = fit_exponent(ks, Rs, "in-k")
        except InsufficientData:
            continue
        fits[run.size] = run_fit
    largest = max((run for run in report.runs if run.size in fits), key=lambda run: run.N, default=None)
    try:
        fit_in_N = fit_exponent(
            [run.N for run in report.runs], [run.rich_count(fit_k_min) for run in report.runs], "in-N"
        )
    except InsufficientData:
        fit_in_N = None
    cert = BoundCertificate(
        theorem=theorem,
        r=r,
        n=n,
        exponent_theory=e,
        N_power=p,
        polylog_power=polylog,
        C=C,
        c_thresh=Fraction(c_thresh),
        threshold_pass=all(threshold_ok(run, Fraction(c_thresh), theorem, n) for run in report.runs),
        c_thresh_min=max((smallest_threshold(run, theorem, n) for run in report.runs), default=0.0),
        fit_k_min=fit_k_min,
        fit=fits[largest.size] if largest else None,
        fit_in_N=fit_in_N,
        run_slopes={size: fit.slope for size, fit in fits.items()},
        c_bound=c_bound,
        footer=prior_work(3 if theorem == "1.5" else n),
    )
    if not cert.passed:
        logger.warning(f"⚠️  certificate {theorem} failed: C={C:.4g}, threshold {cert.threshold_pass}")
    return cert


@dataclass
class IncidenceCheck:
    r: int
    n: int
    surfaces: bool
    alpha: Fraction
    beta: Fraction
    C_I: float
    ratios: Dict[int, float]
    c_incidence: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.c_incidence is None or self.C_I <= self.c_incidence

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> Dict[str, object]:
        return {
            "r": self.r,
            "n": self.n,
            "surfaces": self.surfaces,
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "C_I": self.C_I,
            "c_incidence": self.c_incidence,
            "ratios": {str(k): v for k, v in self.ratios.items()},
            "verdict": self.verdict,
        }


def incidence_scale(M: int, N: int, alpha: Fraction, beta: Fraction) -> float:
    return M ** float(alpha) * N ** float(beta) + M + N


def incidence_bound_check(
    report: ExperimentReport,
    r: int,
    n: int,
    surfaces: bool = False,
    c_incidence: Optional[float] = None,
) -> IncidenceCheck:
    """Largest total / (M^alpha·N^beta + M + N) over the runs."""
    alpha, beta = incidence_exponents(r, n, surfaces)
    ratios = {
        run.size: run.total_incidences / incidence_scale(run.M, run.N, alpha, beta)
        for run in report.runs
    }
    check = IncidenceCheck(r, n, surfaces, alpha, beta, max(ratios.values(), default=0.0), ratios, c_incidence)
    if not check.passed:
        logger.warning(f"⚠️  incidence constant {check.C_I:.4g} above {c_incidence}")
    return check
