"""Least-squares exponent fits on log-log data."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import InsufficientData

logger = logging.getLogger(__name__)

MODES = ("in-k", "in-N")


@dataclass(frozen=True)
class FitResult:
    mode: str
    slope: float
    stderr: float
    intercept: float
    constant: float
    points: int

    def within(self, exponent: float, sigmas: float = 2.0) -> bool:
        """True if ``exponent`` lies within ``sigmas`` standard errors of the slope."""
        return abs(self.slope - exponent) <= sigmas * self.stderr + 1e-12

    def to_dict(self) -> Dict[str, object]:
        return {
            "mode": self.mode,
            "slope": self.slope,
            "stderr": self.stderr,
            "intercept": self.intercept,
            "constant": self.constant,
            "points": self.points,
        }


def fit_exponent(xs: Sequence[float], ys: Sequence[float], mode: str = "in-k") -> FitResult:
    """Ordinary least squares of log y on log x over the points with y > 0.

    ``constant`` is the largest y / x^slope over the data, so y <= constant·x^slope
    holds on every fitted point.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    keep = (y > 0) & (x > 0)
    x, y = x[keep], y[keep]
    if x.size < 3:
        raise InsufficientData(f"need at least 3 positive data points, got {x.size}")
    lx, ly = np.log(x), np.log(y)
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), _, rank, _ = np.linalg.lstsq(A, ly, rcond=None)
    if rank < 2:
        raise InsufficientData("all data points share one x value")
    resid = ly - A @ np.array([slope, intercept])
    sigma2 = float(resid @ resid) / (x.size - 2)
    cov = sigma2 * np.linalg.inv(A.T @ A)
    stderr = float(np.sqrt(max(cov[0, 0], 0.0)))
    constant = float(np.max(y / x**slope))
    logger.debug(f"fit {mode}: slope={slope:.4f} ± {stderr:.4f} on {x.size} points")
    return FitResult(mode, float(slope), stderr, float(intercept), constant, int(x.size))


def profile_window(
    profile: Dict[int, int], k_min: int, k_max: Optional[int]
) -> Tuple[Sequence[int], Sequence[int]]:
    """(k, R(k)) pairs inside [k_min, k_max] with R(k) > 0, in k order."""
    ks = [k for k in sorted(profile) if k >= k_min and (k_max is None or k <= k_max) and profile[k] > 0]
    return ks, [profile[k] for k in ks]
