"""CSV, JSON and SVG outputs of sweeps and certificates."""
from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from ..errors import EmitError  # noqa: E402
from .certify import BoundCertificate  # noqa: E402
from .sweep import ExperimentReport  # noqa: E402

logger = logging.getLogger(__name__)

RICH_COLUMNS = ["scenario", "N", "M", "k", "rich_count", "total_incidences", "seed"]
CERTIFICATE_COLUMNS = ["theorem", "r", "n", "exponent_theory", "slope_fit", "slope_stderr", "C", "verdict"]

# fixed salt and no timestamp keep SVG bytes stable across runs
SVG_PARAMS = {"svg.hashsalt": "pseudoflat", "svg.fonttype": "none", "font.size": 9}


@contextmanager
def _writing(path: Path) -> Iterator[Path]:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        yield path
    except OSError as exc:
        raise EmitError(f"cannot write {path}: {exc.strerror or exc}") from exc


def rich_frame(report: ExperimentReport) -> pd.DataFrame:
    return pd.DataFrame(report.rows(), columns=RICH_COLUMNS).astype(
        {c: "int64" for c in RICH_COLUMNS if c != "scenario"}
    )


def certificate_frame(certificates: Sequence[BoundCertificate]) -> pd.DataFrame:
    return pd.DataFrame([c.row() for c in certificates], columns=CERTIFICATE_COLUMNS)


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    with _writing(Path(path)) as p:
        frame.to_csv(p, index=False, lineterminator="\n")
    return Path(path)


def write_json(data: Dict[str, object], path: Union[str, Path]) -> Path:
    with _writing(Path(path)) as p:
        p.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return Path(path)


def plot_in_k(report: ExperimentReport, cert: BoundCertificate, path: Union[str, Path]) -> Path:
    """Log-log R(k) against k per run, with the fitted line of the largest fitted run."""
    with plt.rc_context(SVG_PARAMS):
        fig, ax = plt.subplots(figsize=(5.0, 3.5))
        for run in report.runs:
            ks = [k for k in sorted(run.profile) if k >= 2 and run.profile[k] > 0]
            if ks:
                ax.scatter(ks, [run.profile[k] for k in ks], s=8, label=f"N={run.N}")
        if cert.fit is not None:
            top = max(report.runs, key=lambda run: run.N)
            xs = np.linspace(2, max(top.max_rich, 3), 50)
            ax.plot(xs, np.exp(cert.fit.intercept) * xs**cert.fit.slope, color="black", linewidth=1,
                    label=f"slope {cert.fit.slope:.2f}")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("k")
        ax.set_ylabel("R(k)")
        ax.set_title(f"{report.config.scenario}, bound {cert.theorem} (k^-{cert.exponent_theory})")
        ax.legend(fontsize=7)
        with _writing(Path(path)) as p:
            fig.savefig(p, format="svg", metadata={"Date": None})
        plt.close(fig)
    return Path(path)


def plot_in_N(report: ExperimentReport, cert: BoundCertificate, path: Union[str, Path]) -> Path:
    """Log-log R(k_min) against N across the sweep, with the in-N fit."""
    with plt.rc_context(SVG_PARAMS):
        fig, ax = plt.subplots(figsize=(5.0, 3.5))
        Ns = [run.N for run in report.runs]
        Rs = [run.rich_count(cert.fit_k_min) for run in report.runs]
        ax.scatter(Ns, Rs, s=8, label=f"k={cert.fit_k_min}")
        fit = cert.fit_in_N
        xs = np.linspace(min(Ns), max(Ns), 50)
        ax.plot(xs, np.exp(fit.intercept) * xs**fit.slope, color="black", linewidth=1,
                label=f"slope {fit.slope:.2f}")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("N")
        ax.set_ylabel(f"R({cert.fit_k_min})")
        ax.set_title(f"{report.config.scenario}, bound {cert.theorem} (N^{cert.N_power})")
        ax.legend(fontsize=7)
        with _writing(Path(path)) as p:
            fig.savefig(p, format="svg", metadata={"Date": None})
        plt.close(fig)
    return Path(path)


def emit_outputs(
    report: Optional[ExperimentReport],
    certificates: Sequence[BoundCertificate],
    out_dir: Union[str, Path],
    svg: bool = True,
) -> List[Path]:
    """rich_profile.csv, certificates.csv and one SVG per certificate and fit mode."""
    out = Path(out_dir)
    written: List[Path] = []
    if report is not None:
        written.append(write_csv(rich_frame(report), out / "rich_profile.csv"))
    if certificates:
        written.append(write_csv(certificate_frame(certificates), out / "certificates.csv"))
    if svg and report is not None:
        for cert in certificates:
            written.append(plot_in_k(report, cert, out / f"bound_{cert.theorem}_in-k.svg"))
            if cert.fit_in_N is not None:
                written.append(plot_in_N(report, cert, out / f"bound_{cert.theorem}_in-N.svg"))
    logger.info(f"wrote {len(written)} files to {out}")
    return written
