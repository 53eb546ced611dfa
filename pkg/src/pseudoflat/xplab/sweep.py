"""Rich-profile sweeps over point-set sizes."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

from joblib import Parallel, delayed
from pydantic import BaseModel, Field, field_validator, model_validator

from ..incidence import IncidenceStructure, SpannedFamily, recount_incidences, span_lines, span_planes
from ..pointgen import PointSet, integer_grid, load_points, perturbed_lattice

logger = logging.getLogger(__name__)

Scenario = Literal["grid-lines", "grid-planes", "lattice-lines", "lattice-planes", "custom"]


class ExperimentConfig(BaseModel):
    scenario: Scenario = Field("grid-lines", description="Point construction and spanned family")
    n: int = Field(2, description="Ambient dimension (planes need 3)")
    sizes: List[int] = Field(default_factory=lambda: [3], description="Grid sides m or lattice sizes N")
    k_values: List[int] = Field(default_factory=list, description="Richness levels to report; empty = full profile")
    seed: int = Field(0, description="Generator seed")
    c_hom: Optional[int] = Field(None, description="Homogeneity constant; None = 2^n·2")
    c_vol: float = Field(2.0, description="Declared volume constant: a^n <= 2·c_vol·N")
    bucket_t: Optional[int] = Field(4, description="Bucket resolution of the incidence recount; None = no recount")
    points_file: Optional[Path] = Field(None, description="Point file for the custom scenario")
    flats: Literal["lines", "planes"] = Field("lines", description="Spanned family for the custom scenario")
    threads: int = Field(1, description="Sweep workers")

    @field_validator("sizes")
    @classmethod
    def validate_sizes(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("sizes must be non-empty")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("sizes must be strictly increasing")
        if v[0] < 1:
            raise ValueError("sizes must be positive")
        return v

    @field_validator("c_hom", "c_vol", "bucket_t")
    @classmethod
    def validate_positive(cls, v):
        if v is not None and v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator("k_values")
    @classmethod
    def validate_k(cls, v: List[int]) -> List[int]:
        if any(k < 2 for k in v):
            raise ValueError("k values must be >= 2")
        return sorted(set(v))

    @model_validator(mode="after")
    def validate_scenario(self) -> "ExperimentConfig":
        if self.n not in (2, 3):
            raise ValueError("n must be 2 or 3")
        if self.kind == "planes" and self.n != 3:
            raise ValueError(f"{self.scenario} needs n = 3")
        if self.scenario == "custom" and self.points_file is None:
            raise ValueError("the custom scenario needs points_file")
        return self

    @property
    def kind(self) -> str:
        if self.scenario == "custom":
            return self.flats
        return "planes" if self.scenario.endswith("planes") else "lines"


@dataclass
class RunRecord:
    scenario: str
    size: int
    N: int
    M: int
    seed: int
    profile: Dict[int, int]
    total_incidences: int
    max_rich: int
    elapsed: float = field(default=0.0, compare=False)

    def rich_count(self, k: int) -> int:
        """R(k); zero beyond the richest member."""
        if k <= 1:
            return self.M
        return self.profile.get(k, 0)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    runs: List[RunRecord]

    @property
    def n(self) -> int:
        return self.config.n

    def k_range(self, run: RunRecord) -> List[int]:
        return self.config.k_values or list(range(2, run.max_rich + 1))

    def rows(self) -> List[Tuple[str, int, int, int, int, int, int]]:
        """One (scenario, N, M, k, rich_count, total_incidences, seed) row per run and k."""
        return [
            (run.scenario, run.N, run.M, k, run.rich_count(k), run.total_incidences, run.seed)
            for run in self.runs
            for k in self.k_range(run)
        ]


def build_points(cfg: ExperimentConfig, size: int) -> PointSet:
    c_vol = Fraction(str(cfg.c_vol))
    if cfg.scenario in ("grid-lines", "grid-planes"):
        return integer_grid(size, cfg.n, seed=cfg.seed, c_hom=cfg.c_hom, c_vol=c_vol)
    if cfg.scenario in ("lattice-lines", "lattice-planes"):
        return perturbed_lattice(cfg.n, size, cfg.seed, c_hom=cfg.c_hom, c_vol=c_vol)
    return replace(load_points(cfg.points_file), c_hom=cfg.c_hom, c_vol=c_vol)


def build_family(cfg: ExperimentConfig, P: PointSet, threads: int = 1) -> SpannedFamily:
    return span_planes(P, threads) if cfg.kind == "planes" else span_lines(P, threads)


def run_once(cfg: ExperimentConfig, size: int, threads: int = 1) -> Tuple[PointSet, SpannedFamily, IncidenceStructure, RunRecord]:
    start = time.perf_counter()
    P = build_points(cfg, size)
    family = build_family(cfg, P, threads)
    IS = family.incidences() if cfg.bucket_t is None else recount_incidences(family, cfg.bucket_t, threads)
    record = RunRecord(
        scenario=cfg.scenario,
        size=size,
        N=P.N,
        M=len(family),
        seed=cfg.seed,
        profile=dict(IS.profile),
        total_incidences=IS.total,
        max_rich=IS.max_richness,
        elapsed=time.perf_counter() - start,
    )
    logger.info(f"{cfg.scenario} size={size}: N={P.N}, {record.M} {cfg.kind}, max rich {record.max_rich}")
    return P, family, IS, record


def _record(cfg: ExperimentConfig, size: int) -> RunRecord:
    return run_once(cfg, size)[3]


def run_rich_scaling(cfg: ExperimentConfig, threads: Optional[int] = None) -> ExperimentReport:
    """One run per size, concurrently; records come back in size order."""
    sizes = cfg.sizes[:1] if cfg.scenario == "custom" else cfg.sizes
    workers = threads or cfg.threads
    records = Parallel(n_jobs=workers, backend="threading")(delayed(_record)(cfg, s) for s in sizes)
    return ExperimentReport(cfg, list(records))
