from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import yaml
from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings

from .errors import ConfigError
from .xplab.sweep import ExperimentConfig

ROOT = Path(__file__).resolve().parents[2]
DEFAULT_CONFIG = ROOT / "config" / "defaults.yaml"

# (section, key) in the config document -> flat Settings field
NESTED: Dict[Tuple[str, str], str] = {
    ("homogeneity", "c_hom"): "c_hom",
    ("homogeneity", "c_vol"): "c_vol",
    ("incidence", "bucket_t"): "bucket_t",
    ("fit", "k_min"): "fit_k_min",
    ("fit", "k_max"): "fit_k_max",
    ("certify", "theorem"): "theorem",
    ("certify", "r"): "r",
    ("certify", "c_thresh"): "c_thresh",
    ("certify", "c_bound"): "c_bound",
    ("certify", "c_incidence"): "c_incidence",
    ("certify", "k_min"): "bound_k_min",
    ("certify", "k_max"): "bound_k_max",
    ("prooflab", "k_values"): "diagnose_k",
    ("prooflab", "subset_cap"): "subset_cap",
    ("prooflab", "c0"): "c0",
    ("prooflab", "max_points"): "diagnose_max_points",
    ("logging", "level"): "log_level",
}

PHASES = ("generate", "incidence", "diagnose", "certify")


class Settings(BaseSettings):
    pipeline: List[str] = Field(default_factory=lambda: list(PHASES), description="Phases to run, in order")
    scenario: str = Field("grid-lines", description="grid-lines, grid-planes, lattice-lines, lattice-planes or custom")
    n: int = Field(2, description="Ambient dimension")
    sizes: List[int] = Field(default_factory=lambda: [3], description="Grid sides m or lattice sizes N, increasing")
    k_values: List[int] = Field(default_factory=list, description="Richness levels in the CSV; empty = full profile")
    seed: int = Field(0, description="Generator seed")
    points_file: Optional[Path] = Field(None, description="Point file for the custom scenario")
    flats: Literal["lines", "planes"] = Field("lines", description="Spanned family for the custom scenario")
    c_hom: Optional[int] = Field(None, description="Max points per unit cube; None = 2^n·2")
    c_vol: float = Field(2.0, description="Cube volume at most 2·c_vol·N")
    bucket_t: Optional[int] = Field(4, description="Bucket resolution of the incidence recount; None = no recount")
    fit_k_min: int = Field(3, description="Smallest k in the slope fit")
    fit_k_max: Optional[int] = Field(None, description="Largest k in the slope fit; None = max_rich/2")
    theorem: Optional[str] = Field(None, description="Bound to certify (1.3 or 1.5); None = from the flat kind")
    r: int = Field(2, description="Type parameter of the family")
    c_thresh: float = Field(2.0, description="Threshold constant: no k-rich member for k >= C·N^(1/n)")
    c_bound: Optional[float] = Field(None, description="Frozen constant of the rich-flat bound; None = report only")
    c_incidence: Optional[float] = Field(None, description="Frozen constant of the incidence bound; None = report only")
    bound_k_min: int = Field(3, description="Smallest k entering the bound constant")
    bound_k_max: Optional[int] = Field(None, description="Largest k entering the bound constant; None = full profile")
    diagnose_k: List[int] = Field(default_factory=list, description="k values for the counting diagnostics")
    subset_cap: int = Field(10**6, description="Max subsets enumerated per cell")
    c0: float = Field(1.0, description="Constant of the case split k <= c0·4^i·log N·log k")
    diagnose_max_points: int = Field(200, description="Skip diagnostics on point sets larger than this")
    svg: bool = Field(True, description="Write SVG plots next to the CSVs")
    threads: Optional[int] = Field(None, description="Worker threads; None = all cores")
    out: Path = Field(Path("out"), description="Output directory (env PSEUDOFLAT_OUT)")
    log_level: str = Field("INFO", description="Logging level")

    model_config = {
        "env_prefix": "PSEUDOFLAT_",
        "env_file": ".env",
        "extra": "ignore",
    }

    @field_validator("pipeline")
    @classmethod
    def validate_pipeline(cls, v: List[str]) -> List[str]:
        unknown = [p for p in v if p not in PHASES]
        if unknown:
            raise ValueError(f"unknown phases {unknown}; expected a subset of {list(PHASES)}")
        return v

    @field_validator("theorem")
    @classmethod
    def validate_theorem(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and v not in ("1.3", "1.5"):
            raise ValueError("theorem must be 1.3 or 1.5")
        return v

    @field_validator("c_thresh", "c_vol")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("constant must be positive")
        return v

    @field_validator("subset_cap", "bucket_t", "c_hom", "fit_k_min", "bound_k_min", "r")
    @classmethod
    def validate_at_least_one(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError("must be >= 1")
        return v

    @classmethod
    def load(cls, path: Path | None = None, **overrides) -> "Settings":
        """Read a YAML or JSON document, flatten its sections and validate.

        Validation failures become ConfigError naming the field as written in
        the document, e.g. ``fit.k_min``.
        """
        path = Path(path) if path is not None else DEFAULT_CONFIG
        raw: dict = {}
        if path.exists():
            try:
                with path.open("r", encoding="utf-8") as fh:
                    raw = yaml.safe_load(fh) or {}
            except yaml.YAMLError as exc:
                raise ConfigError(f"{path}: not a valid YAML/JSON document: {exc}") from exc
        elif path != DEFAULT_CONFIG:
            raise ConfigError(f"{path}: config file not found")
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        data, origin = cls._flatten(raw)
        if isinstance(data.get("points_file"), str) and not Path(data["points_file"]).is_absolute():
            beside = path.parent / data["points_file"]
            if beside.exists():
                data["points_file"] = beside
        data.update({k: v for k, v in overrides.items() if v is not None})
        try:
            settings = cls(**data)
            settings.experiment()
        except ValidationError as exc:
            raise ConfigError(_describe(exc, origin)) from exc
        return settings

    @classmethod
    def _flatten(cls, raw: dict) -> Tuple[dict, Dict[str, str]]:
        """Flatten nested sections to Settings fields; also map fields back to dotted paths."""
        data: dict = {}
        origin: Dict[str, str] = {}
        sections = {section for section, _ in NESTED}
        for key, value in raw.items():
            if key in sections and isinstance(value, dict):
                for sub_key, sub_value in value.items():
                    target = NESTED.get((key, sub_key))
                    if target is not None:
                        data[target] = sub_value
                        origin[target] = f"{key}.{sub_key}"
            else:
                data[key] = value
                origin[key] = key
        return data, origin

    def experiment(self) -> ExperimentConfig:
        return ExperimentConfig(
            scenario=self.scenario,
            n=self.n,
            sizes=self.sizes,
            k_values=self.k_values,
            seed=self.seed,
            c_hom=self.c_hom,
            c_vol=self.c_vol,
            bucket_t=self.bucket_t,
            points_file=self.points_file,
            flats=self.flats,
            threads=self.threads or 1,
        )

    def resolved(self) -> dict:
        """Config as recorded in the manifest; the output directory is left out."""
        return self.model_dump(mode="json", exclude={"out", "threads"})


def _describe(exc: ValidationError, origin: Dict[str, str]) -> str:
    lines = []
    for err in exc.errors():
        loc = [str(part) for part in err["loc"]]
        head = origin.get(loc[0], loc[0]) if loc else "config"
        lines.append(".".join([head, *loc[1:]]) + f": {err['msg']}")
    return "; ".join(lines)


def get_settings(path: Path | None = None) -> Settings:
    return Settings.load(path)
