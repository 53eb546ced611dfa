"""Run manifest: resolved config, version stamps, file digests and phase timings."""
from __future__ import annotations

import hashlib
import json
import logging
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Union

from . import __version__

logger = logging.getLogger(__name__)

STAMPED = ("numpy", "pandas", "joblib", "matplotlib", "pydantic", "pydantic-settings")


def file_digest(path: Union[str, Path]) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def version_stamps() -> Dict[str, str]:
    stamps = {"pseudoflat": __version__}
    for name in STAMPED:
        try:
            stamps[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            stamps[name] = "missing"
    return stamps


@dataclass
class RunManifest:
    """Everything needed to reproduce and audit a run.

    ``manifest.json`` holds the reproducible part; wall-clock timings go to
    ``timings.json`` next to it so the manifest bytes depend only on config and seed.
    """

    config: Dict[str, object]
    versions: Dict[str, str] = field(default_factory=version_stamps)
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict, compare=False)
    root: Optional[Path] = field(default=None, compare=False, repr=False)

    def _key(self, path: Path) -> str:
        if self.root is not None:
            try:
                return Path(path).resolve().relative_to(self.root.resolve()).as_posix()
            except ValueError:
                pass
        return Path(path).as_posix()

    def add_input(self, path: Union[str, Path]) -> None:
        self.inputs[self._key(Path(path))] = file_digest(path)

    def add_output(self, path: Union[str, Path]) -> None:
        self.outputs[self._key(Path(path))] = file_digest(path)

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(time.perf_counter() - start, 6)
            logger.debug(f"⏱️  {name}: {self.timings[name]:.3f}s")

    def config_digest(self) -> str:
        canonical = json.dumps(self.config, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def provenance(self) -> Dict[str, object]:
        """Config hash, seed and versions embedded in every certificate."""
        return {"config_sha256": self.config_digest(), "seed": self.config.get("seed"), "versions": self.versions}

    def to_dict(self) -> Dict[str, object]:
        data = asdict(self)
        data.pop("timings")
        data.pop("root")
        data["inputs"] = dict(sorted(self.inputs.items()))
        data["outputs"] = dict(sorted(self.outputs.items()))
        return data

    def save(self, out_dir: Union[str, Path]) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "manifest.json"
        with path.open("w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, default=str)
            fh.write("\n")
        with (out / "timings.json").open("w", encoding="utf-8") as fh:
            json.dump(self.timings, fh, indent=2)
            fh.write("\n")
        return path

    @classmethod
    def load(cls, out_dir: Union[str, Path]) -> "RunManifest":
        out = Path(out_dir)
        with (out / "manifest.json").open("r", encoding="utf-8") as fh:
            data = json.load(fh)
        timings_file = out / "timings.json"
        timings = json.loads(timings_file.read_text(encoding="utf-8")) if timings_file.exists() else {}
        return cls(
            config=data.get("config", {}),
            versions=data.get("versions", {}),
            inputs=data.get("inputs", {}),
            outputs=data.get("outputs", {}),
            timings=timings,
            root=out,
        )

    def verify(self) -> List[str]:
        """Recorded files whose digest no longer matches (missing files included)."""
        base = self.root or Path(".")
        bad = []
        for name, digest in {**self.inputs, **self.outputs}.items():
            path = Path(name) if Path(name).is_absolute() else base / name
            if not path.exists() or file_digest(path) != digest:
                bad.append(name)
        if bad:
            logger.warning(f"⚠️  digest mismatch for {', '.join(bad)}")
        return bad
