"""Benchmark run configuration, loaded from JSON or TOML"""
import hashlib
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config.settings import OUTPUT_DIR, threads_override
from detectors.params import DetectorParams
from errors import ConfigError
from harness.conditions import (
    EXPOSURE_EVS,
    RESOLUTIONS,
    ROTATION_ANGLES,
    SCALE_FACTORS,
    SYNTHETIC_FAMILIES,
    VIEWPOINT_ANGLES,
)

DetectorTag = Literal["dog", "fast_hessian", "mser", "brisk"]
DescriptorTag = Literal["sift", "surf", "brisk", "freak"]
FamilyTag = Literal[
    "exposure", "viewpoint", "rotation", "scale",
    "aloi_illum_dir", "aloi_illum_color", "aloi_view", "aloi_stereo",
]


class BenchmarkConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    detectors: List[DetectorTag] = Field(default_factory=lambda: ["dog", "fast_hessian", "mser", "brisk"])
    descriptors: List[DescriptorTag] = Field(default_factory=lambda: ["sift", "surf", "brisk", "freak"])
    families: List[FamilyTag] = Field(default_factory=lambda: ["exposure", "rotation", "scale"])

    exposure_evs: List[float] = Field(default_factory=lambda: list(EXPOSURE_EVS))
    viewpoint_angles: List[float] = Field(default_factory=lambda: list(VIEWPOINT_ANGLES))
    rotation_angles: List[float] = Field(default_factory=lambda: list(ROTATION_ANGLES))
    scale_factors: List[float] = Field(default_factory=lambda: list(SCALE_FACTORS))
    resolutions: List[float] = Field(default_factory=lambda: [1.0])

    eps_pos: float = Field(2.5, gt=0)
    tau: float = Field(2.0, ge=1)
    ratio: float = Field(0.75, gt=0, lt=1)

    images: List[Path] = Field(default_factory=list)
    synthetic_subjects: int = Field(0, ge=0)
    aloi_root: Optional[Path] = None
    aloi_manifest: Optional[Path] = None
    aloi_objects: Optional[List[str]] = None

    output_dir: Path = Path(OUTPUT_DIR)
    threads: int = Field(1, ge=1)
    seed: int = 0
    timings_in_csv: bool = False
    detector_params: DetectorParams = Field(default_factory=DetectorParams)

    @field_validator("detectors", "descriptors", "families", "resolutions",
                     "exposure_evs", "viewpoint_angles", "rotation_angles", "scale_factors")
    @classmethod
    def _non_empty_unique(cls, v):
        if not v:
            raise ValueError("must not be empty")
        if len(set(v)) != len(v):
            raise ValueError(f"duplicate entries in {v}")
        return v

    @field_validator("resolutions")
    @classmethod
    def _allowed_resolutions(cls, v):
        bad = [r for r in v if r not in RESOLUTIONS]
        if bad:
            raise ValueError(f"resolution factors must be among {list(RESOLUTIONS)}, got {bad}")
        return v

    @field_validator("scale_factors")
    @classmethod
    def _positive_scales(cls, v):
        if any(f <= 0 for f in v):
            raise ValueError("scale factors must be positive")
        return v

    @model_validator(mode="after")
    def _inputs_present(self):
        synthetic = [f for f in self.families if f in SYNTHETIC_FAMILIES]
        aloi = [f for f in self.families if f not in SYNTHETIC_FAMILIES]
        if synthetic and not self.images and self.synthetic_subjects == 0:
            raise ValueError(f"families {synthetic} need images or synthetic_subjects > 0")
        if aloi and self.aloi_root is None and self.aloi_manifest is None:
            raise ValueError(f"families {aloi} need aloi_root or aloi_manifest")
        return self

    def grid_for(self, family: str) -> List[float]:
        return {
            "exposure": self.exposure_evs,
            "viewpoint": self.viewpoint_angles,
            "rotation": self.rotation_angles,
            "scale": self.scale_factors,
        }[family]

    def effective_threads(self) -> int:
        override = threads_override()
        return override if override is not None else self.threads

    def digest(self) -> str:
        """SHA-256 of the canonical JSON dump (sorted keys)."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_mapping(cls, data: dict) -> "BenchmarkConfig":
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"invalid benchmark configuration: {e}")


def load_config(path: Union[str, Path]) -> BenchmarkConfig:
    """Read a .json or .toml benchmark configuration."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}")
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        elif path.suffix.lower() == ".json":
            data = json.loads(raw)
        else:
            raise ConfigError(f"config {path} must be .json or .toml")
    except (tomllib.TOMLDecodeError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot parse config {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a table/object at top level")
    return BenchmarkConfig.from_mapping(data)


def load_detector_params(path: Union[str, Path]) -> DetectorParams:
    """Detector parameter file for the CLI (JSON or TOML)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
        data = tomllib.loads(text) if path.suffix.lower() == ".toml" else json.loads(text)
        return DetectorParams.model_validate(data)
    except OSError as e:
        raise ConfigError(f"cannot read params {path}: {e.strerror or e}")
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot parse params {path}: {e}")
    except ValidationError as e:
        raise ConfigError(f"invalid detector parameters in {path}: {e}")
