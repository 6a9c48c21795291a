"""Detector parameter models"""
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class DogParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    octaves: int = Field(4, ge=1)
    intervals: int = Field(3, ge=1)
    base_sigma: float = Field(1.6, gt=0)
    # measured on [0, 1] intensities
    contrast_threshold: float = Field(0.03, ge=0)
    edge_ratio: float = Field(10.0, gt=0)
    border: int = Field(5, ge=1)

    @property
    def levels_per_octave(self) -> int:
        return self.intervals + 3

    @property
    def k(self) -> float:
        return 2.0 ** (1.0 / self.intervals)


class FastHessianParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    octaves: int = Field(4, ge=1)
    # filters per octave
    levels: int = Field(4, ge=3)
    hessian_threshold: float = Field(0.0004, ge=0)
    w: float = Field(0.9, ge=0)


class MserParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    delta: int = Field(5, ge=1, le=255)
    min_area: int = Field(30, ge=1)
    # None: 1% of the image area
    max_area: Optional[int] = Field(None, ge=1)
    max_variation: float = Field(0.25, ge=0)

    @model_validator(mode="after")
    def _area_range(self):
        if self.max_area is not None and self.min_area >= self.max_area:
            raise ValueError(f"min_area ({self.min_area}) must be below max_area ({self.max_area})")
        return self

    def resolved_max_area(self, image_area: int) -> float:
        return self.max_area if self.max_area is not None else 0.01 * image_area


class BriskParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    fast_threshold: float = Field(30.0, ge=0)
    octaves: int = Field(3, ge=1)


class DetectorParams(BaseModel):
    """One parameter record per detector; unknown keys are rejected."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dog: DogParams = Field(default_factory=DogParams)
    fast_hessian: FastHessianParams = Field(default_factory=FastHessianParams)
    mser: MserParams = Field(default_factory=MserParams)
    brisk: BriskParams = Field(default_factory=BriskParams)
