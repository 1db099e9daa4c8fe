from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.services.datagen.kernels import default_distortion_kernel


class ShapeKind(str, Enum):
    """Shape families present in the triangles & circles dataset"""
    TRIANGLE = "triangle"
    CIRCLE = "circle"


class ShapeSpec(BaseModel):
    kind: ShapeKind
    center_x: float = Field(..., ge=0.0, le=1.0, description="Fraction of image width")
    center_y: float = Field(..., ge=0.0, le=1.0, description="Fraction of image height")
    scale: float = Field(..., ge=0.40, le=0.60, description="Bounding-box side as a fraction of image width")

    def bounding_box(self) -> tuple[float, float, float, float]:
        half = self.scale / 2.0
        return (
            self.center_x - half,
            self.center_y - half,
            self.center_x + half,
            self.center_y + half,
        )

    def fits(self, tolerance: float = 1e-9) -> bool:
        x0, y0, x1, y1 = self.bounding_box()
        return x0 >= -tolerance and y0 >= -tolerance and x1 <= 1.0 + tolerance and y1 <= 1.0 + tolerance


class MixingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(default=6.0, gt=0.0)
    kernel: list[list[float]] = Field(default_factory=lambda: default_distortion_kernel().tolist())
    flip_probability: float = Field(default=0.5, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0)

    @field_validator("kernel")
    @classmethod
    def _odd_square_kernel(cls, value: list[list[float]]) -> list[list[float]]:
        side = len(value)
        if side == 0 or side % 2 == 0:
            raise ValueError(f"kernel must have an odd side length, got {side}")
        if any(len(row) != side for row in value):
            raise ValueError("kernel must be square")
        return value

    def kernel_array(self) -> np.ndarray:
        return np.asarray(self.kernel, dtype=np.float64)


@dataclass
class SourceImage:
    pixels: np.ndarray
    role: ShapeKind

    @property
    def resolution(self) -> int:
        return int(self.pixels.shape[0])


@dataclass
class MixtureSample:
    mixture: np.ndarray
    sources: list[SourceImage]
    seed: int


class MixtureSet(Sequence):
    """Sequence of MixtureSample views over stacked float32 arrays."""

    ROLES = (ShapeKind.TRIANGLE, ShapeKind.CIRCLE)

    def __init__(
        self,
        mixtures: np.ndarray,
        triangles: np.ndarray,
        circles: np.ndarray,
        seeds: np.ndarray,
    ):
        if not (mixtures.shape == triangles.shape == circles.shape):
            raise ValueError(
                f"Array shapes differ: mixtures {mixtures.shape}, "
                f"triangles {triangles.shape}, circles {circles.shape}"
            )
        if seeds.shape != (mixtures.shape[0],):
            raise ValueError(f"Expected {mixtures.shape[0]} seeds, got {seeds.shape}")
        self.mixtures = mixtures
        self.triangles = triangles
        self.circles = circles
        self.seeds = seeds

    @classmethod
    def from_samples(cls, samples: Sequence[MixtureSample], image_size: int) -> "MixtureSet":
        count = len(samples)
        shape = (count, image_size, image_size)
        mixtures = np.empty(shape, dtype=np.float32)
        triangles = np.empty(shape, dtype=np.float32)
        circles = np.empty(shape, dtype=np.float32)
        seeds = np.empty(count, dtype=np.uint32)
        for index, sample in enumerate(samples):
            mixtures[index] = sample.mixture
            by_role = {source.role: source.pixels for source in sample.sources}
            triangles[index] = by_role[ShapeKind.TRIANGLE]
            circles[index] = by_role[ShapeKind.CIRCLE]
            seeds[index] = sample.seed
        return cls(mixtures, triangles, circles, seeds)

    def __len__(self) -> int:
        return int(self.mixtures.shape[0])

    def __getitem__(self, index):
        if isinstance(index, slice):
            return MixtureSet(
                self.mixtures[index],
                self.triangles[index],
                self.circles[index],
                self.seeds[index],
            )
        return MixtureSample(
            mixture=self.mixtures[index],
            sources=[
                SourceImage(self.triangles[index], ShapeKind.TRIANGLE),
                SourceImage(self.circles[index], ShapeKind.CIRCLE),
            ],
            seed=int(self.seeds[index]),
        )

    @property
    def image_size(self) -> int:
        return int(self.mixtures.shape[-1])

    def sources(self) -> np.ndarray:
        """Ground truths stacked as (samples, 2, H, W) in ROLES order."""
        return np.stack([self.triangles, self.circles], axis=1)


class DatasetManifest(BaseModel):
    version: int = 1
    image_size: int
    n_pairs: int
    n_train: int
    n_test: int
    split_fraction: float
    seed: int
    mixing: MixingConfig
    dtype: str = "<f4"
    files: dict[str, str] = Field(default_factory=dict)


@dataclass
class DatasetSplit:
    train: MixtureSet
    test: MixtureSet
    manifest: DatasetManifest | None = field(default=None)
