from dataclasses import dataclass

import torch
from pydantic import BaseModel, Field

DEAD_SCORE_RATIO = 0.2


@dataclass
class SourceEstimate:
    encoder_index: int
    estimate: torch.Tensor
    crop_margin: int = 0


class DeadEncoderReport(BaseModel):
    scores: list[float]
    pathway_mass: list[float]
    dead: list[bool]
    threshold_ratio: float = DEAD_SCORE_RATIO

    @property
    def dead_indices(self) -> list[int]:
        return [index for index, flag in enumerate(self.dead) if flag]


class EstimatesManifest(BaseModel):
    checkpoint: str
    data_dir: str
    split: str
    encoders: list[int]
    shape: list[int]
    crop_margin: int = 0
    dtype: str = "<f4"
    files: dict[str, str] = Field(default_factory=dict)
