from pydantic import BaseModel, Field

from src.services.infer.schemas import DeadEncoderReport


class SourceMatch(BaseModel):
    """Truth index -> encoder index, plus the MAE of each matched pair."""

    encoder_for_source: list[int]
    pair_mae: list[float]
    total_mae: float

    def unassigned(self, num_estimates: int) -> list[int]:
        return [index for index in range(num_estimates) if index not in self.encoder_for_source]


class LayerMass(BaseModel):
    name: str
    matrix: list[list[float]]


class EvalReport(BaseModel):
    split: str = "test"
    samples: int
    permutation: list[str | None] = Field(description="Matched source role per encoder, None when unassigned")
    source_mae: dict[str, float]
    mixture_mae: float
    dead_encoders: DeadEncoderReport
    weight_mass: list[LayerMass]
