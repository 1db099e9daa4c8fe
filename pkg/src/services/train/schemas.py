from pydantic import BaseModel, ConfigDict, Field

from src.services.losses.schemas import LossConfig
from src.services.model.schemas import ModelConfig

CHECKPOINT_FORMAT = "unmix-ae-checkpoint"
CHECKPOINT_VERSION = 1


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    epochs: int = Field(default=100, ge=1)
    batch_size: int = Field(default=256, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    lr_step_epochs: int = Field(default=50, ge=1)
    lr_gamma: float = Field(default=0.1, gt=0.0, le=1.0)
    global_weight_decay: float = Field(default=1e-5, ge=0.0)
    loss: LossConfig = Field(default_factory=LossConfig)
    seed: int = Field(default=0, ge=0)
    device: str | None = None


class EpochRecord(BaseModel):
    epoch: int
    reconstruction: float
    pathway: float
    zero_recon: float
    encoding: float
    total: float
    val_reconstruction: float | None = None
    val_mae: float | None = None
    learning_rate: float
    wall_time: float


class TrainReport(BaseModel):
    records: list[EpochRecord] = Field(default_factory=list)
    best_epoch: int | None = None
    best_checkpoint: str | None = None
    last_checkpoint: str | None = None
    history_csv: str | None = None


class TensorEntry(BaseModel):
    name: str
    shape: list[int]
    dtype: str
    file: str


class CheckpointManifest(BaseModel):
    format: str = CHECKPOINT_FORMAT
    version: int = CHECKPOINT_VERSION
    config: ModelConfig
    epoch: int = 0
    seed: int = 0
    score: float | None = None
    tensors: list[TensorEntry] = Field(default_factory=list)
