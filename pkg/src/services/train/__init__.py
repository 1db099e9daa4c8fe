from src.services.train.checkpoint import load_checkpoint, read_manifest, save_checkpoint
from src.services.train.schedule import step_lr
from src.services.train.schemas import TrainConfig, TrainReport
from src.services.train.trainer import Trainer, compute_losses, fit

__all__ = [
    "TrainConfig",
    "TrainReport",
    "Trainer",
    "compute_losses",
    "fit",
    "load_checkpoint",
    "read_manifest",
    "save_checkpoint",
    "step_lr",
]
