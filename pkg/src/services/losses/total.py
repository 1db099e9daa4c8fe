import math

import torch

from src.management.exceptions import TrainingDivergenceError
from src.services.losses.schemas import LossConfig, LossParts


def total_loss(parts: LossParts, cfg: LossConfig) -> torch.Tensor | float:
    """L_recon + lambda_pathway L_pathway + lambda_zero L_zero + lambda_z L_z."""
    for name, value in parts.as_floats().items():
        if not math.isfinite(value):
            raise TrainingDivergenceError(name, value)

    return (
        parts.reconstruction
        + cfg.lambda_pathway * parts.pathway
        + cfg.lambda_zero_recon * parts.zero_recon
        + cfg.lambda_z * parts.encoding
    )
