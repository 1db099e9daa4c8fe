import torch
import torch.nn.functional as F

from src.management.exceptions import DataError
from src.services.model.autoencoder import MultiEncoderAutoencoder


def bce_reconstruction(x_hat: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
    """Mean binary cross-entropy over batch and elements."""
    if x_hat.shape != x.shape:
        raise DataError(f"Reconstruction shape {tuple(x_hat.shape)} does not match target {tuple(x.shape)}")
    with torch.no_grad():
        if bool((x < 0).any() or (x > 1).any()):
            raise DataError("BCE targets must lie in [0, 1]")
    return F.binary_cross_entropy(x_hat, x)


def zero_reconstruction(m: MultiEncoderAutoencoder, batch_size: int) -> torch.Tensor:
    """BCE between D(Z_zero) and an all-zero target.

    Decoder-only pass; normalization affine parameters are detached so this
    term never moves them.
    """
    output = m.decode(m.zero_encoding(batch_size), frozen_affine=True)
    return F.binary_cross_entropy(output, torch.zeros_like(output))
