from collections.abc import Iterable

import torch

from src.management.exceptions import DataError
from src.services.losses.alpha_schemes import BaseAlphaScheme, create_alpha_scheme
from src.services.losses.partition import partition


def encoding_l2(z: list[torch.Tensor]) -> torch.Tensor:
    """(1 / (N h)) * sum_n ||z^n||^2 per sample, averaged over the batch.

    Every encoding is (B, ...) and h counts the elements of one sample's encoding.
    """
    if not z:
        raise DataError("encoding_l2 needs at least one encoding")
    stacked = torch.stack(list(z))
    if stacked.dim() < 3:
        raise DataError(f"Encodings must be batched (B, ...), got shape {tuple(z[0].shape)}")
    n = stacked.shape[0]
    h = stacked[0, 0].numel()
    squared_norms = stacked.pow(2).flatten(start_dim=2).sum(dim=-1)
    return (squared_norms.sum(dim=0) / (n * h)).mean()


def pathway_separation(
    weights: Iterable[torch.Tensor],
    n: int,
    scheme: str | BaseAlphaScheme = "uniform",
) -> torch.Tensor:
    """Alpha-weighted L1 norm of every off-diagonal block, summed over layers.

    `weights` must exclude the output layer and are read as (C_in, C_out, taps...).
    """
    alpha_scheme = create_alpha_scheme(scheme)
    total = None
    for W in weights:
        blocks = partition(W, n)
        alpha = alpha_scheme.matrix(n, blocks.block_size, dtype=W.dtype, device=W.device)
        layer_loss = (alpha * blocks.mass()).sum()
        total = layer_loss if total is None else total + layer_loss
    if total is None:
        return torch.zeros(())
    return total
