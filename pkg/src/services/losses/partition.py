import torch

from src.management.exceptions import DataError
from src.services.losses.schemas import BlockPartition


def partition(W: torch.Tensor, n: int) -> BlockPartition:
    """Split a (C_in, C_out, taps...) weight into N x N channel blocks."""
    if n < 1:
        raise DataError(f"Block grid order must be positive, got {n}")
    if W.dim() < 2:
        raise DataError(f"Weight needs at least 2 dimensions, got shape {tuple(W.shape)}")
    c_in, c_out = int(W.shape[0]), int(W.shape[1])
    if c_in % n or c_out % n:
        raise DataError(f"Weight with C_in={c_in}, C_out={c_out} cannot be split into {n} x {n} blocks")
    return BlockPartition(weight=W, n=n)


def block_mass(W: torch.Tensor, n: int) -> torch.Tensor:
    return partition(W, n).mass()
