from dataclasses import dataclass
from typing import Iterator, Literal

import torch
from pydantic import BaseModel, ConfigDict, Field

AlphaSchemeName = Literal["uniform", "positional"]


class LossConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lambda_pathway: float = Field(default=5e-1, ge=0.0)
    lambda_zero_recon: float = Field(default=1e-2, ge=0.0)
    lambda_z: float = Field(default=1e-2, ge=0.0)
    alpha_scheme: AlphaSchemeName = "uniform"


@dataclass
class LossParts:
    """Pre-lambda values of the four training terms."""

    reconstruction: torch.Tensor | float
    pathway: torch.Tensor | float
    zero_recon: torch.Tensor | float
    encoding: torch.Tensor | float

    def items(self) -> Iterator[tuple[str, torch.Tensor | float]]:
        yield "reconstruction", self.reconstruction
        yield "pathway", self.pathway
        yield "zero_recon", self.zero_recon
        yield "encoding", self.encoding

    def as_floats(self) -> dict[str, float]:
        return {name: scalar(value) for name, value in self.items()}


def scalar(value: torch.Tensor | float) -> float:
    """Python float of a loss value, detached from the autograd graph."""
    if isinstance(value, torch.Tensor):
        return float(value.detach())
    return float(value)


@dataclass
class BlockPartition:
    """N x N grid of channel blocks over a (C_in, C_out, taps...) weight."""

    weight: torch.Tensor
    n: int

    @property
    def c_in(self) -> int:
        return int(self.weight.shape[0])

    @property
    def c_out(self) -> int:
        return int(self.weight.shape[1])

    @property
    def block_rows(self) -> int:
        return self.c_in // self.n

    @property
    def block_cols(self) -> int:
        return self.c_out // self.n

    @property
    def block_size(self) -> int:
        """Elements per block, kernel taps included."""
        taps = self.weight[0, 0].numel()
        return self.block_rows * self.block_cols * taps

    def block(self, i: int, j: int) -> torch.Tensor:
        rows = slice(i * self.block_rows, (i + 1) * self.block_rows)
        cols = slice(j * self.block_cols, (j + 1) * self.block_cols)
        return self.weight[rows, cols]

    def blocks(self) -> Iterator[tuple[tuple[int, int], torch.Tensor]]:
        for i in range(self.n):
            for j in range(self.n):
                yield (i, j), self.block(i, j)

    def mass(self) -> torch.Tensor:
        """Entry (i, j) is the L1 norm of B_{i,j}."""
        grid = self.weight.reshape(self.n, self.block_rows, self.n, self.block_cols, -1)
        return grid.abs().sum(dim=(1, 3, 4))
