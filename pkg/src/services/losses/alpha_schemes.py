from abc import ABC, abstractmethod

import torch

from src.management.logger import configure_logger

logger = configure_logger("AlphaSchemes", "cyan")


class BaseAlphaScheme(ABC):
    """Per-block scaling of the off-diagonal L1 penalty."""

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    @abstractmethod
    def coefficient(self, i: int, j: int, n: int, block_size: int) -> float:
        pass

    def matrix(self, n: int, block_size: int, dtype: torch.dtype = torch.float64, device=None) -> torch.Tensor:
        """N x N coefficients with a zero diagonal."""
        alpha = torch.zeros((n, n), dtype=dtype, device=device)
        for i in range(n):
            for j in range(n):
                if i != j:
                    alpha[i, j] = self.coefficient(i, j, n, block_size)
        return alpha


class UniformAlphaScheme(BaseAlphaScheme):
    @property
    def name(self) -> str:
        return "uniform"

    def coefficient(self, i: int, j: int, n: int, block_size: int) -> float:
        return 1.0 / block_size


class PositionalAlphaScheme(BaseAlphaScheme):
    """Row-dependent weighting: 1/(N - i) above the diagonal, 1/i below it."""

    @property
    def name(self) -> str:
        return "positional"

    def coefficient(self, i: int, j: int, n: int, block_size: int) -> float:
        if j > i:
            return 1.0 / ((n - i) * block_size)
        return 1.0 / (i * block_size)


_ALPHA_SCHEMES: dict[str, type[BaseAlphaScheme]] = {
    "uniform": UniformAlphaScheme,
    "positional": PositionalAlphaScheme,
}


def get_available_alpha_schemes() -> list[str]:
    return list(_ALPHA_SCHEMES)


def create_alpha_scheme(scheme: str | BaseAlphaScheme) -> BaseAlphaScheme:
    if isinstance(scheme, BaseAlphaScheme):
        return scheme

    normalized_name = str(scheme).lower()
    if normalized_name not in _ALPHA_SCHEMES:
        raise ValueError(
            f"Unsupported alpha scheme: {scheme}. Available schemes: {get_available_alpha_schemes()}"
        )
    instance = _ALPHA_SCHEMES[normalized_name]()
    logger.debug(f"Created alpha scheme: {normalized_name}")
    return instance
