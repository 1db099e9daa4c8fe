from itertools import permutations

import numpy as np
import torch

from src.management.exceptions import DataError
from src.services.evaluation.schemas import SourceMatch

MAX_ESTIMATES = 8


def _as_array(values) -> np.ndarray:
    if isinstance(values, torch.Tensor):
        return values.detach().cpu().double().numpy()
    return np.asarray(values, dtype=np.float64)


def mae(a, b) -> float:
    left, right = _as_array(a), _as_array(b)
    if left.shape != right.shape:
        raise DataError(f"Shape mismatch: {left.shape} vs {right.shape}")
    return float(np.abs(left - right).mean())


def assign(cost: np.ndarray) -> SourceMatch:
    """Exhaustive injective assignment of truths (columns) to estimates (rows)."""
    cost = np.asarray(cost, dtype=np.float64)
    num_estimates, num_truths = cost.shape
    if num_estimates < num_truths:
        raise DataError(f"Need at least as many estimates as truths, got {num_estimates} < {num_truths}")
    if num_estimates > MAX_ESTIMATES:
        raise DataError(f"Exhaustive matching supports at most {MAX_ESTIMATES} estimates, got {num_estimates}")

    best: tuple[int, ...] | None = None
    best_total = np.inf
    truths = np.arange(num_truths)
    for candidate in permutations(range(num_estimates), num_truths):
        total = cost[list(candidate), truths].sum()
        if total < best_total:
            best, best_total = candidate, total

    chosen = list(best)
    return SourceMatch(
        encoder_for_source=chosen,
        pair_mae=[float(cost[encoder, truth]) for truth, encoder in enumerate(chosen)],
        total_mae=float(best_total),
    )


def match_sources(estimates: list, truths: list) -> SourceMatch:
    if len(estimates) < len(truths):
        raise DataError(f"Need at least as many estimates as truths, got {len(estimates)} < {len(truths)}")
    cost = np.array([[mae(estimate, truth) for truth in truths] for estimate in estimates])
    return assign(cost.reshape(len(estimates), len(truths)))
