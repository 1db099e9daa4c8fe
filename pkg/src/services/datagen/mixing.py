import numpy as np
from scipy.signal import convolve2d
from scipy.special import expit

from src.management.exceptions import DataError
from src.services.datagen.schemas import MixingConfig, MixtureSample, SourceImage


def minmax_scale(x) -> np.ndarray:
    """Rescale to [0, 1]; a constant grid maps to all zeros."""
    values = np.asarray(x)
    if not np.issubdtype(values.dtype, np.floating):
        values = values.astype(np.float64)
    low = values.min()
    span = values.max() - low
    if span == 0:
        return np.zeros_like(values)
    return (values - low) / span


def sigmoid_field(tri: SourceImage, circ: SourceImage, alpha: float) -> np.ndarray:
    """Min-max scaled logistic response of the summed sources, before distortion."""
    if tri.pixels.shape != circ.pixels.shape:
        raise DataError(f"Source shapes differ: {tri.pixels.shape} vs {circ.pixels.shape}")
    summed = tri.pixels.astype(np.float64) + circ.pixels.astype(np.float64)
    return minmax_scale(expit(alpha / 2.0 * summed))


def mix(tri: SourceImage, circ: SourceImage, cfg: MixingConfig) -> MixtureSample:
    field = sigmoid_field(tri, circ, cfg.alpha)

    kernel = cfg.kernel_array()
    rng = np.random.default_rng(cfg.seed)
    if rng.random() < cfg.flip_probability:
        kernel = kernel[::-1, :]

    distorted = convolve2d(field, kernel, mode="same", boundary="fill", fillvalue=0.0)
    mixture = minmax_scale(distorted).astype(np.float32)
    return MixtureSample(mixture=mixture, sources=[tri, circ], seed=cfg.seed)
