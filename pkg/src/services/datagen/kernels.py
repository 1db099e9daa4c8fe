import numpy as np


def default_distortion_kernel(
    size: int = 7,
    shift: tuple[int, int] = (2, 2),
    sigma: float = 1.0,
    blob_weight: float = 1.0,
) -> np.ndarray:
    """Identity tap plus a displaced Gaussian blob, normalized to unit sum.

    Convolving with it leaves a sharp copy of the image and a blurred copy
    offset by `shift` (rows, cols), which shifts and smears shape edges.
    """
    if size % 2 == 0 or size < 1:
        raise ValueError(f"Kernel size must be odd and positive, got {size}")
    center = size // 2
    row_center = center + shift[0]
    col_center = center + shift[1]
    if not (0 <= row_center < size and 0 <= col_center < size):
        raise ValueError(f"Shift {shift} moves the blob outside a {size}x{size} kernel")

    rows, cols = np.mgrid[0:size, 0:size]
    blob = np.exp(-((rows - row_center) ** 2 + (cols - col_center) ** 2) / (2.0 * sigma**2))
    blob /= blob.sum()

    identity = np.zeros((size, size))
    identity[center, center] = 1.0

    kernel = identity + blob_weight * blob
    return kernel / kernel.sum()


def identity_kernel(size: int = 1) -> np.ndarray:
    kernel = np.zeros((size, size))
    kernel[size // 2, size // 2] = 1.0
    return kernel
