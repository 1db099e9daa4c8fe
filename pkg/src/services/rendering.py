from pathlib import Path

import numpy as np
from PIL import Image


def save_grayscale_png(values: np.ndarray, path: Path, upscale: int = 1, normalize: bool = False) -> Path:
    """Write a 2-D array as an 8-bit grayscale PNG.

    Values are clipped to [0, 1] unless `normalize` divides by the maximum first.
    """
    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 1:
        array = array[np.newaxis, :]
    if array.ndim != 2:
        raise ValueError(f"Expected a 2-D array, got shape {array.shape}")
    if normalize:
        peak = array.max()
        array = array / peak if peak > 0 else np.zeros_like(array)

    image = Image.fromarray(np.round(np.clip(array, 0.0, 1.0) * 255).astype(np.uint8))
    if upscale > 1:
        image = image.resize((image.width * upscale, image.height * upscale), Image.Resampling.NEAREST)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    image.save(path)
    return path
