from pathlib import Path

import numpy as np

from src.management.logger import configure_logger
from src.services.evaluation.schemas import LayerMass
from src.services.losses.partition import block_mass
from src.services.model.autoencoder import MultiEncoderAutoencoder
from src.services.rendering import save_grayscale_png

logger = configure_logger("WeightMass", "cyan")

PNG_CELL = 32


def weight_mass(m: MultiEncoderAutoencoder) -> list[LayerMass]:
    """Per decoder hidden layer, the N x N matrix of block L1 masses (taps summed)."""
    return [
        LayerMass(name=name, matrix=block_mass(weight.detach(), m.num_encoders).double().cpu().tolist())
        for name, weight in m.decoder.pathway_weights()
    ]


def off_diagonal_ratio(layers: list[LayerMass]) -> float:
    """Total off-diagonal mass over total diagonal mass."""
    diagonal, off_diagonal = 0.0, 0.0
    for layer in layers:
        matrix = np.asarray(layer.matrix)
        diagonal += float(np.trace(matrix))
        off_diagonal += float(matrix.sum() - np.trace(matrix))
    return off_diagonal / diagonal if diagonal > 0 else float("inf")


def export_weight_mass(m: MultiEncoderAutoencoder, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for layer in weight_mass(m):
        matrix = np.asarray(layer.matrix)
        csv_path = out_dir / f"{layer.name}.csv"
        np.savetxt(csv_path, matrix, delimiter=",", fmt="%.8g")
        png_path = save_grayscale_png(matrix, out_dir / f"{layer.name}.png", upscale=PNG_CELL, normalize=True)
        written.extend([csv_path, png_path])
    logger.info(f"Exported {len(written) // 2} layer mass matrices to {out_dir}")
    return written
