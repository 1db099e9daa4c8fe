from collections.abc import Iterable
from pathlib import Path

import torch

from src.management.exceptions import DataError
from src.management.logger import configure_logger
from src.services.infer.schemas import DEAD_SCORE_RATIO, DeadEncoderReport, EstimatesManifest, SourceEstimate
from src.services.losses.partition import block_mass
from src.services.model.autoencoder import MultiEncoderAutoencoder, concat_encodings
from src.services.rendering import save_grayscale_png

logger = configure_logger("Separation", "green")


def _require_frozen(m: MultiEncoderAutoencoder) -> None:
    if m.training:
        raise DataError("Source extraction needs a model in inference mode; call model.eval() first")


def _check_index(m: MultiEncoderAutoencoder, n: int) -> None:
    if not 0 <= n < m.num_encoders:
        raise DataError(f"Encoder index {n} is out of range for {m.num_encoders} encoders")


@torch.no_grad()
def decode_masked(m: MultiEncoderAutoencoder, z: list[torch.Tensor], active: Iterable[int]) -> torch.Tensor:
    """Decode with every encoding outside `active` replaced by zeros in place."""
    keep = set(active)
    for n in keep:
        _check_index(m, n)
    masked = [encoding if index in keep else torch.zeros_like(encoding) for index, encoding in enumerate(z)]
    return m.decode(concat_encodings(masked))


@torch.no_grad()
def mask_and_decode(m: MultiEncoderAutoencoder, x: torch.Tensor, n: int) -> SourceEstimate:
    _require_frozen(m)
    _check_index(m, n)
    z = m.encode_all(x)
    return SourceEstimate(encoder_index=n, estimate=decode_masked(m, z, [n]))


@torch.no_grad()
def estimate_all(m: MultiEncoderAutoencoder, x: torch.Tensor) -> list[SourceEstimate]:
    _require_frozen(m)
    z = m.encode_all(x)
    return [SourceEstimate(encoder_index=n, estimate=decode_masked(m, z, [n])) for n in range(m.num_encoders)]


def crop(est: SourceEstimate, margin: int) -> SourceEstimate:
    """Remove `margin` samples from every spatial edge."""
    if margin < 0:
        raise DataError(f"Crop margin must be non-negative, got {margin}")
    if margin == 0:
        return est
    spatial = est.estimate.shape[2:]
    if any(2 * margin >= extent for extent in spatial):
        raise DataError(f"Crop margin {margin} is too large for spatial extent {tuple(spatial)}")

    index = (slice(None), slice(None), *(slice(margin, extent - margin) for extent in spatial))
    return SourceEstimate(
        encoder_index=est.encoder_index,
        estimate=est.estimate[index],
        crop_margin=est.crop_margin + margin,
    )


def pathway_diagonal_mass(m: MultiEncoderAutoencoder) -> list[float]:
    """Diagonal block L1 mass per pathway, summed over decoder hidden layers."""
    total = torch.zeros(m.num_encoders, dtype=torch.float64)
    for _, weight in m.decoder.pathway_weights():
        total += block_mass(weight.detach(), m.num_encoders).diagonal().double().cpu()
    return total.tolist()


@torch.no_grad()
def dead_encoder_score(m: MultiEncoderAutoencoder, samples: torch.Tensor, batch_size: int = 256) -> DeadEncoderReport:
    _require_frozen(m)
    if samples.shape[0] < 1:
        raise DataError("dead_encoder_score needs at least one sample")

    totals = [0.0] * m.num_encoders
    for start in range(0, samples.shape[0], batch_size):
        for est in estimate_all(m, samples[start:start + batch_size]):
            totals[est.encoder_index] += est.estimate.abs().sum().item()
    elements = samples.shape[0] * samples[0].numel()
    scores = [total / elements for total in totals]

    dead = []
    for n, score in enumerate(scores):
        others = [other for index, other in enumerate(scores) if index != n]
        dead.append(bool(others) and score < DEAD_SCORE_RATIO * (sum(others) / len(others)))

    report = DeadEncoderReport(scores=scores, pathway_mass=pathway_diagonal_mass(m), dead=dead)
    logger.info(f"Encoder scores {[round(score, 4) for score in scores]}, dead: {report.dead_indices}")
    return report


def save_estimates(
    estimates: list[SourceEstimate],
    out_dir: Path,
    checkpoint: str,
    data_dir: str,
    split: str,
    png_count: int = 0,
) -> EstimatesManifest:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not estimates:
        raise DataError("No estimates to save")

    files = {}
    for est in estimates:
        array = est.estimate.detach().cpu().numpy().astype("<f4")
        file_name = f"encoder_{est.encoder_index}.f32"
        array.tofile(out_dir / file_name)
        files[str(est.encoder_index)] = file_name
        for sample in range(min(png_count, array.shape[0])):
            save_grayscale_png(array[sample, 0], out_dir / "png" / f"sample_{sample:04d}_encoder_{est.encoder_index}.png", upscale=4)

    manifest = EstimatesManifest(
        checkpoint=checkpoint,
        data_dir=data_dir,
        split=split,
        encoders=[est.encoder_index for est in estimates],
        shape=list(estimates[0].estimate.shape),
        crop_margin=estimates[0].crop_margin,
        files=files,
    )
    (out_dir / "manifest.json").write_text(manifest.model_dump_json(indent=2))
    logger.info(f"Wrote {len(estimates)} estimate blob(s) to {out_dir}")
    return manifest
