from collections.abc import Callable

import torch
from torch import nn

from src.management.logger import configure_logger
from src.services.gradcheck.schemas import GradcheckEntry, GradcheckReport
from src.services.losses.reconstruction import bce_reconstruction, zero_reconstruction
from src.services.losses.regularization import encoding_l2, pathway_separation
from src.services.losses.schemas import LossConfig
from src.services.model.autoencoder import MultiEncoderAutoencoder, build
from src.services.model.schemas import ModelConfig

logger = configure_logger("Gradcheck", "red")

TINY_MODEL = ModelConfig(
    num_encoders=2,
    image_size=8,
    encoder_channels=[4],
    encoding_channels=2,
    decoder_channels=[4],
)
BATCH_SIZE = 4


def relative_error(analytic: torch.Tensor, numeric: torch.Tensor) -> float:
    """||a - n|| / max(||a||, ||n||, 1e-12)"""
    scale = max(analytic.norm().item(), numeric.norm().item(), 1e-12)
    return (analytic - numeric).norm().item() / scale


def central_differences(loss_fn: Callable[[], torch.Tensor], params: list[nn.Parameter], step: float) -> torch.Tensor:
    estimates = []
    with torch.no_grad():
        for param in params:
            flat = param.view(-1)
            for index in range(flat.numel()):
                original = flat[index].item()
                flat[index] = original + step
                upper = loss_fn().item()
                flat[index] = original - step
                lower = loss_fn().item()
                flat[index] = original
                estimates.append((upper - lower) / (2.0 * step))
    return torch.tensor(estimates, dtype=torch.float64)


def analytic_gradient(loss_fn: Callable[[], torch.Tensor], params: list[nn.Parameter]) -> torch.Tensor:
    grads = torch.autograd.grad(loss_fn(), params, allow_unused=True)
    return torch.cat([
        (grad if grad is not None else torch.zeros_like(param)).reshape(-1).double()
        for grad, param in zip(grads, params)
    ])


def _loss_terms(model: MultiEncoderAutoencoder, x: torch.Tensor, loss_cfg: LossConfig) -> dict[str, tuple[Callable[[], torch.Tensor], float]]:
    weights = lambda: [weight for _, weight in model.decoder.pathway_weights()]
    return {
        "reconstruction": (lambda: bce_reconstruction(model(x)[1], x), 1.0),
        "pathway": (lambda: pathway_separation(weights(), model.num_encoders, loss_cfg.alpha_scheme), loss_cfg.lambda_pathway),
        "zero_recon": (lambda: zero_reconstruction(model, x.shape[0]), loss_cfg.lambda_zero_recon),
        "encoding": (lambda: encoding_l2(model.encode_all(x)), loss_cfg.lambda_z),
    }


def gradcheck(
    seed: int = 0,
    loss_cfg: LossConfig | None = None,
    tolerance: float = 1e-4,
    step: float = 1e-6,
) -> GradcheckReport:
    """Compare autograd against central finite differences for every loss term."""
    loss_cfg = loss_cfg or LossConfig()
    model = build(TINY_MODEL, seed=seed, dtype=torch.float64)
    model.train()
    generator = torch.Generator().manual_seed(seed)
    x = torch.rand((BATCH_SIZE, *TINY_MODEL.input_shape), generator=generator, dtype=torch.float64)

    all_params = list(model.parameters())
    affine_ids = {id(param) for param in model.normalization_affine_parameters()}
    encoder_ids = {id(param) for param in model.encoder.parameters()}
    frozen_for_zero = [param for param in all_params if id(param) in affine_ids | encoder_ids]
    trainable_for_zero = [param for param in all_params if id(param) not in affine_ids | encoder_ids]

    entries = []
    for term, (loss_fn, weight) in _loss_terms(model, x, loss_cfg).items():
        if weight == 0:
            entries.append(GradcheckEntry(term=term, status="skipped"))
            logger.info(f"{term}: skipped (lambda = 0)")
            continue

        entry = GradcheckEntry(term=term, status="passed")
        params = all_params
        if term == "zero_recon":
            params = trainable_for_zero
            frozen = analytic_gradient(loss_fn, frozen_for_zero)
            entry.frozen_gradient_max = frozen.abs().max().item() if frozen.numel() else 0.0

        error = relative_error(analytic_gradient(loss_fn, params), central_differences(loss_fn, params, step))
        entry.relative_error = error
        entry.checked_parameters = sum(param.numel() for param in params)
        if error >= tolerance or (entry.frozen_gradient_max or 0.0) != 0.0:
            entry.status = "failed"
        entries.append(entry)
        logger.info(f"{term}: {entry.status}, relative error {error:.3e} over {entry.checked_parameters} parameters")

    return GradcheckReport(
        seed=seed,
        tolerance=tolerance,
        step=step,
        parameter_count=sum(param.numel() for param in all_params),
        entries=entries,
    )
