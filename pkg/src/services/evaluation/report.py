import numpy as np
import torch

from src.management.exceptions import DataError
from src.management.logger import configure_logger
from src.services.datagen.schemas import DatasetSplit, MixtureSet
from src.services.evaluation.metrics import assign
from src.services.evaluation.schemas import EvalReport
from src.services.evaluation.weight_mass import weight_mass
from src.services.infer.separation_service import dead_encoder_score, estimate_all
from src.services.model.autoencoder import MultiEncoderAutoencoder

logger = configure_logger("Evaluation", "yellow")


@torch.no_grad()
def evaluate(m: MultiEncoderAutoencoder, data: DatasetSplit, batch_size: int = 256) -> EvalReport:
    """Score a frozen model on the held-out split."""
    subset: MixtureSet = data.test
    if len(subset) == 0:
        raise DataError("The test split is empty; nothing to evaluate")
    m.eval()

    reference = next(m.parameters())
    roles = [role.value for role in MixtureSet.ROLES]
    truths_all = subset.sources()
    abs_sums = np.zeros((m.num_encoders, len(roles)))
    mixture_abs_sum = 0.0

    for start in range(0, len(subset), batch_size):
        stop = start + batch_size
        x = torch.from_numpy(np.ascontiguousarray(subset.mixtures[start:stop])).unsqueeze(1)
        x = x.to(dtype=reference.dtype, device=reference.device)
        truths = torch.from_numpy(np.ascontiguousarray(truths_all[start:stop])).to(dtype=reference.dtype, device=reference.device)

        _, x_hat = m(x)
        mixture_abs_sum += (x_hat - x).abs().sum().item()
        for est in estimate_all(m, x):
            for source_index in range(len(roles)):
                diff = est.estimate[:, 0] - truths[:, source_index]
                abs_sums[est.encoder_index, source_index] += diff.abs().sum().item()

    elements = subset.mixtures.size
    match = assign(abs_sums / elements)

    permutation: list[str | None] = [None] * m.num_encoders
    for source_index, encoder in enumerate(match.encoder_for_source):
        permutation[encoder] = roles[source_index]

    x_all = torch.from_numpy(np.ascontiguousarray(subset.mixtures)).unsqueeze(1).to(dtype=reference.dtype, device=reference.device)
    report = EvalReport(
        samples=len(subset),
        permutation=permutation,
        source_mae=dict(zip(roles, match.pair_mae)),
        mixture_mae=mixture_abs_sum / elements,
        dead_encoders=dead_encoder_score(m, x_all, batch_size=batch_size),
        weight_mass=weight_mass(m),
    )
    logger.info(
        f"Evaluated {report.samples} samples: mixture MAE {report.mixture_mae:.4f}, "
        f"source MAE {report.source_mae}, permutation {report.permutation}"
    )
    return report
