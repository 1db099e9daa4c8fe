import csv
import math
import time
from pathlib import Path

import numpy as np
import torch
from torch.optim import Adam
from torch.optim.lr_scheduler import LambdaLR
from torch.utils.data import DataLoader, TensorDataset

from src.management.exceptions import DataError, TrainingDivergenceError
from src.management.logger import configure_logger
from src.management.settings import get_settings
from src.services.datagen.schemas import DatasetSplit, MixtureSet
from src.services.losses.reconstruction import bce_reconstruction, zero_reconstruction
from src.services.losses.regularization import encoding_l2, pathway_separation
from src.services.losses.schemas import LossConfig, LossParts
from src.services.losses.total import total_loss
from src.services.model.autoencoder import MultiEncoderAutoencoder
from src.services.train.checkpoint import MANIFEST_NAME, read_manifest, save_checkpoint
from src.services.train.schedule import lr_factor
from src.services.train.schemas import EpochRecord, TrainConfig, TrainReport

logger = configure_logger("Trainer", "magenta")

HISTORY_FIELDS = list(EpochRecord.model_fields)


def mixtures_tensor(subset: MixtureSet, model: MultiEncoderAutoencoder) -> torch.Tensor:
    """(samples, 1, H, W) tensor in the model's dtype."""
    reference = next(model.parameters())
    x = torch.from_numpy(np.ascontiguousarray(subset.mixtures)).unsqueeze(1)
    return x.to(dtype=reference.dtype, device=reference.device)


def compute_losses(model: MultiEncoderAutoencoder, x: torch.Tensor, cfg: LossConfig) -> tuple[LossParts, torch.Tensor]:
    z, x_hat = model(x)
    weights = [weight for _, weight in model.decoder.pathway_weights()]
    parts = LossParts(
        reconstruction=bce_reconstruction(x_hat, x),
        pathway=pathway_separation(weights, model.num_encoders, cfg.alpha_scheme),
        zero_recon=zero_reconstruction(model, x.shape[0]),
        encoding=encoding_l2(z),
    )
    return parts, x_hat


class Trainer:
    def __init__(self, model: MultiEncoderAutoencoder, cfg: TrainConfig, out_dir: Path | None = None):
        self.model = model
        self.cfg = cfg
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.optimizer = Adam(
            model.parameters(),
            lr=cfg.learning_rate,
            betas=(0.9, 0.999),
            eps=1e-8,
            weight_decay=cfg.global_weight_decay,
        )
        self.scheduler = self._schedule_from(0)

    def _schedule_from(self, epoch: int) -> LambdaLR:
        """LambdaLR positioned at `epoch` without replaying earlier steps."""
        for group in self.optimizer.param_groups:
            group.setdefault("initial_lr", self.cfg.learning_rate)
        return LambdaLR(self.optimizer, lr_lambda=lambda step: lr_factor(step, self.cfg), last_epoch=epoch - 1)

    @property
    def learning_rate(self) -> float:
        return self.optimizer.param_groups[0]["lr"]

    def train_epoch(self, loader: DataLoader, epoch: int) -> dict[str, float]:
        self.model.train()
        sums = dict.fromkeys(("reconstruction", "pathway", "zero_recon", "encoding", "total"), 0.0)
        seen = 0

        for batch_index, (x,) in enumerate(loader):
            self.optimizer.zero_grad(set_to_none=True)
            parts, _ = compute_losses(self.model, x, self.cfg.loss)
            try:
                loss = total_loss(parts, self.cfg.loss)
            except TrainingDivergenceError as exc:
                raise TrainingDivergenceError(exc.term, exc.value, epoch=epoch, batch=batch_index) from exc
            if not math.isfinite(loss.item()):
                raise TrainingDivergenceError("total", loss.item(), epoch=epoch, batch=batch_index)

            # Both decoder passes contribute to this single step.
            loss.backward()
            self.optimizer.step()

            size = x.shape[0]
            seen += size
            for name, value in parts.as_floats().items():
                sums[name] += value * size
            sums["total"] += loss.item() * size
            logger.debug(f"epoch {epoch} batch {batch_index}: total={loss.item():.5f}")

        return {name: value / max(seen, 1) for name, value in sums.items()}

    @torch.no_grad()
    def validate(self, x_val: torch.Tensor) -> tuple[float | None, float | None]:
        if x_val.shape[0] == 0:
            return None, None
        self.model.eval()
        bce_sum, abs_sum = 0.0, 0.0
        for start in range(0, x_val.shape[0], self.cfg.batch_size):
            x = x_val[start:start + self.cfg.batch_size]
            _, x_hat = self.model(x)
            bce_sum += bce_reconstruction(x_hat, x).item() * x.shape[0]
            abs_sum += (x_hat - x).abs().mean().item() * x.shape[0]
        count = x_val.shape[0]
        return bce_sum / count, abs_sum / count

    def fit(self, data: DatasetSplit, start_epoch: int = 0) -> TrainReport:
        if len(data.train) == 0:
            raise DataError("Training split is empty")
        if data.train.image_size != self.model.config.image_size:
            raise DataError(
                f"Dataset images are {data.train.image_size}px but the model expects {self.model.config.image_size}px"
            )

        x_train = mixtures_tensor(data.train, self.model)
        x_val = mixtures_tensor(data.test, self.model)
        generator = torch.Generator()
        loader = DataLoader(TensorDataset(x_train), batch_size=self.cfg.batch_size, shuffle=True, generator=generator)

        if start_epoch > 0:
            self.scheduler = self._schedule_from(start_epoch)

        report = TrainReport()
        best_score = math.inf
        if start_epoch > 0 and self.out_dir is not None:
            best_score = self._restore(report, start_epoch)
        logger.info(
            f"Training {self.model.num_encoders}-encoder model on {len(data.train)} samples "
            f"for epochs {start_epoch}..{self.cfg.epochs - 1}"
        )

        for epoch in range(start_epoch, self.cfg.epochs):
            started = time.perf_counter()
            generator.manual_seed(self.cfg.seed + epoch)
            learning_rate = self.learning_rate
            means = self.train_epoch(loader, epoch)
            val_bce, val_mae = self.validate(x_val)
            self.scheduler.step()

            record = EpochRecord(
                epoch=epoch,
                **means,
                val_reconstruction=val_bce,
                val_mae=val_mae,
                learning_rate=learning_rate,
                wall_time=time.perf_counter() - started,
            )
            report.records.append(record)
            logger.info(
                f"epoch {epoch}: recon={record.reconstruction:.5f} pathway={record.pathway:.5f} "
                f"zero={record.zero_recon:.5f} z={record.encoding:.5f} total={record.total:.5f} "
                f"val_recon={val_bce if val_bce is not None else float('nan'):.5f} "
                f"lr={learning_rate:.2e} time={record.wall_time:.1f}s"
            )

            score = val_bce if val_bce is not None else record.reconstruction
            improved = score < best_score
            if improved:
                best_score = score
                report.best_epoch = epoch
            if self.out_dir is not None:
                self._persist(report, epoch, score, improved)

        return report

    def _restore(self, report: TrainReport, start_epoch: int) -> float:
        """Pull earlier epochs and the best score of the run in `out_dir` into `report`."""
        history = self.out_dir / "history.csv"
        if history.exists():
            report.records = [record for record in read_history(history) if record.epoch < start_epoch]
            report.history_csv = str(history)

        best = self.out_dir / "best"
        if not (best / MANIFEST_NAME).exists():
            return math.inf
        manifest = read_manifest(best)
        if manifest.score is None:
            logger.warning(f"{best} has no stored score; the first resumed epoch replaces it")
            return math.inf
        report.best_epoch = manifest.epoch
        report.best_checkpoint = str(best)
        logger.info(
            f"Resuming after {len(report.records)} recorded epochs, best epoch {manifest.epoch} ({manifest.score:.5f})"
        )
        return manifest.score

    def _persist(self, report: TrainReport, epoch: int, score: float, improved: bool) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        last = save_checkpoint(self.model, self.out_dir / "last", epoch=epoch, seed=self.cfg.seed, score=score)
        report.last_checkpoint = str(last)
        if improved:
            best = save_checkpoint(self.model, self.out_dir / "best", epoch=epoch, seed=self.cfg.seed, score=score)
            report.best_checkpoint = str(best)
            logger.info(f"New best checkpoint at epoch {epoch}")
        report.history_csv = str(write_history(report, self.out_dir / "history.csv"))


def write_history(report: TrainReport, path: Path) -> Path:
    with open(path, "w", newline="") as file_handle:
        writer = csv.DictWriter(file_handle, fieldnames=HISTORY_FIELDS)
        writer.writeheader()
        for record in report.records:
            writer.writerow(record.model_dump())
    return path


def read_history(path: Path) -> list[EpochRecord]:
    with open(path, newline="") as file_handle:
        rows = list(csv.DictReader(file_handle))
    # Empty cells are epochs without a validation split.
    return [EpochRecord.model_validate({key: value or None for key, value in row.items()}) for row in rows]


def fit(
    model: MultiEncoderAutoencoder,
    data: DatasetSplit,
    cfg: TrainConfig,
    out_dir: Path | None = None,
    start_epoch: int = 0,
) -> TrainReport:
    device = cfg.device or get_settings().device
    model.to(device)
    return Trainer(model, cfg, out_dir=out_dir).fit(data, start_epoch=start_epoch)
