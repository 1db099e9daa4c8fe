import csv

import pytest
import torch
from torch.utils.data import DataLoader, TensorDataset

from src.management.exceptions import CheckpointError, DataError, TrainingDivergenceError
from src.services.datagen.dataset_service import generate_dataset
from src.services.datagen.schemas import MixingConfig
from src.services.losses.reconstruction import zero_reconstruction
from src.services.losses.schemas import LossConfig, LossParts
from src.services.losses.total import total_loss
from src.services.model.autoencoder import build
from src.services.train import (
    TrainConfig,
    Trainer,
    compute_losses,
    fit,
    load_checkpoint,
    read_manifest,
    save_checkpoint,
    step_lr,
)
from src.services.train import trainer as trainer_module


def _quick_config(**overrides) -> TrainConfig:
    values = {"epochs": 2, "batch_size": 8, "seed": 3}
    values.update(overrides)
    return TrainConfig(**values)


@pytest.mark.parametrize("epoch, expected", [(0, 1e-3), (49, 1e-3), (50, 1e-4), (99, 1e-4)])
def test_step_lr(epoch, expected):
    assert step_lr(epoch, TrainConfig()) == pytest.approx(expected, rel=1e-12)


def test_step_lr_constant_when_gamma_is_one():
    cfg = TrainConfig(lr_gamma=1.0, lr_step_epochs=1)
    assert {step_lr(epoch, cfg) for epoch in range(10)} == {1e-3}


def test_scheduler_follows_step_lr(tiny_model):
    cfg = TrainConfig(lr_step_epochs=2, lr_gamma=0.5)
    trainer = Trainer(tiny_model, cfg)
    for epoch in range(6):
        assert trainer.learning_rate == pytest.approx(step_lr(epoch, cfg))
        trainer.optimizer.step()
        trainer.scheduler.step()


def test_resumed_scheduler_starts_at_start_epoch(recwarn, tiny_model, tiny_dataset):
    cfg = _quick_config(epochs=4, lr_step_epochs=1, lr_gamma=0.5)
    report = fit(tiny_model, tiny_dataset, cfg, start_epoch=2)
    assert [record.learning_rate for record in report.records] == pytest.approx([step_lr(2, cfg), step_lr(3, cfg)])
    assert not [warning for warning in recwarn if "lr_scheduler.step()" in str(warning.message)]


def _gradients(model, loss) -> dict[str, torch.Tensor | None]:
    model.zero_grad(set_to_none=True)
    loss.backward()
    return {name: None if param.grad is None else param.grad.clone() for name, param in model.named_parameters()}


def test_step_gradient_combines_both_decoder_passes(tiny_config):
    model = build(tiny_config, seed=0, dtype=torch.float64)
    x = torch.rand(4, 1, 16, 16, dtype=torch.float64)
    cfg = LossConfig(lambda_pathway=0.0, lambda_zero_recon=0.5, lambda_z=0.0)

    parts, _ = compute_losses(model, x, cfg)
    combined = _gradients(model, total_loss(parts, cfg))
    primary = _gradients(model, compute_losses(model, x, cfg)[0].reconstruction)
    secondary = _gradients(model, compute_losses(model, x, cfg)[0].zero_recon)

    affine = {id(param) for param in model.normalization_affine_parameters()}
    for name, param in model.named_parameters():
        expected = primary[name] if secondary[name] is None else primary[name] + 0.5 * secondary[name]
        torch.testing.assert_close(combined[name], expected)
        if id(param) in affine:
            assert secondary[name] is None, name
    assert secondary["decoder.layer.0.weight"] is not None


def test_zero_reconstruction_step_leaves_affine_and_encoders(monkeypatch, tiny_model):
    def zero_only(model, x, cfg):
        nothing = torch.zeros((), dtype=x.dtype)
        parts = LossParts(
            reconstruction=nothing,
            pathway=nothing,
            zero_recon=zero_reconstruction(model, x.shape[0]),
            encoding=nothing,
        )
        return parts, None

    monkeypatch.setattr(trainer_module, "compute_losses", zero_only)
    trainer = Trainer(tiny_model, _quick_config())
    frozen = tiny_model.normalization_affine_parameters() + list(tiny_model.encoder.parameters())
    before = [param.detach().clone() for param in frozen]
    output_before = tiny_model.decoder.output_layer.parametrizations.weight.original1.detach().clone()

    trainer.train_epoch(DataLoader(TensorDataset(torch.rand(8, 1, 16, 16)), batch_size=8), epoch=0)

    for param, saved in zip(frozen, before):
        assert torch.equal(param, saved)
    assert not torch.equal(tiny_model.decoder.output_layer.parametrizations.weight.original1, output_before)


def test_total_equals_reconstruction_without_regularizers(tiny_model):
    x = torch.rand(4, 1, 16, 16)
    cfg = LossConfig(lambda_pathway=0.0, lambda_zero_recon=0.0, lambda_z=0.0)
    parts, _ = compute_losses(tiny_model, x, cfg)
    assert torch.equal(total_loss(parts, cfg), parts.reconstruction)


def test_fit_writes_checkpoints_and_history(tmp_path, tiny_model, tiny_dataset):
    report = fit(tiny_model, tiny_dataset, _quick_config(), out_dir=tmp_path)

    assert [record.epoch for record in report.records] == [0, 1]
    assert report.best_epoch in (0, 1)
    assert all(record.val_reconstruction is not None for record in report.records)
    assert (tmp_path / "last" / "manifest.json").exists()
    assert (tmp_path / "best" / "manifest.json").exists()
    assert read_manifest(tmp_path / "last").epoch == 1

    with open(tmp_path / "history.csv", newline="") as file_handle:
        rows = list(csv.DictReader(file_handle))
    assert len(rows) == 2
    assert float(rows[0]["learning_rate"]) == pytest.approx(1e-3)


def test_fit_is_deterministic(tiny_config, tiny_dataset):
    first = build(tiny_config, seed=4)
    second = build(tiny_config, seed=4)
    fit(first, tiny_dataset, _quick_config())
    fit(second, tiny_dataset, _quick_config())
    for a, b in zip(first.state_dict().values(), second.state_dict().values()):
        torch.testing.assert_close(a, b)


def test_fit_rejects_mismatched_image_size(tiny_model):
    data = generate_dataset(10, 32, MixingConfig(seed=0), threads=1)
    with pytest.raises(DataError):
        fit(tiny_model, data, _quick_config())


def test_fit_reports_divergent_term(monkeypatch, tiny_model, tiny_dataset):
    real_compute_losses = trainer_module.compute_losses

    def diverging(model, x, cfg):
        parts, x_hat = real_compute_losses(model, x, cfg)
        parts.pathway = parts.pathway * float("nan")
        return parts, x_hat

    monkeypatch.setattr(trainer_module, "compute_losses", diverging)
    with pytest.raises(TrainingDivergenceError, match="pathway") as exc_info:
        fit(tiny_model, tiny_dataset, _quick_config())
    assert "epoch 0, batch 0" in exc_info.value.detail
    assert exc_info.value.exit_code == 4


def test_resume_continues_epoch_numbering(tmp_path, tiny_model, tiny_dataset):
    fit(tiny_model, tiny_dataset, _quick_config(epochs=1), out_dir=tmp_path)
    restored = load_checkpoint(tmp_path / "last")
    report = fit(restored, tiny_dataset, _quick_config(epochs=3), out_dir=tmp_path, start_epoch=1)
    assert [record.epoch for record in report.records] == [0, 1, 2]
    assert read_manifest(tmp_path / "last").epoch == 2


def test_resume_keeps_better_best_and_earlier_history(monkeypatch, tmp_path, tiny_model, tiny_dataset):
    fit(tiny_model, tiny_dataset, _quick_config(), out_dir=tmp_path)
    best_before = read_manifest(tmp_path / "best")
    assert best_before.score is not None
    real_validate = Trainer.validate

    def worse(self, x_val):
        bce, mae = real_validate(self, x_val)
        return bce + 100.0, mae

    monkeypatch.setattr(Trainer, "validate", worse)
    restored = load_checkpoint(tmp_path / "last")
    report = fit(restored, tiny_dataset, _quick_config(epochs=3), out_dir=tmp_path, start_epoch=2)

    best_after = read_manifest(tmp_path / "best")
    assert (best_after.epoch, best_after.score) == (best_before.epoch, best_before.score)
    assert report.best_epoch == best_before.epoch
    assert [record.epoch for record in report.records] == [0, 1, 2]
    with open(tmp_path / "history.csv", newline="") as file_handle:
        rows = list(csv.DictReader(file_handle))
    assert [int(row["epoch"]) for row in rows] == [0, 1, 2]
    assert float(rows[2]["val_reconstruction"]) > 100.0


def test_checkpoint_round_trip_is_bit_identical(tmp_path, tiny_model):
    save_checkpoint(tiny_model, tmp_path / "ckpt", epoch=7, seed=11)
    restored = load_checkpoint(tmp_path / "ckpt", expected=tiny_model.config)

    manifest = read_manifest(tmp_path / "ckpt")
    assert (manifest.epoch, manifest.seed) == (7, 11)
    original = tiny_model.state_dict()
    for name, tensor in restored.state_dict().items():
        assert torch.equal(tensor, original[name]), name


def test_checkpoint_keeps_double_precision(tmp_path, tiny_config):
    model = build(tiny_config, dtype=torch.float64)
    save_checkpoint(model, tmp_path / "ckpt")
    restored = load_checkpoint(tmp_path / "ckpt")
    assert next(restored.parameters()).dtype == torch.float64


def test_checkpoint_rejects_wrong_encoder_count(tmp_path, tiny_model, tiny_config):
    save_checkpoint(tiny_model, tmp_path / "ckpt")
    other = tiny_config.model_copy(update={"num_encoders": 2, "decoder_channels": [24, 12]})
    with pytest.raises(CheckpointError, match="num_encoders"):
        load_checkpoint(tmp_path / "ckpt", expected=other)


def test_checkpoint_missing_blob(tmp_path, tiny_model):
    save_checkpoint(tiny_model, tmp_path / "ckpt")
    next((tmp_path / "ckpt" / "tensors").glob("*.bin")).unlink()
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "ckpt")


def test_checkpoint_missing_manifest(tmp_path):
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path)
