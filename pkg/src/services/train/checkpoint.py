from pathlib import Path

import numpy as np
import torch
from pydantic import ValidationError

from src.management.exceptions import CheckpointError
from src.management.logger import configure_logger
from src.services.model.autoencoder import MultiEncoderAutoencoder, build
from src.services.model.schemas import ModelConfig
from src.services.train.schemas import (
    CHECKPOINT_FORMAT,
    CHECKPOINT_VERSION,
    CheckpointManifest,
    TensorEntry,
)

logger = configure_logger("Checkpoint", "yellow")

MANIFEST_NAME = "manifest.json"
TENSOR_DIR = "tensors"

_DTYPES: dict[torch.dtype, str] = {
    torch.float32: "<f4",
    torch.float64: "<f8",
    torch.int64: "<i8",
}


def save_checkpoint(
    model: MultiEncoderAutoencoder,
    path: Path,
    epoch: int = 0,
    seed: int = 0,
    score: float | None = None,
) -> Path:
    """Write a manifest plus one raw little-endian blob per state-dict entry.

    `score` is the validation reconstruction of that epoch; resuming compares against it.
    """
    path = Path(path)
    tensor_dir = path / TENSOR_DIR
    tensor_dir.mkdir(parents=True, exist_ok=True)

    entries = []
    for name, tensor in model.state_dict().items():
        if tensor.dtype not in _DTYPES:
            raise CheckpointError(f"Unsupported dtype {tensor.dtype} for '{name}'")
        dtype = _DTYPES[tensor.dtype]
        file_name = f"{TENSOR_DIR}/{name}.bin"
        tensor.detach().cpu().numpy().astype(dtype, copy=False).tofile(path / file_name)
        entries.append(TensorEntry(name=name, shape=list(tensor.shape), dtype=dtype, file=file_name))

    manifest = CheckpointManifest(config=model.config, epoch=epoch, seed=seed, score=score, tensors=entries)
    (path / MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2))
    logger.debug(f"Checkpoint saved to {path} (epoch {epoch})")
    return path


def read_manifest(path: Path) -> CheckpointManifest:
    manifest_path = Path(path) / MANIFEST_NAME
    if not manifest_path.exists():
        raise CheckpointError(f"No checkpoint manifest at {manifest_path}")
    try:
        manifest = CheckpointManifest.model_validate_json(manifest_path.read_text())
    except ValidationError as exc:
        raise CheckpointError(f"Invalid checkpoint manifest {manifest_path}: {exc}")
    if manifest.format != CHECKPOINT_FORMAT or manifest.version != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"Unsupported checkpoint {manifest.format} v{manifest.version}, "
            f"expected {CHECKPOINT_FORMAT} v{CHECKPOINT_VERSION}"
        )
    return manifest


def load_checkpoint(
    path: Path,
    expected: ModelConfig | None = None,
    device: str | torch.device = "cpu",
) -> MultiEncoderAutoencoder:
    path = Path(path)
    manifest = read_manifest(path)

    if expected is not None and expected != manifest.config:
        saved = manifest.config.model_dump()
        wanted = expected.model_dump()
        differing = sorted(key for key in wanted if wanted[key] != saved.get(key))
        raise CheckpointError(f"Checkpoint config differs from the expected one in: {', '.join(differing)}")

    state = {}
    for entry in manifest.tensors:
        blob = path / entry.file
        if not blob.exists():
            raise CheckpointError(f"Missing tensor blob {blob}")
        array = np.fromfile(blob, dtype=entry.dtype)
        if array.size != int(np.prod(entry.shape, dtype=np.int64)):
            raise CheckpointError(f"{blob} holds {array.size} values, expected shape {entry.shape}")
        state[entry.name] = torch.from_numpy(array.reshape(entry.shape).astype(entry.dtype[1:]))

    float_dtypes = {tensor.dtype for tensor in state.values() if tensor.is_floating_point()}
    dtype = torch.float64 if torch.float64 in float_dtypes else torch.float32
    model = build(manifest.config, seed=manifest.seed, dtype=dtype, device=device)
    try:
        model.load_state_dict(state, strict=True)
    except RuntimeError as exc:
        raise CheckpointError(f"Checkpoint tensors do not match the model: {exc}")

    logger.debug(f"Checkpoint loaded from {path} (epoch {manifest.epoch})")
    return model
