import argparse
from pathlib import Path

import numpy as np
import torch

from src.cli.logger import logger
from src.management.exceptions import DataError
from src.services.datagen.dataset_service import get_dataset_store
from src.services.infer.schemas import SourceEstimate
from src.services.infer.separation_service import crop, mask_and_decode, save_estimates
from src.services.train.checkpoint import load_checkpoint


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("separate", parents=parents, help="Extract source estimates by encoding masking")
    parser.add_argument("--ckpt", type=Path, required=True, help="Checkpoint directory")
    parser.add_argument("--data", type=Path, required=True, help="Dataset directory")
    parser.add_argument("--encoder", default="all", help="Encoder index or 'all'")
    parser.add_argument("--crop", type=int, default=0, help="Margin removed from every spatial edge")
    parser.add_argument("--split", choices=("train", "test"), default="test")
    parser.add_argument("--batch-size", type=int, default=256)
    parser.add_argument("--png", type=int, default=0, help="Render the first K samples as PNG")
    parser.add_argument("--out", type=Path, required=True, help="Output directory")
    parser.set_defaults(handler=run)


def _encoder_indices(choice: str, num_encoders: int) -> list[int]:
    if choice == "all":
        return list(range(num_encoders))
    try:
        return [int(choice)]
    except ValueError:
        raise DataError(f"--encoder must be an integer or 'all', got '{choice}'")


def run(args: argparse.Namespace) -> int:
    model = load_checkpoint(args.ckpt)
    model.eval()
    data = get_dataset_store().load(args.data)
    subset = data.train if args.split == "train" else data.test
    if len(subset) == 0:
        raise DataError(f"The {args.split} split is empty")

    reference = next(model.parameters())
    indices = _encoder_indices(args.encoder, model.num_encoders)
    chunks: dict[int, list[torch.Tensor]] = {index: [] for index in indices}

    for start in range(0, len(subset), args.batch_size):
        x = torch.from_numpy(np.ascontiguousarray(subset.mixtures[start:start + args.batch_size])).unsqueeze(1)
        x = x.to(dtype=reference.dtype, device=reference.device)
        for index in indices:
            est = crop(mask_and_decode(model, x, index), args.crop)
            chunks[index].append(est.estimate.cpu())

    estimates = [
        SourceEstimate(encoder_index=index, estimate=torch.cat(parts), crop_margin=args.crop)
        for index, parts in chunks.items()
    ]
    save_estimates(
        estimates,
        args.out,
        checkpoint=str(args.ckpt),
        data_dir=str(args.data),
        split=args.split,
        png_count=args.png,
    )
    logger.info(f"Separated {len(subset)} {args.split} samples with encoder(s) {indices}")
    return 0
