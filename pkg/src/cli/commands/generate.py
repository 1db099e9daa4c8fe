import argparse
from pathlib import Path

from pydantic import ValidationError

from src.cli.common import resolve_run_config
from src.cli.logger import logger
from src.management.exceptions import ConfigError
from src.services.datagen.dataset_service import get_dataset_store
from src.services.datagen.schemas import MixingConfig


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("generate", parents=parents, help="Generate the triangles & circles dataset")
    parser.add_argument("--n", type=int, default=None, help="Number of triangle/circle pairs")
    parser.add_argument("--size", type=int, default=None, help="Final image side in pixels")
    parser.add_argument("--alpha", type=float, default=None, help="Sigmoid sharpness of the mixing system")
    parser.add_argument("--split", type=float, default=None, help="Training fraction")
    parser.add_argument("--config", type=Path, default=None, help="YAML run config")
    parser.add_argument("--out", type=Path, default=None, help="Output directory (default: dataset cache)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = resolve_run_config(args)
    mixing = config.mixing
    if args.alpha is not None:
        try:
            mixing = MixingConfig.model_validate({**mixing.model_dump(), "alpha": args.alpha})
        except ValidationError as exc:
            raise ConfigError(f"Invalid --alpha: {exc}")

    n_pairs = args.n if args.n is not None else config.data.n_pairs
    image_size = args.size if args.size is not None else config.data.image_size
    split_fraction = args.split if args.split is not None else config.data.split_fraction
    out_dir = args.out or config.paths.data_dir

    split, location = get_dataset_store().resolve(
        n_pairs=n_pairs,
        image_size=image_size,
        cfg=mixing,
        split_fraction=split_fraction,
        out_dir=out_dir,
        threads=args.threads,
    )
    logger.info(f"Dataset at {location}: {len(split.train)} train / {len(split.test)} test")
    return 0
