import argparse
from pathlib import Path

from src.cli.common import resolve_run_config, write_json
from src.cli.logger import logger
from src.management.exceptions import ConfigError
from src.services.datagen.dataset_service import get_dataset_store
from src.services.model.autoencoder import build
from src.services.train.checkpoint import load_checkpoint, read_manifest
from src.services.train.trainer import fit


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("train", parents=parents, help="Train a multi-encoder autoencoder")
    parser.add_argument("--data", type=Path, default=None, help="Dataset directory")
    parser.add_argument("--config", type=Path, default=None, help="YAML run config")
    parser.add_argument("--out", type=Path, default=None, help="Output directory for checkpoints and history")
    parser.add_argument("--resume", type=Path, default=None, help="Checkpoint directory to continue from")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = resolve_run_config(args)
    data_dir = args.data or config.paths.data_dir
    out_dir = args.out or config.paths.out_dir
    if data_dir is None or out_dir is None:
        raise ConfigError("train needs --data and --out (or paths.data_dir / paths.out_dir in the config)")

    data = get_dataset_store().load(data_dir)

    start_epoch = 0
    if args.resume is not None:
        model = load_checkpoint(args.resume, expected=config.model)
        start_epoch = read_manifest(args.resume).epoch + 1
        logger.info(f"Resuming from {args.resume} at epoch {start_epoch}")
    else:
        model = build(config.model, seed=config.train.seed)

    write_json(config, Path(out_dir) / "run_config.json")
    report = fit(model, data, config.train, out_dir=out_dir, start_epoch=start_epoch)
    write_json(report, Path(out_dir) / "report.json")
    logger.info(f"Training finished; best epoch {report.best_epoch}, checkpoint {report.best_checkpoint}")
    return 0
