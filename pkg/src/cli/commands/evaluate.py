import argparse
from pathlib import Path

from src.cli.common import write_json
from src.cli.logger import logger
from src.services.datagen.dataset_service import get_dataset_store
from src.services.evaluation.report import evaluate
from src.services.train.checkpoint import load_checkpoint


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("evaluate", parents=parents, help="Score a checkpoint on the held-out split")
    parser.add_argument("--ckpt", type=Path, required=True, help="Checkpoint directory")
    parser.add_argument("--data", type=Path, required=True, help="Dataset directory")
    parser.add_argument("--batch-size", type=int, default=256)
    parser.add_argument("--out", type=Path, default=Path("report.json"), help="JSON report path")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    model = load_checkpoint(args.ckpt)
    data = get_dataset_store().load(args.data)
    report = evaluate(model, data, batch_size=args.batch_size)
    logger.info(f"Report written to {write_json(report, args.out)}")
    return 0
