import argparse
from pathlib import Path

from src.services.evaluation.weight_mass import export_weight_mass
from src.services.train.checkpoint import load_checkpoint


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("export-weights", parents=parents, help="Export decoder block-mass matrices")
    parser.add_argument("--ckpt", type=Path, required=True, help="Checkpoint directory")
    parser.add_argument("--out", type=Path, required=True, help="Output directory for CSV and PNG files")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    export_weight_mass(load_checkpoint(args.ckpt), args.out)
    return 0
