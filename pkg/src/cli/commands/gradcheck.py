import argparse
from pathlib import Path

from src.cli.common import resolve_run_config, write_json
from src.cli.logger import logger
from src.services.gradcheck.gradcheck_service import gradcheck


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("gradcheck", parents=parents, help="Check loss gradients against finite differences")
    parser.add_argument("--config", type=Path, default=None, help="YAML run config (loss lambdas)")
    parser.add_argument("--tolerance", type=float, default=1e-4)
    parser.add_argument("--out", type=Path, default=None, help="Optional JSON report path")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = resolve_run_config(args)
    report = gradcheck(seed=config.seed, loss_cfg=config.train.loss, tolerance=args.tolerance)
    if args.out is not None:
        write_json(report, args.out)
    print(report.model_dump_json(indent=2))
    if not report.passed:
        logger.error("Gradient check failed")
        return 1
    return 0
