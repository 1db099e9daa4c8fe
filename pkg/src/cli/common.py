import argparse
from pathlib import Path

from pydantic import BaseModel

from src.management.run_config import RunConfig, parse_config


def common_arguments() -> argparse.ArgumentParser:
    """Flags every subcommand accepts."""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=None, help="Run seed (overrides the config file)")
    parent.add_argument("--threads", type=int, default=None, help="Cap on worker threads")
    parent.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    return parent


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    run = parse_config(getattr(args, "config", None))
    if args.seed is not None:
        run = run.with_seed(args.seed)
    return run


def write_json(model: BaseModel, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.model_dump_json(indent=2))
    return path
