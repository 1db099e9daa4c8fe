import sys

import torch

from src.cli.router import build_parser
from src.management.exceptions import UnmixError
from src.management.logger import configure_logger, set_log_level
from src.management.settings import get_settings

logger = configure_logger("MAIN", "cyan")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()

    set_log_level(args.log_level or settings.log_level)
    args.threads = args.threads or settings.threads
    torch.set_num_threads(args.threads)

    try:
        return args.handler(args)
    except UnmixError as exc:
        logger.error(f"{type(exc).__name__}: {exc.detail}")
        return exc.exit_code
    except Exception as exc:
        logger.opt(exception=exc).error(f"Unexpected failure in '{args.command}': {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
