import sys

from loguru import logger

from src.management.settings import get_settings

_sink_id: int | None = None


def _format(record) -> str:
    color = record["extra"].get("color", "white")
    return (
        "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
        "<b>{level:<8}</b> | "
        "<cyan>{name}:{function}:{line}</cyan> | "
        f"<{color}>{{extra[prefix]}}</{color}> <b>{{message}}</b>\n{{exception}}"
    )


def set_log_level(level: str) -> None:
    global _sink_id
    if _sink_id is not None:
        logger.remove(_sink_id)
    else:
        logger.remove()
    logger.configure(extra={"prefix": "", "color": "white"})
    _sink_id = logger.add(sys.stderr, level=level.upper(), format=_format, colorize=True)


def configure_logger(prefix: str, color: str):
    if _sink_id is None:
        set_log_level(get_settings().log_level)
    return logger.bind(prefix=prefix, color=color)
