from src.management.logger import configure_logger

logger = configure_logger("CLI", "magenta")
