import argparse

from src.cli.commands import evaluate, export_weights, generate, gradcheck, separate, train
from src.cli.common import common_arguments

COMMANDS = (generate, train, separate, evaluate, export_weights, gradcheck)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unmix-ae",
        description="Blind source separation with multi-encoder autoencoders",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [common_arguments()]
    for command in COMMANDS:
        command.register(subparsers, parents)
    return parser
