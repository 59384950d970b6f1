"""
Command-line entry point.

Environment (a .env file in the working directory is loaded first):
    LOG_LEVEL        logging level, default INFO
    ISOPERIM_WORKERS default worker count; never changes numerical output
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from common.exceptions import ConfigurationError
from cli.commands import EXIT_INVALID_CONFIG, command_for
from cli.config import MAX_SEED, load_config, with_seed

logger = logging.getLogger(__name__)


def _seed(text: str) -> int:
    try:
        seed = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from exc
    if not 0 <= seed <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return seed


def _workers(text: str) -> int:
    try:
        workers = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"workers must be an integer, got {text!r}") from exc
    if workers < 1:
        raise argparse.ArgumentTypeError("workers must be at least 1")
    return workers


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m cli",
        description="Exit-time survival, moments and inequality checks for iterated Brownian motions.",
    )
    parser.add_argument("--config", required=True, type=Path, help="Experiment configuration (JSON)")
    parser.add_argument("--seed", type=_seed, help="Override master_seed")
    parser.add_argument("--out", type=Path, help="Output CSV path (overrides config.out)")
    parser.add_argument("--workers", type=_workers, help="Worker threads (default ISOPERIM_WORKERS or 1)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    logging.basicConfig(
        level=os.getenv("LOG_LEVEL", "INFO"),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID_CONFIG if exc.code else 0

    try:
        config = with_seed(load_config(args.config), args.seed)
    except ConfigurationError as exc:
        where = f" at {exc.location}" if exc.location else ""
        print(f"error{where}: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG

    out_path = args.out or Path(config.out or f"{config.command.value}.csv")
    return command_for(config, args.workers).handle(config, out_path)
