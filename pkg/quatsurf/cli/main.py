"""Command-line entry point.

Exit codes: 0 on success, 2 for invalid configuration or input, 3 for
numerical failures and I/O errors.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from ..errors import ConfigInvalid, NumericalError
from ..io.config import load_config
from .commands import COMMANDS

logger = logging.getLogger("quatsurf")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
THREADS_ENV = "QUATSURF_THREADS"


def resolve_threads(flag: Optional[int]) -> int:
    """--threads, else QUATSURF_THREADS, else the CPU count."""
    if flag is not None:
        if flag < 1:
            raise ConfigInvalid("--threads must be positive", ["threads"])
        return flag
    env = os.getenv(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise ConfigInvalid(f"{THREADS_ENV} must be an integer", [THREADS_ENV]) from exc
        if value < 1:
            raise ConfigInvalid(f"{THREADS_ENV} must be positive", [THREADS_ENV])
        return value
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quatsurf",
        description="Darboux transforms, dressing and spectral sweeps of CMC surfaces.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="What to run.")
    parser.add_argument("--config", type=Path, required=True, help="Run config (JSON or YAML).")
    parser.add_argument("--out", type=Path, default=Path("out"), help="Output directory.")
    parser.add_argument(
        "--threads", type=int, default=None, help=f"Worker threads (falls back to {THREADS_ENV})."
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        threads = resolve_threads(args.threads)
        config = load_config(args.config)
        written = COMMANDS[args.command](config, args.out, threads)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in written:
        print(path)
    logger.info("%s finished, %d files written", args.command, len(written))
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
