"""Command-line entry point: ``mwmw verify|sweep|entropy|geometry|ffunction``.

Exit codes: 0 every check passed, 1 a check failed, 2 configuration error,
3 a resource limit cut the run short.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from mwmw.cli.commands import (
    EXIT_CONFIG,
    EXIT_RESOURCE,
    cmd_entropy,
    cmd_ffunction,
    cmd_geometry,
    cmd_sweep,
    cmd_verify,
)
from mwmw.cli.utils import RED, RESET, YELLOW, load_config, resolve_threads, setup_file_logging
from mwmw.configs.settings import app_config
from mwmw.errors import ConfigError, PreconditionError, ResourceLimitError, SupportError, VolumeTooSmallError


COMMANDS = {
    "verify": "Check the lattice, charge and interaction assumptions",
    "sweep": "Compute D_m norms and the closed-form bound over a range of m",
    "entropy": "Run the seeded finite-volume identity suites",
    "geometry": "Certify the growth condition and estimate gamma",
    "ffunction": "Measure F-function constants over growing truncations",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mwmw", description="Multipole Mermin-Wagner verification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="Config JSON path or preset name")
        p.add_argument("--out", type=Path, default=None, help="Output directory (overrides output.dir)")
        p.add_argument("--format", choices=["csv", "json"], default=None, help="Table format (overrides output.format)")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            dest="overrides",
            metavar="KEY=VALUE",
            help="Override a config value by dotted path; repeatable",
        )
        p.add_argument("--threads", type=int, default=None, help="Worker threads (default: MWMW_THREADS)")
        p.add_argument("--no-progress", action="store_true", help="Disable progress bars")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run the selected command and return its exit code."""
    args = build_parser().parse_args(argv)
    setup_file_logging(app_config.LOG_FILE, app_config.LOG_LEVEL)
    overrides = list(args.overrides)
    if args.out is not None:
        overrides.append(f"output.dir={json.dumps(str(args.out))}")
    if args.format is not None:
        overrides.append(f"output.format={args.format}")
    progress = not args.no_progress
    try:
        config = load_config(args.config, overrides)
        if args.command == "verify":
            return cmd_verify(config, progress=progress)
        if args.command == "sweep":
            return cmd_sweep(config, threads=resolve_threads(args.threads), progress=progress)
        if args.command == "entropy":
            return cmd_entropy(config, progress=progress)
        if args.command == "geometry":
            return cmd_geometry(config, progress=progress)
        return cmd_ffunction(config, progress=progress)
    except (ConfigError, PreconditionError, SupportError, VolumeTooSmallError) as exc:
        logging.error("%s: configuration error: %s", args.command, exc)
        print(f"{RED}Configuration error:{RESET} {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceLimitError, OverflowError, MemoryError) as exc:
        logging.error("%s: resource limit: %s", args.command, exc)
        print(f"{YELLOW}Resource limit:{RESET} {exc}", file=sys.stderr)
        return EXIT_RESOURCE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
