"""
Rainbow Triangle Toolkit - Command Line
=======================================
Entry point dispatching the toolkit commands: templates and constructions,
density regions, numerical certificates, searches and hard-case
normalization. Reports go to stdout, logs to stderr.
"""

import argparse
import logging
import sys
from typing import List, Optional

from src.config.settings import RainbowConfig
from src.core.exceptions import ConfigurationError
from src.handlers.command_handler import COMMANDS
from src.models.command import CommandResult
from src.utils.error_handling import EXIT_USAGE

logger = logging.getLogger(__name__)

# ============================================================================
# ARGUMENT PARSING
# ============================================================================

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--log-level', default=None, help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument('--workers', type=int, default=None, help="worker threads for parallel sections")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog='rainbow', description="Gallai colouring templates and rainbow triangles")
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('construct', parents=[common], help="write an F or H construction")
    p.add_argument('--kind', choices=['F', 'H'], required=True)
    p.add_argument('--a', type=int, required=True)
    p.add_argument('--b', type=int, required=True)
    p.add_argument('--c', type=int, required=True)
    p.add_argument('--out', required=True)

    p = commands.add_parser('check', parents=[common], help="report on a template file")
    p.add_argument('file')
    p.add_argument('--all', action='store_true', help="list every rainbow triangle")

    p = commands.add_parser('blowup', parents=[common], help="blow up every vertex into k copies")
    p.add_argument('file')
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--out', required=True)

    p = commands.add_parser('classify', parents=[common], help="region of a density pair")
    p.add_argument('--a1', type=float, required=True)
    p.add_argument('--a2', type=float, required=True)

    p = commands.add_parser('boundary', parents=[common], help="region grid as CSV")
    p.add_argument('--resolution', type=int, required=True)
    p.add_argument('--out', required=True)

    p = commands.add_parser('witness', parents=[common], help="non-forcing witness for a density triple")
    p.add_argument('--a1', type=float, required=True)
    p.add_argument('--a2', type=float, required=True)
    p.add_argument('--a3', type=float, required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--out')

    p = commands.add_parser('extremal', parents=[common], help="template with a large class-size product")
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--out')

    p = commands.add_parser('verify-appendix', parents=[common], help="certify k >= 0 on [0, 1]")
    p.add_argument('--grid', type=int, default=None)

    p = commands.add_parser('lemma28', parents=[common], help="partition-profile search for a good pair")
    p.add_argument('--a1', type=float, required=True)
    p.add_argument('--a2', type=float, required=True)
    p.add_argument('--step', type=float, default=0.01)
    p.add_argument('--sum-bound', type=float, default=1.0)

    p = commands.add_parser('search', parents=[common], help="exhaustive or local search")
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--objective', choices=['sum', 'min', 'geomean'], required=True)
    p.add_argument('--exhaustive', action='store_true')
    p.add_argument('--budget', type=int, default=None)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--init')
    p.add_argument('--out')

    p = commands.add_parser('normalize', parents=[common], help="hard-case normalization")
    p.add_argument('file')
    p.add_argument('--c', type=float, default=None)
    p.add_argument('--out')
    p.add_argument('--trace')

    return parser


def configure_logging(config: RainbowConfig) -> None:
    logging.basicConfig(level=config.log_level, format=config.log_format, stream=sys.stderr, force=True)


# ============================================================================
# ENTRY POINTS
# ============================================================================

def run(argv: Optional[List[str]] = None) -> CommandResult:
    """Parse `argv` and run one command."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else EXIT_USAGE
        return CommandResult(exit_code=code)

    try:
        config = RainbowConfig.from_env().with_overrides(
            log_level=args.log_level.upper() if args.log_level else None,
            workers=args.workers,
        )
    except ConfigurationError as e:
        return CommandResult(exit_code=EXIT_USAGE, report=f"error: {e}")

    configure_logging(config)
    logger.debug(f"Running '{args.command}' with {config.to_dict()}")
    return COMMANDS[args.command](args, config)


def main() -> int:
    result = run()
    if result.report:
        stream = sys.stdout if result.ok else sys.stderr
        print(result.report, file=stream)
    return result.exit_code


if __name__ == '__main__':
    sys.exit(main())
