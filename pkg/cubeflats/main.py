import argparse
import logging
import sys
from typing import Optional, Sequence

from cubeflats.api.commands import cmd_analyze, cmd_check, cmd_classify, cmd_develop, cmd_generate
from cubeflats.config import get_settings
from cubeflats.middleware.error_handler import run_with_error_handlers

settings = get_settings()

# Structured logging on stderr; stdout carries only JSON or DOT
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format='%(asctime)s [%(levelname)s] %(name)s: %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)
logger = logging.getLogger(__name__)


def _add_output_flags(parser: argparse.ArgumentParser, dot: bool = True) -> None:
    if dot:
        parser.add_argument("--format", choices=("json", "dot"), default="json", help="Output format")
    parser.add_argument("--output", "-o", default=None, help="Write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=settings.APP_NAME, description=settings.APP_DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    check = subparsers.add_parser("check", help="Gromov link condition on a cube complex")
    check.add_argument("input", help="Complex JSON file, '-' for stdin")
    check.add_argument("--vertex", default=None, help="Emit the link of this vertex instead")
    _add_output_flags(check)
    check.set_defaults(handler=cmd_check)

    analyze = subparsers.add_parser("analyze", help="Normal form and cubicality of a rational isometry")
    analyze.add_argument("input", help="Isometry JSON file, '-' for stdin")
    _add_output_flags(analyze, dot=False)
    analyze.set_defaults(handler=cmd_analyze)

    develop = subparsers.add_parser("develop", help="Develop a local flat along an isometry trace")
    develop.add_argument("input", help="Complex JSON file, '-' for stdin")
    develop.add_argument("--seed", required=True, help="Top-dimensional cell the development starts from")
    develop.add_argument("--isometry", required=True, help="Isometry JSON file")
    develop.add_argument("--origin", default=None, help="Lowest corner of the seed chart, e.g. '0,0'")
    develop.add_argument("--radius", type=int, default=None, help="Facet crossings from the seed")
    _add_output_flags(develop)
    develop.set_defaults(handler=cmd_develop)

    classify = subparsers.add_parser("classify", help="Cone orders and universal cover of a square surface")
    classify.add_argument("input", help="Surface JSON file, '-' for stdin")
    _add_output_flags(classify, dot=False)
    classify.set_defaults(handler=cmd_classify)

    generate = subparsers.add_parser("generate", help="Construct cone planes, tori, covers and grids")
    generate.add_argument("kind", choices=("cone", "torus", "doubles", "cover", "grid"))
    generate.add_argument("--n", type=int, default=None, help="Cone order (quarter planes around the apex)")
    generate.add_argument("--radius", type=int, default=None, help="Cone patch radius in squares")
    generate.add_argument("--limit", type=int, default=None, help="Coordinate bound for Pythagorean doubles")
    generate.add_argument("--a", default=None, help="First lattice vector, e.g. '1,8'")
    generate.add_argument("--b", default=None, help="Second lattice vector, e.g. '7,4'")
    generate.add_argument("--sigma-a", dest="sigma_a", default=None, help="Sheet permutation across lattice lines parallel to b")
    generate.add_argument("--sigma-b", dest="sigma_b", default=None, help="Sheet permutation across lattice lines parallel to a")
    generate.add_argument("--degree", type=int, default=None, help="Number of sheets (inferred when omitted)")
    generate.add_argument("--lift", default=None, help="Report whether the automorphism 'WA,WB' lifts to the cover")
    generate.add_argument("--shape", default=None, help="Grid shape, e.g. '11,11'")
    _add_output_flags(generate)
    generate.set_defaults(handler=cmd_generate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.debug(f"Running {settings.APP_NAME} v{settings.APP_VERSION}: {args.command}")
    return run_with_error_handlers(args.handler, args)


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
