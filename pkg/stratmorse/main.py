import argparse
import logging
import sys
from typing import Optional, Sequence

from stratmorse.config import settings
from stratmorse.cwx import parse_cell_list, read_document
from stratmorse.errors import (
    InconclusiveError,
    InputError,
    InvalidPair,
    InvariantViolation,
    PreconditionError,
)
from stratmorse.services import MorseService, render


# Convert the configured level name ("info", "debug", ...) to a logging constant.
# Records go to stderr; stdout carries only the report.
log_level = getattr(logging, settings.log_level.upper(), logging.INFO)

logging.basicConfig(
    level=log_level,
    format="%(asctime)s [%(levelname)s] %(name)s - %(message)s",
    stream=sys.stderr,
)

logger = logging.getLogger("stratmorse")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stratmorse",
        description="Stratified discrete Morse theory on finite regular CW complexes",
    )
    parser.add_argument("--json-like", action="store_true", help="print the report as a nested key/value tree")
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("file", help="cwx document")
        # accepted after the subcommand too; SUPPRESS keeps a value given before it
        sub.add_argument("--json-like", action="store_true", default=argparse.SUPPRESS)
        return sub

    command("validate", "check the face poset of the complex")
    command("strata", "strata, frontier axiom and stratum order")
    command("halo", "halo and shadow of a cell").add_argument("--cell", required=True)
    command("classify", "pairing status of every cell within its stratum")

    check = command("check-morse", "validate a stratified discrete Morse function")
    check.add_argument("--budget", type=int, default=None, help="collapse search node budget")
    check.add_argument("--tiebreak", action="store_true", help="resolve tied values by cell id")

    sweep = command("sweep", "event log of the sublevelset sweep")
    sweep.add_argument("--budget", type=int, default=None, help="collapse search node budget")

    delta = command("delta", "cells gained between two thresholds")
    delta.add_argument("--lo", required=True)
    delta.add_argument("--hi", required=True)

    command("subdivide", "barycentric subdivision in cwx form")
    command("lowerlink", "lower link and its H/V split").add_argument("--cell", required=True)

    theorem_c = command("theorem-c", "tangential/normal splitting at a critical cell")
    theorem_c.add_argument("--cell", required=True)
    theorem_c.add_argument("--pushout-only", action="store_true",
                           help="only the cone-over-lower-link identity; works for any cell")

    command("conley", "Conley indices and the E1 page of the multivector field")
    command("homology", "integer homology, absolute or relative").add_argument(
        "--rel", default=None, help="file of cell ids whose closure is quotiented out",
    )
    return parser


def _read_rel(path: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as handle:
            return parse_cell_list(handle.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def run(args: argparse.Namespace):
    doc = read_document(args.file)
    if args.command == "validate":
        return MorseService.validate(doc)
    if args.command == "strata":
        return MorseService.strata(doc)
    if args.command == "halo":
        return MorseService.halo(doc, args.cell)
    if args.command == "classify":
        return MorseService.classify(doc)
    if args.command == "check-morse":
        return MorseService.check_morse(doc, budget=args.budget, tiebreak=args.tiebreak)
    if args.command == "sweep":
        return MorseService.sweep(doc, budget=args.budget)
    if args.command == "delta":
        return MorseService.delta(doc, args.lo, args.hi)
    if args.command == "subdivide":
        return MorseService.subdivide(doc)
    if args.command == "lowerlink":
        return MorseService.lowerlink(doc, args.cell)
    if args.command == "theorem-c":
        return MorseService.theorem_c(doc, args.cell, pushout_only=args.pushout_only)
    if args.command == "conley":
        return MorseService.conley(doc)
    if args.command == "homology":
        rel = _read_rel(args.rel) if args.rel else None
        return MorseService.homology(doc, rel)
    raise InputError(f"unknown command {args.command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and map its outcome to an exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if getattr(args, "budget", None) is not None and args.budget < 1:
        logger.error("--budget must be positive")
        return EXIT_INPUT

    try:
        report = run(args)
    except InputError as exc:
        logger.error("input error: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InconclusiveError as exc:
        logger.warning("inconclusive: %s", exc)
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (PreconditionError, InvariantViolation, InvalidPair) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except Exception as exc:  # noqa: BLE001
        logger.exception("Unexpected error in %s: %s", args.command, exc)
        return EXIT_FAILED

    sys.stdout.write(render(report, json_like=args.json_like))
    logger.info("%s finished with status %s", args.command, report.status)
    return report.exit_code
