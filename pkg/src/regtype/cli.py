"""Command line front end: ``regtype PROGRAM [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .analyzer import DEFAULT_MAX_ITERATIONS, AnalysisError, analyze
from .bench import bench, format_report, report_json
from .output import dumps, format_result, result_to_json
from .parser import ParseError, read_program
from .program import parse_key
from .structural import DEFAULT_WIDEN_BOUND
from .widenings import WideningKind

EXIT_OK, EXIT_ANALYSIS, EXIT_PARSE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="regtype",
        description="Infer regular types for the predicates of a pure logic program.",
    )
    p.add_argument("program", nargs="?", help="program file to analyze")
    p.add_argument(
        "--widening",
        default=WideningKind.STRUCT.value,
        choices=[k.value for k in WideningKind],
        help="widening operator (default: %(default)s)",
    )
    p.add_argument("--depth-k", type=int, default=2, metavar="N", help="bound for the depthk widening")
    p.add_argument(
        "--widen-bound",
        type=int,
        default=DEFAULT_WIDEN_BOUND,
        metavar="N",
        help="widenings per type before falling back to shortening",
    )
    p.add_argument(
        "--entry",
        action="append",
        metavar="NAME/ARITY",
        help="entry predicate, called with all arguments any (repeatable; "
        "default: predicates not called by others)",
    )
    p.add_argument("--simplify", action="store_true", help="identify equivalent types in the output")
    p.add_argument("--bench", metavar="DIR", help="run every widening over the programs in DIR")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument(
        "--permissive",
        action="store_true",
        help="treat calls to unknown predicates as true, with a warning",
    )
    p.add_argument("--max-iterations", type=int, default=DEFAULT_MAX_ITERATIONS, help=argparse.SUPPRESS)
    return p


def _positive(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.depth_k < 1:
        parser.error("--depth-k must be at least 1")
    if args.widen_bound < 0:
        parser.error("--widen-bound must not be negative")


def run_bench(args: argparse.Namespace) -> int:
    directory = Path(args.bench)
    if not directory.is_dir():
        print(f"regtype: {directory}: not a directory", file=sys.stderr)
        return EXIT_PARSE
    report = bench(
        directory,
        depth_k=args.depth_k,
        bound=args.widen_bound,
        permissive=args.permissive,
        max_iterations=args.max_iterations,
    )
    sys.stdout.write(report_json(report) if args.format == "json" else format_report(report))
    return EXIT_OK


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _positive(parser, args)
    # warnings are reported from the result below, not through logging
    logging.basicConfig(level=logging.ERROR, format="regtype: %(message)s")
    if args.bench:
        return run_bench(args)
    if args.program is None:
        parser.error("a program file is required (or --bench DIR)")

    try:
        source = read_program(args.program)
    except ParseError as exc:
        print(f"regtype: {exc}", file=sys.stderr)
        return EXIT_PARSE
    for diag in source.diagnostics:
        print(f"{args.program}:{diag}", file=sys.stderr)

    try:
        entries = [parse_key(e) for e in args.entry] if args.entry else None
    except ValueError as exc:
        parser.error(str(exc))
    try:
        result = analyze(
            source.program,
            entries,
            WideningKind(args.widening),
            args.widen_bound,
            depth_k=args.depth_k,
            permissive=args.permissive,
            max_iterations=args.max_iterations,
        )
    except AnalysisError as exc:
        print(f"regtype: analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    for message in result.warnings:
        print(f"regtype: warning: {message}; treated as true", file=sys.stderr)

    if args.format == "json":
        doc = result_to_json(result, Path(args.program).name, args.simplify)
        sys.stdout.write(dumps(doc))
    else:
        sys.stdout.write(format_result(result, args.simplify))
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
