"""
recforge command line.

Subcommands:
    build-piece   one finite piece (finite_piece / piece_in_difference_set)
    assemble      K rounds of the construction, optionally inside E − E
    verify        re-run every independent check on a certificate document
    kneser        exact χ(KG(n, r)) against n − 2r + 2

Exit codes: 0 ok, 1 invalid input, 2 resource limit or search failure,
3 I/O error, 4 unparseable document, 5 a check failed.
"""

import argparse
import logging
import sys
import time
from math import comb
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from recforge.assembly import RecurrenceCertificate, kriz_iterate, kriz_iterate_in_difference_set
from recforge.config import Caps, configure_logging
from recforge.errors import DocumentError, ParameterError, RecforgeError, ResourceLimitError, SearchFailure
from recforge.graphs import chromatic_number_exact, kneser_graph
from recforge.pieces import STRATEGIES, finite_piece, piece_in_difference_set
from recforge.rationals import require_open_half
from recforge.schema import build_document, read_document, serialize_certificate, write_document
from recforge.streams import parse_stream_spec
from recforge.verify import CheckResult, failed_names, verify_certificate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RESOURCE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_CHECK = 5


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; here 2 means a resource failure."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INVALID)


def _add_caps(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("limits (override RECFORGE_* environment variables)")
    group.add_argument("--max-d", dest="max_dimension", type=int, help="largest F2^d dimension to try")
    group.add_argument("--max-cells", dest="max_cells", type=int, help="cap on materialised cells")
    group.add_argument("--max-modulus", dest="max_modulus", type=int, help="cap on every witness modulus")
    group.add_argument("--budget", dest="node_budget", type=int, help="colouring solver node budget")
    group.add_argument("--horizon", dest="horizon", type=int, help="stream elements examined per search")
    group.add_argument("--seed", dest="seed", type=int, help="seed for random alpha candidates")


def _caps(args: argparse.Namespace) -> Caps:
    return Caps.from_env().with_overrides(
        max_dimension=args.max_dimension,
        max_cells=args.max_cells,
        max_modulus=args.max_modulus,
        node_budget=args.node_budget,
        horizon=args.horizon,
        seed=args.seed,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="recforge", description="Certified chromatically recurrent, nonrecurrent sets.")
    parser.add_argument("--log-level", default=None, help="overrides LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    piece = sub.add_parser("build-piece", help="build one finite piece")
    piece.add_argument("--k", type=int, required=True, help="chromatic level: Cay(S) needs more than k colours")
    piece.add_argument("--delta", required=True, help="density in (0, 1/2), e.g. 1/4")
    piece.add_argument("--strategy", choices=STRATEGIES, default="auto")
    piece.add_argument("--E", dest="stream", default=None, help="all | arith:a,d | powers:b | file:<path>")
    piece.add_argument("--modulus", type=int, default=1, help="build S with modulus*S inside E - E")
    piece.add_argument("-o", "--output", default=None, help="output path (stdout when omitted)")
    _add_caps(piece)

    assemble = sub.add_parser("assemble", help="run K rounds of the construction")
    assemble.add_argument("--delta", required=True)
    assemble.add_argument("--K", dest="K", type=int, required=True)
    assemble.add_argument("--E", dest="stream", default=None, help="all | arith:a,d | powers:b | file:<path>")
    assemble.add_argument("--strategy", choices=STRATEGIES, default="auto")
    assemble.add_argument("-o", "--output", default=None)
    _add_caps(assemble)

    verify = sub.add_parser("verify", help="re-check a certificate document")
    verify.add_argument("input", help="document path")
    strictness = verify.add_mutually_exclusive_group()
    strictness.add_argument("--strict", dest="strict", action="store_true", default=True)
    strictness.add_argument(
        "--lenient", dest="strict", action="store_false", help="accept lower-bound claims too large to brute force"
    )

    kneser = sub.add_parser("kneser", help="exact chromatic number of KG(n, r)")
    kneser.add_argument("--n", type=int)
    kneser.add_argument("--r", type=int)
    kneser.add_argument("--budget", type=int, default=None)
    kneser.add_argument("--sweep", type=int, default=None, metavar="V", help="every (n, r) with C(n, r) <= V")
    return parser


# --------------------------------------------------------------------------
# Helpers shared by the subcommands
# --------------------------------------------------------------------------


def _run_checks(body: Dict[str, Any], strict: bool = True) -> List[CheckResult]:
    return verify_certificate(body, strict)


def _check_rows(results: Sequence[CheckResult], elapsed: float) -> List[Dict[str, Any]]:
    """elapsed is the wall time of the verification pass, shared by its checks."""
    return [
        {"name": r.name, "passed": r.passed, "detail": r.detail, "elapsed": round(elapsed, 6)} for r in results
    ]


def _timed_checks(body: Dict[str, Any], strict: bool = True) -> List[Dict[str, Any]]:
    start = time.perf_counter()
    results = _run_checks(body, strict)
    return _check_rows(results, time.perf_counter() - start)


def _report_failure(failure: SearchFailure) -> None:
    logger.error(f"Stage '{failure.stage}' failed: {failure.describe()}")
    print(f"FAILED stage={failure.stage} reason={failure.reason}", file=sys.stderr)


def _emit(certificate: RecurrenceCertificate, command: str, args: Dict[str, Any], output: Optional[str]) -> int:
    body = serialize_certificate(certificate)
    checks = _timed_checks(body)
    write_document(build_document(certificate, command, args, checks), output)
    failed = [row["name"] for row in checks if not row["passed"]]
    if failed:
        logger.error(f"Freshly built certificate failed: {', '.join(failed)}")
        return EXIT_CHECK
    if not certificate.complete:
        _report_failure(certificate.failure)
        return EXIT_RESOURCE
    return EXIT_OK


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_build_piece(args: argparse.Namespace) -> int:
    delta = require_open_half(args.delta)
    caps = _caps(args)
    if args.stream is None:
        if args.modulus != 1:
            raise ParameterError("--modulus needs --E")
        outcome = finite_piece(args.k, delta, caps, args.strategy)
    else:
        stream = parse_stream_spec(args.stream)
        outcome = piece_in_difference_set(args.k, args.modulus, delta, stream, caps, args.strategy)
    if isinstance(outcome, SearchFailure):
        _report_failure(outcome)
        return EXIT_RESOURCE
    logger.info(f"Piece via {outcome.route}: |S|={len(outcome.S)} m={outcome.witness.m}")
    record = {"k": args.k, "delta": args.delta, "strategy": args.strategy, "E": args.stream, "modulus": args.modulus}
    return _emit(outcome.certificate, "build-piece", record, args.output)


def cmd_assemble(args: argparse.Namespace) -> int:
    delta = require_open_half(args.delta)
    caps = _caps(args)
    if args.stream is None:
        certificate = kriz_iterate(delta, args.K, caps, args.strategy)
    else:
        certificate = kriz_iterate_in_difference_set(delta, args.K, parse_stream_spec(args.stream), caps, args.strategy)
    record = {"K": args.K, "delta": args.delta, "strategy": args.strategy, "E": args.stream}
    return _emit(certificate, "assemble", record, args.output)


def cmd_verify(args: argparse.Namespace) -> int:
    document = read_document(args.input)
    results = _run_checks(document.certificate, args.strict)
    table = pd.DataFrame([{"check": r.name, "passed": r.passed, "detail": r.detail} for r in results])
    print(table.to_string(index=False))
    failed = failed_names(results)
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK
    print(f"OK: {len(results)} checks passed")
    return EXIT_OK


def kneser_row(n: int, r: int, budget: Optional[int], max_cells: Optional[int] = None) -> Dict[str, Any]:
    """One line of the Lovász table."""
    graph = kneser_graph(n, r, max_cells)
    formula = n - 2 * r + 2 if 2 * r <= n else None
    row: Dict[str, Any] = {"n": n, "r": r, "vertices": graph.vertex_count, "edges": graph.edge_count}
    if graph.edge_count == 0:
        return dict(row, chi=1, lower=1, upper=1, formula=formula, status="NO-EDGES")
    result = chromatic_number_exact(graph, budget)
    status = "INEXACT" if not result.exact else ("MATCH" if result.chi == formula else "MISMATCH")
    return dict(row, chi=result.chi, lower=result.lower, upper=result.upper, formula=formula, status=status)


def _sweep(bound: int, budget: Optional[int], max_cells: int) -> int:
    rows = [
        kneser_row(n, r, budget, max_cells)
        for n in range(2, bound + 1)
        for r in range(1, n // 2 + 1)
        if comb(n, r) <= bound
    ]
    if not rows:
        print("no (n, r) in range")
        return EXIT_OK
    table = pd.DataFrame(rows)
    print(table.to_string(index=False))
    if (table["status"] == "MISMATCH").any():
        return EXIT_CHECK
    if (table["status"] == "INEXACT").any():
        return EXIT_RESOURCE
    return EXIT_OK


def cmd_kneser(args: argparse.Namespace) -> int:
    caps = Caps.from_env()
    budget = caps.node_budget if args.budget is None else args.budget
    if args.sweep is not None:
        return _sweep(args.sweep, budget, caps.max_cells)
    if args.n is None or args.r is None:
        raise ParameterError("kneser needs --n and --r, or --sweep V")
    row = kneser_row(args.n, args.r, budget, caps.max_cells)
    if row["status"] == "NO-EDGES":
        print("chi=1 no-edges")
        return EXIT_OK
    if row["status"] == "INEXACT":
        print(f"chi in [{row['lower']}, {row['upper']}] formula={row['formula']} INEXACT")
        return EXIT_RESOURCE
    print(f"chi={row['chi']} formula={row['formula']} {row['status']}")
    return EXIT_OK if row["status"] == "MATCH" else EXIT_CHECK


COMMANDS = {
    "build-piece": cmd_build_piece,
    "assemble": cmd_assemble,
    "verify": cmd_verify,
    "kneser": cmd_kneser,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one subcommand and map errors to exit codes."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except DocumentError as e:
        logger.error(f"Cannot parse document: {e}")
        return EXIT_PARSE
    except ResourceLimitError as e:
        logger.error(f"Resource limit: {e}")
        print(f"FAILED stage={e.stage} parameter={e.parameter} limit={e.limit}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INVALID
    except RecforgeError as e:
        logger.error(f"Construction failed: {e}")
        print(f"FAILED stage={args.command} reason={e}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
