import argparse
import json
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Tuple

import pandas as pd

from app.components.report import Report, checks_frame, render_checks_json, render_checks_text
from app.config import APP_NAME, CONFIG, EXE_NAME, VERSION
from app.services.algebra import Algebra, Element
from app.services.builders import resolve_builtin
from app.services.data_manager import DataManager
from app.services.diagrams import run_spider
from app.services.errors import (
    BadGroupTable,
    BadUnit,
    Degenerate,
    FieldMismatch,
    NotAssociative,
    NotInvertible,
    ParseError,
    ShapeMismatch,
    UnknownBuiltin,
    WidthExceeded,
    WorkbenchError,
)
from app.services.expressions import parse_element
from app.services.frobenius import FrobeniusStructure, make_frobenius, twist
from app.services.linalg import Tensor
from app.services.scalars import format_scalar, parse_scalar
from app.services.suites import SUITES, run_suites
from app.utils.system_utils import configure_logging

logger = logging.getLogger(__name__)

_USAGE_ERRORS = (ParseError, UnknownBuiltin, NotAssociative, BadUnit, BadGroupTable, ShapeMismatch, FieldMismatch, WidthExceeded)
_DEGENERATE_ERRORS = (Degenerate, NotInvertible)


class UsageError(Exception):
    """Bad command-line input detected after argparse accepted it."""


class MainCLI:
    """Command-line front end of the Frobenius Workbench.

    Parses arguments, builds or loads the requested structure, dispatches to
    the services and maps failures onto exit codes:
    0 success, 1 failed check, 2 usage or parse error, 3 degenerate input.

    Attributes:
        stdout: Stream that reports are written to.
        stderr: Stream for error messages.
        data_manager: Loads algebra files and writes exports.
        parser: The argparse parser with one subcommand per operation.
    """

    def __init__(self, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> None:
        self.stdout: TextIO = stdout or sys.stdout
        self.stderr: TextIO = stderr or sys.stderr
        self.data_manager: DataManager = DataManager()
        self.parser: argparse.ArgumentParser = self._build_parser()
        self.commands: Dict[str, Callable[[argparse.Namespace], int]] = {
            "analyze": self.cmd_analyze,
            "twist": self.cmd_analyze,
            "series": self.cmd_series,
            "spider": self.cmd_spider,
            "builtin": self.cmd_builtin,
            "verify": self.cmd_verify,
        }

    # Parser ===========================================================================

    def _build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level")
        common.add_argument("--format", choices=CONFIG.REPORT_FORMATS, default="text", help="output format")
        common.add_argument("--output", "-o", help="write the result to a file instead of stdout")

        source = argparse.ArgumentParser(add_help=False)
        group = source.add_mutually_exclusive_group()
        group.add_argument("--input", "-i", help="JSON algebra file carrying a form")
        group.add_argument("--builtin", "-b", help="named example structure (see `builtin --list`)")

        parser = argparse.ArgumentParser(prog=EXE_NAME, description=f"{APP_NAME} v{VERSION}: exact Frobenius algebra workbench")
        parser.add_argument("--version", action="version", version=f"{APP_NAME} {VERSION}")
        sub = parser.add_subparsers(dest="command", required=True)

        analyze = sub.add_parser("analyze", parents=[common, source], help="classify a structure and compute its F-dimensions")
        analyze.add_argument("--twist", "-t", help="twisting element: label, coefficient vector or expression")
        analyze.add_argument("--terms", "-j", type=int, default=CONFIG.DEFAULT_TERMS, help="number of F-dimensions to list")

        tw = sub.add_parser("twist", parents=[common, source], help="analyze after twisting (twist is required)")
        tw.add_argument("--twist", "-t", required=True)
        tw.add_argument("--terms", "-j", type=int, default=CONFIG.DEFAULT_TERMS)

        series = sub.add_parser("series", parents=[common, source], help="print the rational F-Hilbert series only")
        series.add_argument("--twist", "-t")

        spider = sub.add_parser("spider", parents=[common, source], help="fuzz the planar spider theorem")
        spider.add_argument("--twist", "-t")
        spider.add_argument("--seed", type=int, default=CONFIG.SPIDER_SEED)
        spider.add_argument("--count", type=int, default=CONFIG.SPIDER_COUNT)
        spider.add_argument("--max-gens", type=int, default=CONFIG.SPIDER_MAX_GENERATORS)
        spider.add_argument("--max-width", type=int, default=None)

        builtin = sub.add_parser("builtin", parents=[common], help="list the builtin structures")
        builtin.add_argument("--list", action="store_true", default=True)

        verify = sub.add_parser("verify", parents=[common], help="run acceptance suites")
        verify.add_argument("--suite", "-s", choices=list(SUITES) + ["all"], default="all")
        verify.add_argument("--builtin", "-b", help="restrict lemma/spider/hilbert to one builtin")
        verify.add_argument("--seed", type=int, default=CONFIG.SPIDER_SEED)
        return parser

    # Entry point ======================================================================

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return CONFIG.EXIT_USAGE if e.code else CONFIG.EXIT_OK
        try:
            CONFIG.validate()
        except ValueError as e:
            return self._fail(str(e), CONFIG.EXIT_USAGE)
        configure_logging(args.verbose)
        try:
            return self.commands[args.command](args)
        except UsageError as e:
            return self._fail(str(e), CONFIG.EXIT_USAGE)
        except _DEGENERATE_ERRORS as e:
            return self._fail(str(e), CONFIG.EXIT_DEGENERATE)
        except _USAGE_ERRORS as e:
            return self._fail(str(e), CONFIG.EXIT_USAGE)
        except WorkbenchError as e:
            logger.debug("check failed", exc_info=True)
            return self._fail(str(e), CONFIG.EXIT_CHECK_FAILED)

    def _fail(self, message: str, code: int) -> int:
        print(f"Error: {message}", file=self.stderr)
        return code

    def _emit(self, args: argparse.Namespace, text: str, frames_factory: Callable[[], dict]) -> None:
        if args.output:
            target = self.data_manager.export(
                args.output, args.format, text, frames_factory() if args.format == "xlsx" else {}
            )
            logger.info("result written to %s", target)
        elif args.format == "xlsx":
            raise UsageError("--format xlsx needs --output")
        else:
            print(text, file=self.stdout)

    # Structure resolution =============================================================

    def load_structure(self, args: argparse.Namespace) -> Tuple[str, FrobeniusStructure, Dict[str, Element]]:
        """Builds the structure named by --input/--builtin, twisted by --twist."""
        if args.builtin:
            builtin = resolve_builtin(args.builtin)
            F, namespace, description = builtin.structure, builtin.namespace, args.builtin
        elif args.input:
            loaded = self.data_manager.load_algebra(args.input)
            if loaded.form is None:
                raise UsageError(f"{args.input} carries no form; add a `form` entry")
            F = make_frobenius(loaded.algebra, loaded.form)
            namespace = {label: F.algebra.basis(i) for i, label in enumerate(F.algebra.labels)}
            description = args.input
        else:
            raise UsageError("one of --input or --builtin is required")
        text = getattr(args, "twist", None)
        if text:
            u = resolve_twist(text, F.algebra, namespace)
            F = twist(F, u)
            description = f"{description} twisted by {text}"
        return description, F, namespace

    # Commands =========================================================================

    def cmd_analyze(self, args: argparse.Namespace) -> int:
        if args.terms < 1:
            raise UsageError("--terms must be at least 1")
        description, F, _ = self.load_structure(args)
        report = Report.from_structure(description, F, args.terms)
        text = report.render_json(args.verbose) if args.format == "json" else report.render_text(args.verbose)
        self._emit(args, text, report.to_frames)
        return CONFIG.EXIT_OK

    def cmd_series(self, args: argparse.Namespace) -> int:
        description, F, _ = self.load_structure(args)
        report = Report.series_only(description, F)
        text = report.render_json() if args.format == "json" else report.series_text
        self._emit(args, text, report.to_frames)
        return CONFIG.EXIT_OK

    def cmd_spider(self, args: argparse.Namespace) -> int:
        if args.count < 1 or args.max_gens < 1:
            raise UsageError("--count and --max-gens must be positive")
        description, F, _ = self.load_structure(args)
        width = args.max_width if args.max_width is not None else CONFIG.width_for_dimension(F.dim)
        if width < 2:
            raise UsageError("--max-width must be at least 2")
        report = run_spider(F, count=args.count, seed=args.seed, max_generators=args.max_gens, max_width=width)
        summary = {
            "input": description,
            "seed": args.seed,
            "max_width": width,
            "total": report.total,
            "passed": report.passed,
        }
        if report.failures:
            first = report.failures[0]
            summary["first_failure"] = {
                "diagram": first.diagram,
                "standard_form": [first.form.m, first.form.n, first.form.j],
                "lhs": _tensor_entries(first.lhs),
                "rhs": _tensor_entries(first.rhs),
            }
        if args.format == "json":
            text = json.dumps(summary, indent=2, ensure_ascii=False)
        else:
            lines = [f"{description}: {report.passed}/{report.total} diagrams match their standard form (width <= {width})"]
            if report.failures:
                failure = summary["first_failure"]
                lines += [
                    f"first failure: {failure['diagram']}",
                    f"standard form (m, n, j) = {tuple(failure['standard_form'])}",
                    f"diagram value:  {failure['lhs']}",
                    f"standard value: {failure['rhs']}",
                ]
            text = "\n".join(lines)
        self._emit(args, text, lambda: _summary_frames(summary))
        return CONFIG.EXIT_OK if report.ok else CONFIG.EXIT_CHECK_FAILED

    def cmd_builtin(self, args: argparse.Namespace) -> int:
        if args.format == "json":
            text = json.dumps(CONFIG.BUILTIN_NAMES, indent=2)
        else:
            width = max(len(name) for name in CONFIG.BUILTIN_NAMES)
            text = "\n".join(f"{name:<{width}}  {about}" for name, about in CONFIG.BUILTIN_NAMES.items())
        self._emit(args, text, lambda: {"builtins": _pairs_frame(CONFIG.BUILTIN_NAMES, "name", "description")})
        return CONFIG.EXIT_OK

    def cmd_verify(self, args: argparse.Namespace) -> int:
        if args.builtin:
            resolve_builtin(args.builtin)
        checks = run_suites(args.suite, seed=args.seed, builtin=args.builtin)
        text = render_checks_json(checks) if args.format == "json" else render_checks_text(checks)
        self._emit(args, text, lambda: {"checks": checks_frame(checks)})
        failed = [c.id for c in checks if not c.passed]
        if failed:
            print(f"Error: {len(failed)} check(s) failed: {', '.join(failed)}", file=self.stderr)
            return CONFIG.EXIT_CHECK_FAILED
        return CONFIG.EXIT_OK


# Helpers ==============================================================================


def resolve_twist(text: str, algebra: Algebra, namespace: Dict[str, Element]) -> Element:
    """
    Reads a twisting element given as a basis label or alias, a coefficient
    vector such as "[1, 0, 2]", or an expression such as "K*(1 - 3/2 F^2E^2)".

    Raises:
        ParseError: If the text fits none of these forms.
    """
    stripped = text.strip()
    if stripped in namespace:
        return namespace[stripped]
    if stripped.startswith("["):
        try:
            values = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise ParseError(f"bad coefficient vector: {e.msg}", e.pos) from None
        if not isinstance(values, list) or len(values) != algebra.dim:
            raise ParseError(f"coefficient vector must have {algebra.dim} entries")
        coeffs = []
        for value in values:
            if isinstance(value, float):
                raise ParseError(f"coefficient {value!r} is not exact; write it as a fraction string")
            coeffs.append(parse_scalar(json.dumps(value) if isinstance(value, list) else str(value), algebra.field))
        return algebra.element(coeffs)
    return parse_element(stripped, algebra, namespace)


def _tensor_entries(t: Tensor) -> Dict[str, str]:
    return {",".join(map(str, idx)): format_scalar(c) for idx, c in sorted(t.entries.items()) if not c.is_zero()}


def _pairs_frame(mapping: Dict[str, object], key: str, value: str) -> pd.DataFrame:
    return pd.DataFrame({key: list(mapping), value: [str(v) for v in mapping.values()]})


def _summary_frames(summary: Dict[str, object]) -> Dict[str, pd.DataFrame]:
    flat = {k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in summary.items()}
    return {"spider": _pairs_frame(flat, "key", "value")}


def main(argv: Optional[List[str]] = None) -> int:
    return MainCLI().run(argv)
