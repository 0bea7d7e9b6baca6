"""
Command-line View.

This module contains the argparse front end. Every subcommand prints a
human-readable summary; with --out the report is also written as CSV or
JSON together with a run manifest.

Exit codes: 0 pass, 2 check failure, 3 capacity guard, 4 usage error.
"""

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from ..config.config_manager import ConfigManager
from ..controllers.starnet_controller import StarnetController
from ..exceptions import CheckFailedError, StarnetError
from ..models.reports import VerificationReport
from ..models.scenario import RunSettings
from ..server_factory import create_mcp_server_with_settings
from . import export

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2
EXIT_CAPACITY = 3
EXIT_USAGE = 4


class UsageError(Exception):
    """Raised by the parser instead of exiting."""


class StarnetArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems with exit code 4."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(parser: argparse.ArgumentParser, scenario: bool = True) -> None:
    if scenario:
        parser.add_argument("--n", type=int, default=2, help="number of edge parties")
        parser.add_argument("--m", type=int, default=2, help="settings per edge party")
        parser.add_argument("--copies", type=int, default=None, help="Bell pairs per link (default floor(m/2))")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=None, help="output file")
    parser.add_argument("--format", choices=["csv", "json"], default="json")
    parser.add_argument("--threads", type=int, default=None, help="worker count (STARNET_THREADS overrides)")
    parser.add_argument("--max-states", type=int, default=None, help="limit on 2^(nm) for exhaustive search")
    parser.add_argument("--seeds", type=int, default=None, help="seesaw restarts")
    parser.add_argument("--log-level", default=None)


def build_parser() -> StarnetArgumentParser:
    parser = StarnetArgumentParser(prog="starnet", description="Generalized n-locality inequalities on star networks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=StarnetArgumentParser)

    bounds = sub.add_parser("bounds", help="alpha_m, quantum optimum and their ratio over a range of m")
    _common(bounds, scenario=False)
    bounds.add_argument("--m-min", type=int, default=2)
    bounds.add_argument("--m-max", type=int, default=50)

    for name, text in (("verify", "run every check for one scenario"),
                       ("quantum", "evaluate the optimal quantum strategy"),
                       ("lhv-brute", "exhaustive deterministic search for the classical bound")):
        _common(sub.add_parser(name, help=text))

    sos_check = sub.add_parser("sos-check", help="sum-of-squares certificate checks")
    _common(sos_check)
    sos_check.add_argument("--random", type=int, default=0, help="number of random strategies")
    sos_check.add_argument("--observables", type=Path, default=None, help="JSON file with per-party observables")

    sweep = sub.add_parser("sweep", help="Werner visibility sweep")
    _common(sweep)
    sweep.add_argument("--v-min", type=float, default=0.0)
    sweep.add_argument("--v-max", type=float, default=1.0)
    sweep.add_argument("--steps", type=int, default=21)

    seesaw = sub.add_parser("seesaw", help="seesaw maximization with a fixed number of copies")
    _common(seesaw)
    seesaw.add_argument("--v", type=float, default=1.0, help="per-copy visibility")
    seesaw.add_argument("--max-iters", type=int, default=1000)

    activate = sub.add_parser("activate", help="single-copy versus multi-copy comparison")
    _common(activate)
    activate.add_argument("--v", type=float, default=1.0, help="per-copy visibility")

    exporter = sub.add_parser("export", help="convert a saved JSON report to CSV or JSON")
    _common(exporter, scenario=False)
    exporter.add_argument("--report", type=Path, required=True)

    serve = sub.add_parser("serve", help="run the MCP server over HTTP")
    serve.add_argument("--log-level", default=None)
    serve.add_argument("--threads", type=int, default=None)
    return parser


def _settings(args: argparse.Namespace) -> RunSettings:
    return ConfigManager().get_run_settings(
        threads=getattr(args, "threads", None),
        max_states=getattr(args, "max_states", None),
        seeds=getattr(args, "seeds", None),
        log_level=getattr(args, "log_level", None),
    )


def _parameters(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: (str(value) if isinstance(value, Path) else value) for key, value in vars(args).items()}


def format_verification(report: VerificationReport) -> str:
    result = f"Verification n={report.n}, m={report.m}:\n"
    for name, ok in report.checks.items():
        result += f"- {name}: {'pass' if ok else 'FAIL'}\n"
    for name in report.skipped:
        result += f"- {name}: skipped\n"
    result += f"- delta: {report.evaluation.delta:.9g} (optimum {report.evaluation.quantum_optimum:.9g})\n"
    result += f"- alpha: {report.classical.alpha_closed}\n"
    result += f"- gamma: {report.certificate.gamma:.3e}\n"
    return result


def _emit(args: argparse.Namespace, report: Any, summary: str, argv: Sequence[str]) -> None:
    print(summary, end="" if summary.endswith("\n") else "\n")
    if args.out is not None:
        export.export(report, args.out, args.format, args.command, _parameters(args),
                      seed=getattr(args, "seed", None), argv=argv)


def _check_optimal_copies(args: argparse.Namespace) -> None:
    # the optimal strategy always uses floor(m/2) pairs per link
    if getattr(args, "copies", None) is not None and args.copies != args.m // 2:
        raise UsageError(
            f"{args.command} uses the optimal strategy with {args.m // 2} copies for m={args.m}, got --copies {args.copies}"
        )


def _run(args: argparse.Namespace, controller: StarnetController, argv: Sequence[str]) -> int:
    command = args.command
    if command in ("verify", "quantum"):
        _check_optimal_copies(args)

    if command == "bounds":
        rows = controller.get_bounds(args.m_min, args.m_max)
        _emit(args, rows, export.bounds_csv(rows), argv)
        return EXIT_OK

    if command == "verify":
        report = controller.verify(args.n, args.m)
        _emit(args, report, format_verification(report), argv)
        if not report.passed:
            raise CheckFailedError(", ".join(report.failed_checks))
        return EXIT_OK

    if command == "quantum":
        report = controller.get_quantum(args.n, args.m)
        summary = (f"n={report.n}, m={report.m}: delta={report.delta:.9g}, alpha={report.classical_bound:.9g}, "
                   f"ratio={report.ratio:.9g}, violated={export.format_value(report.violated)}")
        _emit(args, report, summary, argv)
        return EXIT_OK

    if command == "lhv-brute":
        report = controller.get_classical(args.n, args.m)
        summary = (f"n={args.n}, m={args.m}: closed={report.alpha_closed}, enumerated={report.alpha_enumerated}, "
                   f"strategy max={report.alpha_strategy_max} over {report.strategies_searched} strategies, "
                   f"agree={export.format_value(report.agree)}")
        _emit(args, report, summary, argv)
        return EXIT_OK if report.agree else EXIT_CHECK_FAILED

    if command == "sos-check":
        observables = args.observables.read_text(encoding="utf-8") if args.observables else None
        report = controller.get_certificate(args.n, args.m, observables)
        summary = (f"n={report.n}, m={report.m}: gamma={report.gamma:.3e}, delta={report.delta_q:.9g}, "
                   f"slack_ok={export.format_value(report.slack_ok)}, tight={export.format_value(report.tight)}")
        if args.random:
            stats = controller.get_random_certificates(args.n, args.m, args.random, args.seed)
            summary += (f"\nrandom strategies: {args.random}, min gamma={stats['min_gamma']:.3e}, "
                        f"max bound={stats['max_bound']:.9g}")
            if stats["min_gamma"] < -1e-8:
                _emit(args, report, summary, argv)
                raise CheckFailedError("certificate_positivity", f"min gamma {stats['min_gamma']:.3e}")
        _emit(args, report, summary, argv)
        return EXIT_OK if report.slack_ok else EXIT_CHECK_FAILED

    if command == "sweep":
        result = controller.get_sweep(args.n, args.m, args.copies, args.v_min, args.v_max, args.steps,
                                      seed=args.seed, seeds=args.seeds)
        critical = "none" if result.critical_v is None else f"{result.critical_v:.7f}"
        summary = export.sweep_csv(result) + f"critical_v={critical}\n"
        _emit(args, result, summary, argv)
        return EXIT_OK

    if command == "seesaw":
        copies = args.copies if args.copies is not None else args.m // 2
        state = controller.get_seesaw(args.n, args.m, copies, seed=args.seed, seeds=args.seeds,
                                      visibility=args.v, max_iters=args.max_iters)
        summary = (f"n={state.n}, m={state.m}, copies={state.copies}, v={state.visibility}: "
                   f"best delta={state.delta:.9g} (seed {state.seed}, converged={export.format_value(state.converged)})")
        _emit(args, state, summary, argv)
        return EXIT_OK

    if command == "activate":
        result = controller.get_activation(args.m, args.v, n=args.n, seed=args.seed, seeds=args.seeds)
        summary = (f"m={result.m}, v={result.v}: single={result.delta_single:.9g}, multi={result.delta_multi:.9g}, "
                   f"alpha={result.alpha:.9g}, activated={export.format_value(result.activated)}")
        _emit(args, result, summary, argv)
        return EXIT_OK

    if command == "export":
        report = export.load_report(args.report)
        out = args.out or args.report.with_suffix(f".{args.format}")
        paths = export.export(report, out, args.format, command, _parameters(args), argv=argv)
        print("\n".join(str(p) for p in paths))
        return EXIT_OK

    raise UsageError(f"unknown command '{command}'")


def serve(settings: RunSettings) -> int:
    try:
        app = create_mcp_server_with_settings(settings)
        logger.info(f"MCP server initialized, starting with HTTP transport on {settings.host}:{settings.port}...")
        asyncio.run(app.run_http_async(transport="http", host=settings.host, port=settings.port))
    except KeyboardInterrupt:
        logger.info("Server stopped by user")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and run one command.

    Returns:
        Process exit code
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"starnet: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    settings = _settings(args)
    logging.getLogger().setLevel(settings.log_level)
    if getattr(args, "out", None) is not None and not args.out.is_absolute():
        args.out = Path(settings.out_dir) / args.out

    if args.command == "serve":
        return serve(settings)

    try:
        return _run(args, StarnetController(settings), ["starnet"] + argv)
    except UsageError as e:
        print(f"starnet: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except StarnetError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"starnet: {e}", file=sys.stderr)
        return e.exit_code
