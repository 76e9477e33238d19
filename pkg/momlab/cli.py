"""
Command line front end.

Exit codes: 0 success, 1 verification failure, 2 singular or near-singular data,
3 invalid arguments, 4 I/O failure.
"""
import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence, Tuple

from momlab import __version__
from momlab.christoffel import (
    BidiagonalChain, assemble_T, darboux, darboux_permuted, lc_ratio_residual, triple_equality_residual
)
from momlab.config import DEFAULT_N_MAX, DEFAULT_SUITE, OutputFormat, RunConfig
from momlab.dispatcher import ReportDispatcher
from momlab.errors import ChainMismatchError, InvalidArgumentsError, MomlabError, SingularMinorError, SingularSystemError
from momlab.exporter import (
    BaseInfo, BidiagReportInfo, ChainReportInfo, DarbouxInfo, FactorEntriesInfo, FactorsInfo, MomentMatrixInfo,
    PolynomialTableInfo, RecurrenceInfo
)
from momlab.gaussborel import PolynomialSide, Side
from momlab.handlers import BaseHandler, FileHandler, LoggingHandler, StreamHandler
from momlab.measures import FamilyTag
from momlab.momentmatrix import build, truncation_size
from momlab.pipeline import Pipeline
from momlab.recurrence import band_residual
from momlab.scalars import Mode, Scalar
from momlab.utils import get_logger
from momlab.verification import run_suites

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_SINGULAR = 2
EXIT_INVALID_ARGUMENTS = 3
EXIT_IO = 4

CommandResult = Tuple[BaseInfo, bool]


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting, so usage errors map to exit code 3."""

    def error(self, message: str) -> NoReturn:
        raise InvalidArgumentsError(f'{self.prog}: {message}')


def _shared_options() -> argparse.ArgumentParser:
    # SUPPRESS keeps options given before the command from being reset by the subcommand parser
    shared = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    shared.add_argument('--family', choices=[tag.value for tag in FamilyTag])
    shared.add_argument('--alpha', help='comma separated α parameters, e.g. 0,0.5')
    shared.add_argument('--beta', help='comma separated β parameters')
    shared.add_argument('--gamma', help='γ parameter of the jp family')
    shared.add_argument('--nodes-file', dest='nodes_file', help='JSON file of a discrete matrix of measures')
    shared.add_argument('--nmax', dest='n_max', type=int, help=f'largest index of the window (default {DEFAULT_N_MAX})')
    shared.add_argument('--k', type=int, help='Christoffel steps, or the transformation step of darboux')
    shared.add_argument('--digits', type=int, help='decimal digits of precision (default 64 or $MOMLAB_DIGITS)')
    shared.add_argument('--mode', choices=[mode.value for mode in Mode])
    shared.add_argument('--format', dest='output_format', choices=[fmt.value for fmt in OutputFormat],
                        help='output format (default csv for moments, json otherwise)')
    shared.add_argument('--out', help='write the output to this file instead of standard output')
    shared.add_argument('--side', choices=[side.value for side in Side])
    shared.add_argument('--suite', help=f'verification suite or "all" (default {DEFAULT_SUITE})')
    shared.add_argument('--size', type=int, help='rows and columns of the moments dump')
    shared.add_argument('--poly-side', dest='poly_side', choices=[side.value for side in PolynomialSide])
    shared.add_argument('--normalization', choices=[side.value for side in Side])
    shared.add_argument('--residual-tol', dest='residual_tol', help='tolerance of residual checks')
    shared.add_argument('--verbose', action='store_true', help='log at DEBUG level')
    return shared


def build_parser() -> ArgumentParser:
    shared = _shared_options()
    parser = ArgumentParser(prog='momlab', description=__doc__, parents=[shared])
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=ArgumentParser)
    for name, (_, description) in COMMANDS.items():
        commands.add_parser(name, parents=[shared], help=description, description=description)
    return parser


def _require_family(cfg: RunConfig) -> None:
    if not cfg.family:
        raise InvalidArgumentsError('--family is required')


def cmd_moments(cfg: RunConfig, pipeline: Pipeline) -> CommandResult:
    mm = pipeline.mm
    size = cfg.size if cfg.size is not None else truncation_size(cfg.n_max, cfg.steps(mm), mm.p, mm.q)
    return MomentMatrixInfo.from_moment_matrix(build(mm, size, size)), True


def cmd_factor(cfg: RunConfig, pipeline: Pipeline) -> CommandResult:
    return FactorsInfo.from_factors(pipeline.factors), True


def cmd_polys(cfg: RunConfig, pipeline: Pipeline) -> CommandResult:
    table = pipeline.table(cfg.poly_side, cfg.normalization)
    return PolynomialTableInfo.from_table(table, cfg.n_max), True


def cmd_recurrence(cfg: RunConfig, pipeline: Pipeline) -> CommandResult:
    T = pipeline.recurrence(cfg.side)
    residual = band_residual(T)
    return RecurrenceInfo.from_recurrence(T, residuals={'band': residual}), pipeline.ctx.tolerates(residual)


def _factor_entries(chain: BidiagonalChain, n_max: int) -> Tuple[FactorEntriesInfo, ...]:
    reports = []
    for k, factor in enumerate(chain.factors, start=1):
        if chain.side is Side.LEFT:
            entries = tuple((n + 1, n, factor[n + 1, n]) for n in range(n_max))
            kind = 'L'
        else:
            entries = tuple((n, n + 1, factor[n, n + 1]) for n in range(n_max))
            kind = 'U'
        reports.append(FactorEntriesInfo(k=k, kind=kind, entries=entries))
    return tuple(reports)


def cmd_bidiag(cfg: RunConfig, pipeline: Pipeline) -> CommandResult:
    """Left and right chains, the assembled recurrence matrices and the permuted products."""
    ctx = pipeline.ctx
    chains = (pipeline.chain_left, pipeline.chain_right)
    reports = []
    passed = True
    for chain in chains:
        theorem = assemble_T(pipeline.chain_left, pipeline.chain_right, chain.side, cfg.n_max)[1]
        permuted = [
            darboux_permuted(pipeline.chain_left, pipeline.chain_right, chain.side, k, cfg.n_max)[1]
            for k in range(1, chain.K + 1)
        ]
        residuals: Dict[str, Any] = {
            'theorem': theorem,
            'darboux': permuted,
            'triple_equality_max': triple_equality_residual(chain),
            'lc_ratio_max': lc_ratio_residual(chain),
            'bidiagonality_max': max(chain.bidiagonality, default=ctx.zero),
        }
        checked: List[Scalar] = [
            theorem,
            *permuted,
            residuals['triple_equality_max'],
            residuals['lc_ratio_max'],
            residuals['bidiagonality_max'],
        ]
        passed = passed and all(ctx.tolerates(value) for value in checked)
        reports.append(ChainReportInfo(
            side=chain.side.value,
            K=chain.K,
            factors=_factor_entries(chain, cfg.n_max),
            residuals=residuals,
        ))
    return BidiagReportInfo(chains=tuple(reports), passed=passed), passed


def cmd_darboux(cfg: RunConfig, pipeline: Pipeline) -> CommandResult:
    """Recurrence matrix of the k-times transformed measure, permuted and conjugated."""
    k = cfg.k if cfg.k is not None else 1
    T, permuted = darboux_permuted(pipeline.chain_left, pipeline.chain_right, cfg.side, k, cfg.n_max)
    chain = pipeline.chain(cfg.side)
    residuals = {'permuted': permuted, 'conjugation': darboux(chain, pipeline.recurrence(cfg.side), k)[1]}
    passed = all(pipeline.ctx.tolerates(value) for value in residuals.values())
    report = DarbouxInfo(
        side=cfg.side.value,
        k=k,
        recurrence=RecurrenceInfo.from_recurrence(T),
        residuals=residuals,
        passed=passed,
    )
    return report, passed


def cmd_verify(cfg: RunConfig, pipeline: Pipeline) -> CommandResult:
    report = run_suites(pipeline, cfg.suite)
    return report, report.passed


CommandFunc = Callable[[RunConfig, Pipeline], CommandResult]

COMMANDS: Dict[str, Tuple[CommandFunc, str]] = {
    'moments': (cmd_moments, 'dump the truncated moment matrix'),
    'factor': (cmd_factor, 'dump the Gauss–Borel factors'),
    'polys': (cmd_polys, 'dump a table of mixed multiple orthogonal polynomials'),
    'recurrence': (cmd_recurrence, 'dump the banded recurrence matrix'),
    'bidiag': (cmd_bidiag, 'bidiagonal factorization of the recurrence matrix'),
    'darboux': (cmd_darboux, 'recurrence matrix of a Christoffel transformed measure'),
    'verify': (cmd_verify, 'run verification suites'),
}


def _handlers(cfg: RunConfig) -> List[BaseHandler]:
    primary: BaseHandler = FileHandler(cfg.out) if cfg.out is not None else StreamHandler()
    return [primary, LoggingHandler()]


def run(cfg: RunConfig) -> int:
    """Execute one configured command and deliver its report; returns the exit code."""
    _require_family(cfg)
    ctx = cfg.precision()
    pipeline = Pipeline(mm=cfg.measure(ctx), n_max=cfg.n_max)
    command, _ = COMMANDS[cfg.command]
    report, passed = command(cfg, pipeline)
    meta = {'version': __version__, 'config': cfg.as_meta(), 'measure': pipeline.mm.describe()}
    ReportDispatcher(handlers=_handlers(cfg), output_format=cfg.report_format.value, meta=meta).dispatch(report)
    return EXIT_OK if passed else EXIT_VERIFICATION_FAILED


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``momlab`` console script."""
    try:
        namespace = build_parser().parse_args(argv)
        cfg = RunConfig.from_namespace(namespace)
    except InvalidArgumentsError as exc:
        sys.stderr.write(f'{exc}\n')
        sys.stderr.write('usage: momlab <command> --family {jp,lag1,discrete} [options], see momlab --help\n')
        return EXIT_INVALID_ARGUMENTS

    _configure_logging(cfg.verbose)
    logger = get_logger()
    try:
        return run(cfg)
    except SingularMinorError as exc:
        logger.error('%s', exc)
        return EXIT_SINGULAR
    except SingularSystemError as exc:
        logger.error('%s', exc)
        return EXIT_SINGULAR
    except ChainMismatchError as exc:
        logger.error('%s', exc)
        return EXIT_VERIFICATION_FAILED
    except OSError as exc:
        logger.error('%s', exc)
        return EXIT_IO
    except MomlabError as exc:
        logger.error('%s', exc)
        return EXIT_INVALID_ARGUMENTS


if __name__ == '__main__':
    sys.exit(main())
