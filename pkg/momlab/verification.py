"""
Verification suites.

Each suite checks one family of identities on a `Pipeline` and returns a `SuiteInfo`;
`SUITES` keeps them in the order ``--suite all`` runs them.
"""
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from momlab.christoffel import (
    assemble_T, chain_meeting_residual, corollary_order_report, darboux, darboux_permuted, lc_ratio_residual,
    parameter_level_residual, triple_equality_residual
)
from momlab.errors import ChainMismatchError, InvalidArgumentsError, UnsupportedFamilyError
from momlab.exporter import SuiteInfo, VerifyReportInfo
from momlab.gaussborel import (
    PolynomialSide, Side, biorthogonality_residual, normalization_residual, orthogonality_residual
)
from momlab.measures import JacobiPineiroMeasure, LaguerreFirstKindMeasure, MeasureMatrix
from momlab.momentmatrix import build, hankel_residual, shift_left, shift_right
from momlab.oracles import compare_polynomials, compare_recurrence
from momlab.pipeline import Pipeline
from momlab.recurrence import eigen_residual
from momlab.scalars import Scalar
from momlab.utils import get_logger

SuiteFunc = Callable[[Pipeline], SuiteInfo]

EIGEN_SAMPLE_POINTS = ('0', '1/2', '1')
SIDES = (Side.LEFT, Side.RIGHT)


def _outcome(name: str, pipeline: Pipeline, residual: Scalar, details: Optional[Dict[str, Any]] = None) -> SuiteInfo:
    return SuiteInfo(name=name, passed=pipeline.ctx.tolerates(residual), residual=residual, details=details)


def _worst(pipeline: Pipeline, values: Sequence[Scalar]) -> Scalar:
    return max(values, default=pipeline.ctx.zero)


def hankel_suite(pipeline: Pipeline) -> SuiteInfo:
    return _outcome('hankel', pipeline, hankel_residual(pipeline.moments))


def biorthogonality_suite(pipeline: Pipeline) -> SuiteInfo:
    return _outcome('biorthogonality', pipeline, biorthogonality_residual(pipeline.factors, pipeline.moments))


def normalization_suite(pipeline: Pipeline) -> SuiteInfo:
    return _outcome('normalization', pipeline, normalization_residual(pipeline.factors, pipeline.moments))


def orthogonality_suite(pipeline: Pipeline) -> SuiteInfo:
    residuals = {
        f'{side.value}-{normalization.value}': orthogonality_residual(pipeline.table(side, normalization), pipeline.mm)
        for side in PolynomialSide
        for normalization in SIDES
    }
    return _outcome('orthogonality', pipeline, _worst(pipeline, list(residuals.values())), residuals)


def eigen_suite(pipeline: Pipeline) -> SuiteInfo:
    """``T B = x B`` and ``A T = x A`` at a few sample points, each normalization with its own tables."""
    residuals = {}
    for normalization in SIDES:
        T = pipeline.recurrence(normalization)
        for side in PolynomialSide:
            residuals[f'{side.value}-{normalization.value}'] = eigen_residual(
                T, pipeline.table(side, normalization), EIGEN_SAMPLE_POINTS
            )
    return _outcome('eigen', pipeline, _worst(pipeline, list(residuals.values())), residuals)


def bidiagonality_suite(pipeline: Pipeline) -> SuiteInfo:
    residuals = [*pipeline.chain_left.bidiagonality, *pipeline.chain_right.bidiagonality]
    return _outcome('bidiagonality', pipeline, _worst(pipeline, residuals))


def triple_equality_suite(pipeline: Pipeline) -> SuiteInfo:
    residuals = {side.value: triple_equality_residual(pipeline.chain(side)) for side in SIDES}
    return _outcome('triple-equality', pipeline, _worst(pipeline, list(residuals.values())), residuals)


def lc_ratio_suite(pipeline: Pipeline) -> SuiteInfo:
    residuals = {side.value: lc_ratio_residual(pipeline.chain(side)) for side in SIDES}
    return _outcome('lc-ratio', pipeline, _worst(pipeline, list(residuals.values())), residuals)


def theorem_suite(pipeline: Pipeline) -> SuiteInfo:
    try:
        residuals = {
            side.value: assemble_T(pipeline.chain_left, pipeline.chain_right, side, pipeline.n_max)[1]
            for side in SIDES
        }
    except ChainMismatchError as exc:
        return SuiteInfo(name='theorem', passed=False, details={'error': str(exc)})
    return _outcome('theorem', pipeline, _worst(pipeline, list(residuals.values())), residuals)


def darboux_suite(pipeline: Pipeline) -> SuiteInfo:
    """Both forms of the transformed recurrence matrices against independently factorized stages."""
    details: Dict[str, List[Scalar]] = {}
    try:
        for side in SIDES:
            chain = pipeline.chain(side)
            base = pipeline.recurrence(side)
            details[f'{side.value}-permuted'] = [
                darboux_permuted(pipeline.chain_left, pipeline.chain_right, side, k, pipeline.n_max)[1]
                for k in range(1, chain.K + 1)
            ]
            details[f'{side.value}-conjugation'] = [darboux(chain, base, k)[1] for k in range(1, chain.K + 1)]
    except ChainMismatchError as exc:
        return SuiteInfo(name='darboux', passed=False, details={'error': str(exc)})
    residuals = [residual for values in details.values() for residual in values]
    return _outcome('darboux', pipeline, _worst(pipeline, residuals), details)


def chain_meeting_suite(pipeline: Pipeline) -> SuiteInfo:
    """``M (Λ^p)^⊤ = Λ^q M`` entry by entry, then the diagonals of the p-fold left and q-fold right stages."""
    left = shift_left(pipeline.moments, pipeline.p, cols=pipeline.N)
    right = shift_right(pipeline.moments, pipeline.q, rows=pipeline.N)
    size = pipeline.N
    identical = bool((left.entries[:size, :size] == right.entries[:size, :size]).all())
    residual = chain_meeting_residual(pipeline.chain_left, pipeline.chain_right)
    return SuiteInfo(
        name='chain-meeting',
        passed=identical and pipeline.ctx.tolerates(residual),
        residual=residual,
        details={'moments_identical': identical},
    )


def _cycling_candidates(values: Tuple[Scalar, ...], one: Scalar) -> Dict[str, Tuple[Scalar, ...]]:
    return {
        'rotate_first_last_plus_one': (*values[1:], values[0] + one),
        'last_plus_one_rotate': (values[-1] + one, *values[:-1]),
    }


def _shift_deviation(pipeline: Pipeline, candidate: MeasureMatrix, side: Side) -> Scalar:
    size = pipeline.N
    direct = build(candidate, size, size)
    if side is Side.LEFT:
        shifted = shift_left(pipeline.moments, 1, cols=size)
    else:
        shifted = shift_right(pipeline.moments, 1, rows=size)
    return pipeline.ctx.max_abs((direct.entries - shifted.entries[:size, :size]).flat)


def cycling_suite(pipeline: Pipeline) -> SuiteInfo:
    """
    Which parameter map reproduces one moment shift.

    For a left step the candidates are ``(α_2, …, α_p, α_1 + 1)`` and ``(α_p + 1, α_1, …, α_{p-1})``,
    for a right step the same maps of β. The suite passes when the first map matches on both sides
    and, wherever the two maps differ, the second one does not.
    """
    mm = pipeline.mm
    ctx = pipeline.ctx
    if not isinstance(mm, (JacobiPineiroMeasure, LaguerreFirstKindMeasure)):
        try:
            residual = max(_shift_deviation(pipeline, mm.christoffel_left(), Side.LEFT),
                           _shift_deviation(pipeline, mm.christoffel_right(), Side.RIGHT))
        except UnsupportedFamilyError:
            return SuiteInfo(name='cycling', passed=True, details={'parameter_maps': 'not applicable'})
        return _outcome('cycling', pipeline, residual, {'parameter_maps': 'not applicable'})

    details: Dict[str, Any] = {}
    worst = ctx.zero
    unique = True
    for side, values in ((Side.LEFT, mm.params.alpha), (Side.RIGHT, mm.params.beta)):
        outcome = {}
        candidates = _cycling_candidates(values, ctx.one)
        for name, candidate in candidates.items():
            measure = mm.reparametrized(alpha=candidate) if side is Side.LEFT else mm.reparametrized(beta=candidate)
            deviation = _shift_deviation(pipeline, measure, side)
            outcome[name] = {'deviation': deviation, 'matches': ctx.tolerates(deviation)}
        matching = [name for name, result in outcome.items() if result['matches']]
        details[side.value] = {'candidates': outcome, 'matching': matching}
        worst = max(worst, outcome['rotate_first_last_plus_one']['deviation'])
        # with a single parameter both maps coincide
        if len(set(candidates.values())) > 1:
            unique = unique and matching == ['rotate_first_last_plus_one']
        get_logger().info('%s cycling map matching the moment shift: %s', side.value, ', '.join(matching) or 'none')
    return SuiteInfo(
        name='cycling',
        passed=unique and ctx.tolerates(worst),
        residual=worst,
        details=details,
    )


def corollary_order_suite(pipeline: Pipeline) -> SuiteInfo:
    """Left factors match ``L^(k-1) (L^(k))^(-1)``, right factors ``(U^(k))^(-1) U^(k-1)``."""
    expected = {Side.LEFT: 'previous_times_inverse', Side.RIGHT: 'inverse_times_previous'}
    details = {}
    passed = True
    for side in SIDES:
        report = corollary_order_report(pipeline.chain(side))
        details[side.value] = report
        passed = passed and all(expected[side] in entry['matching'] for entry in report)
    return SuiteInfo(name='corollary-order', passed=passed, details=details)


def parameter_level_suite(pipeline: Pipeline) -> SuiteInfo:
    residuals = {side.value: parameter_level_residual(pipeline.chain(side)) for side in SIDES}
    known = [value for value in residuals.values() if value is not None]
    if not known:
        return SuiteInfo(name='parameter-level', passed=True, details={'parameter_maps': 'not applicable'})
    return _outcome('parameter-level', pipeline, _worst(pipeline, known), residuals)


def oracle_suite(pipeline: Pipeline) -> SuiteInfo:
    reports = [
        compare_polynomials(pipeline.table(side, normalization), pipeline.mm, pipeline.n_max)
        for side in PolynomialSide
        for normalization in SIDES
    ]
    if pipeline.p == 1 and pipeline.q == 1:
        reports.append(compare_recurrence(pipeline.recurrence(Side.LEFT), pipeline.mm))
    residual = _worst(pipeline, [report.max_abs_deviation for report in reports])
    return SuiteInfo(
        name='oracle',
        passed=all(report.passed for report in reports),
        residual=residual,
        details={'reports': reports},
    )


SUITES: Dict[str, SuiteFunc] = {
    'hankel': hankel_suite,
    'biorthogonality': biorthogonality_suite,
    'normalization': normalization_suite,
    'orthogonality': orthogonality_suite,
    'eigen': eigen_suite,
    'bidiagonality': bidiagonality_suite,
    'triple-equality': triple_equality_suite,
    'lc-ratio': lc_ratio_suite,
    'theorem': theorem_suite,
    'darboux': darboux_suite,
    'chain-meeting': chain_meeting_suite,
    'cycling': cycling_suite,
    'corollary-order': corollary_order_suite,
    'parameter-level': parameter_level_suite,
    'oracle': oracle_suite,
}


def select_suites(name: str) -> List[str]:
    """Suite names selected by ``--suite``."""
    if name == 'all':
        return list(SUITES)
    if name not in SUITES:
        raise InvalidArgumentsError(f'unknown suite {name!r}, expected one of: all, {", ".join(SUITES)}')
    return [name]


def run_suites(pipeline: Pipeline, name: str) -> VerifyReportInfo:
    """Run the selected suites in registry order."""
    results = []
    for suite in select_suites(name):
        result = SUITES[suite](pipeline)
        log = get_logger().info if result.passed else get_logger().warning
        log('suite %s %s', suite, 'passed' if result.passed else 'failed')
        results.append(result)
    return VerifyReportInfo(suites=tuple(results), passed=all(result.passed for result in results))
