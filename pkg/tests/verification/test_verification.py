from unittest.mock import Mock, patch

import pytest

from momlab.errors import InvalidArgumentsError
from momlab.exporter import SuiteInfo
from momlab.gaussborel import Side
from momlab.measures import JacobiPineiroMeasure, LaguerreFirstKindMeasure
from momlab.pipeline import Pipeline
from momlab.scalars import Mode, PrecisionContext
from momlab.verification import (
    SUITES, chain_meeting_suite, corollary_order_suite, cycling_suite, oracle_suite, parameter_level_suite,
    run_suites, select_suites
)
from tests.components import FactorialMoments, discrete_measure, random_discrete_system

# ---- Test components ----


@pytest.fixture
def laguerre_pipeline(laguerre: LaguerreFirstKindMeasure) -> Pipeline:
    return Pipeline(mm=laguerre, n_max=3)


@pytest.fixture
def jacobi_pineiro_pipeline(jacobi_pineiro: JacobiPineiroMeasure) -> Pipeline:
    return Pipeline(mm=jacobi_pineiro, n_max=4)


# ---- Tests ----


class TestPipeline:
    """Shared derived objects."""

    def test_sizes(self, jacobi_pineiro_pipeline: Pipeline):
        assert (jacobi_pineiro_pipeline.p, jacobi_pineiro_pipeline.q) == (2, 1)
        assert jacobi_pineiro_pipeline.N == 4 + 2 + 1
        assert jacobi_pineiro_pipeline.moments.rows == jacobi_pineiro_pipeline.N + 2

    def test_cached(self, laguerre_pipeline: Pipeline):
        assert laguerre_pipeline.factors is laguerre_pipeline.factors
        assert laguerre_pipeline.chain(Side.LEFT) is laguerre_pipeline.chain_left
        assert laguerre_pipeline.chain(Side.RIGHT) is laguerre_pipeline.chain_right


class TestSelectSuites:
    """Suite selection by name."""

    def test_all(self):
        assert select_suites('all') == list(SUITES)

    def test_single(self):
        assert select_suites('theorem') == ['theorem']

    def test_unknown(self):
        with pytest.raises(InvalidArgumentsError):
            select_suites('nope')


class TestRunSuites:
    """Running suites and logging their outcome."""

    def test_exact_laguerre(self, laguerre_pipeline: Pipeline):
        report = run_suites(laguerre_pipeline, 'all')
        assert report.passed is True
        assert [suite.name for suite in report.suites] == list(SUITES)
        for suite in report.suites:
            assert suite.residual is None or suite.residual == 0

    def test_exact_discrete(self, rational_ctx: PrecisionContext):
        nodes, weights = random_discrete_system(seed=1, p=2, q=1, nodes=14)
        report = run_suites(Pipeline(mm=discrete_measure(rational_ctx, nodes, weights), n_max=6), 'all')
        assert report.passed is True

    def test_bigfloat_jacobi_pineiro(self, jacobi_pineiro_pipeline: Pipeline):
        assert run_suites(jacobi_pineiro_pipeline, 'all').passed is True

    def test_logs_outcome(self, laguerre_pipeline: Pipeline):
        logger_mock = Mock()
        with patch(target='momlab.verification.get_logger', new=Mock(return_value=logger_mock)):
            run_suites(laguerre_pipeline, 'hankel')
        logger_mock.info.assert_called_once_with('suite %s %s', 'hankel', 'passed')
        logger_mock.warning.assert_not_called()

    def test_failure_logged_as_warning(self, laguerre_pipeline: Pipeline):
        logger_mock = Mock()
        failing = Mock(return_value=SuiteInfo(name='hankel', passed=False))
        with patch.dict(SUITES, {'hankel': failing}), \
                patch(target='momlab.verification.get_logger', new=Mock(return_value=logger_mock)):
            report = run_suites(laguerre_pipeline, 'hankel')
        assert report.passed is False
        failing.assert_called_once_with(laguerre_pipeline)
        logger_mock.warning.assert_called_once_with('suite %s %s', 'hankel', 'failed')


class TestSuiteDetails:
    """Details reported by individual suites."""

    def test_cycling_parameter_maps(self, jacobi_pineiro_pipeline: Pipeline):
        result = cycling_suite(jacobi_pineiro_pipeline)
        assert result.passed is True
        assert result.details['left']['matching'] == ['rotate_first_last_plus_one']
        assert result.details['left']['candidates']['last_plus_one_rotate']['matches'] is False
        # a single β makes both maps the same
        assert result.details['right']['matching'] == ['rotate_first_last_plus_one', 'last_plus_one_rotate']

    def test_cycling_three_parameters(self, bigfloat_ctx: PrecisionContext):
        """Three α and two β: only the rotation followed by a unit shift of the last entry matches."""
        mm = JacobiPineiroMeasure(alpha=['0', '1/2', '4/5'], beta=['0', '1/3'], gamma='0', ctx=bigfloat_ctx)
        result = cycling_suite(Pipeline(mm=mm, n_max=3))
        assert result.passed is True
        for side in ('left', 'right'):
            assert result.details[side]['matching'] == ['rotate_first_last_plus_one']
            assert result.details[side]['candidates']['last_plus_one_rotate']['matches'] is False

    def test_cycling_fails_when_both_maps_match(self):
        """A tolerance that accepts every deviation cannot single out one map."""
        ctx = PrecisionContext(mode=Mode.BIGFLOAT, digits=64, residual_tol='1e6')
        mm = JacobiPineiroMeasure(alpha=['0', '1/2'], beta=['0'], gamma='0', ctx=ctx)
        result = cycling_suite(Pipeline(mm=mm, n_max=3))
        assert result.details['left']['matching'] == ['rotate_first_last_plus_one', 'last_plus_one_rotate']
        assert result.passed is False

    def test_cycling_without_parameters(self, rational_ctx: PrecisionContext):
        nodes, weights = random_discrete_system(seed=0, p=1, q=1, nodes=14)
        result = cycling_suite(Pipeline(mm=discrete_measure(rational_ctx, nodes, weights), n_max=4))
        assert result.passed is True
        assert result.residual == 0
        assert result.details == {'parameter_maps': 'not applicable'}

    def test_moments_only(self, rational_ctx: PrecisionContext):
        pipeline = Pipeline(mm=FactorialMoments(p=1, q=1, ctx=rational_ctx), n_max=3)
        for suite in (cycling_suite, parameter_level_suite):
            result = suite(pipeline)
            assert result.passed is True
            assert result.details == {'parameter_maps': 'not applicable'}

    def test_corollary_order(self, jacobi_pineiro_pipeline: Pipeline):
        result = corollary_order_suite(jacobi_pineiro_pipeline)
        assert result.passed is True
        assert len(result.details['left']) == 2
        assert len(result.details['right']) == 1

    def test_chain_meeting(self, laguerre_pipeline: Pipeline):
        result = chain_meeting_suite(laguerre_pipeline)
        assert result.details == {'moments_identical': True}
        assert result.residual == 0

    def test_oracle_reports(self, laguerre_pipeline: Pipeline, jacobi_pineiro_pipeline: Pipeline):
        assert len(oracle_suite(laguerre_pipeline).details['reports']) == 5
        assert len(oracle_suite(jacobi_pineiro_pipeline).details['reports']) == 4
