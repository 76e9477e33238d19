import math
from fractions import Fraction
from pathlib import Path
from unittest.mock import Mock, patch

import pytest

from momlab.errors import (
    AdmissibilityWarning, DegreeBudgetExceededError, InadmissibleParametersError, IndexOutOfWindowError,
    InvalidArgumentsError, UnsupportedFamilyError
)
from momlab.measures import (
    DiscreteMeasureMatrix, JacobiPineiroMeasure, LaguerreFirstKindMeasure, christoffel_left,
    christoffel_left_iterate, christoffel_right, christoffel_right_iterate, load_discrete, moment, parse_family
)
from momlab.scalars import PrecisionContext
from tests.components import write_nodes_file


class TestClassicalFamilies:
    """Moments and parameter maps of the Jacobi–Piñeiro and Laguerre families."""

    def test_laguerre_moments_are_factorials(self, laguerre: LaguerreFirstKindMeasure):
        assert [moment(laguerre, 1, 1, n) for n in range(8)] == [math.factorial(n) for n in range(8)]

    def test_legendre_moments(self, legendre: JacobiPineiroMeasure):
        assert [moment(legendre, 1, 1, n) for n in range(6)] == [Fraction(1, n + 1) for n in range(6)]

    def test_jacobi_weight_moments(self, rational_ctx: PrecisionContext):
        """With γ = 1 the moments are ``B(n+1, 2) = 1/((n+1)(n+2))``."""
        mm = JacobiPineiroMeasure(alpha=[0], beta=[0], gamma=1, ctx=rational_ctx)
        assert [mm.moment(1, 1, n) for n in range(6)] == [Fraction(1, (n + 1) * (n + 2)) for n in range(6)]

    def test_mixed_laguerre_entries(self, rational_ctx: PrecisionContext):
        """Entry (b, a) carries ``x^(α_a + β_b)``."""
        mm = LaguerreFirstKindMeasure(alpha=[0, 2], beta=[0, 1], ctx=rational_ctx)
        assert (mm.p, mm.q) == (2, 2)
        assert mm.moment(1, 2, 0) == 2
        assert mm.moment(2, 1, 1) == 2
        assert mm.moment(2, 2, 1) == 24

    def test_non_integer_jacobi_pineiro(self, jacobi_pineiro: JacobiPineiroMeasure):
        ctx = jacobi_pineiro.ctx
        assert abs(jacobi_pineiro.moment(1, 2, 0) - ctx.from_str('2/3')) < ctx.residual_tol
        assert abs(jacobi_pineiro.moment(1, 2, 1) - ctx.from_str('2/5')) < ctx.residual_tol

    def test_left_transformation_cycles_alpha(self, jacobi_pineiro: JacobiPineiroMeasure):
        transformed = christoffel_left(jacobi_pineiro)
        ctx = jacobi_pineiro.ctx
        assert transformed.params.alpha == (ctx.from_str('1/2'), ctx.one)
        assert transformed.params.beta == jacobi_pineiro.params.beta
        twice = christoffel_left_iterate(jacobi_pineiro, 2)
        assert twice.params.alpha == (ctx.one, ctx.from_str('3/2'))

    def test_right_transformation_cycles_beta(self, rational_ctx: PrecisionContext):
        mm = LaguerreFirstKindMeasure(alpha=[0], beta=[0, Fraction(1, 3)], ctx=rational_ctx)
        assert christoffel_right(mm).params.beta == (Fraction(1, 3), Fraction(1))
        assert christoffel_right_iterate(mm, 0) is mm

    def test_shifted_moments_match_transformed_family(self, laguerre: LaguerreFirstKindMeasure):
        """One left step of the scalar Laguerre measure multiplies it by x."""
        transformed = christoffel_left(laguerre)
        assert [transformed.moment(1, 1, n) for n in range(6)] == [laguerre.moment(1, 1, n + 1) for n in range(6)]

    @pytest.mark.parametrize(
        ('alpha', 'beta', 'gamma'),
        [
            {'alpha': ['-1'], 'beta': ['0'], 'gamma': '0'}.values(),
            {'alpha': ['0'], 'beta': ['-3/2'], 'gamma': '0'}.values(),
            {'alpha': ['0'], 'beta': ['0'], 'gamma': '-1'}.values(),
            {'alpha': [], 'beta': ['0'], 'gamma': '0'}.values(),
        ]
    )
    def test_inadmissible_parameters(self, rational_ctx: PrecisionContext, alpha, beta, gamma):
        with pytest.raises(InadmissibleParametersError):
            JacobiPineiroMeasure(alpha=alpha, beta=beta, gamma=gamma, ctx=rational_ctx)

    def test_integer_differences_warn(self, rational_ctx: PrecisionContext):
        with pytest.warns(AdmissibilityWarning):
            LaguerreFirstKindMeasure(alpha=[0, 1], beta=[0], ctx=rational_ctx)

    def test_degree_budget(self, rational_ctx: PrecisionContext):
        mm = LaguerreFirstKindMeasure(alpha=[0], beta=[0], ctx=rational_ctx, degree_budget=5)
        assert mm.moment(1, 1, 5) == 120
        with pytest.raises(DegreeBudgetExceededError):
            mm.moment(1, 1, 6)

    @pytest.mark.parametrize(
        ('b', 'a', 'n', 'error'),
        [
            {'b': 0, 'a': 1, 'n': 0, 'error': IndexOutOfWindowError}.values(),
            {'b': 1, 'a': 2, 'n': 0, 'error': IndexOutOfWindowError}.values(),
            {'b': 1, 'a': 1, 'n': -1, 'error': InvalidArgumentsError}.values(),
        ]
    )
    def test_invalid_moment_requests(self, laguerre: LaguerreFirstKindMeasure, b: int, a: int, n: int, error):
        with pytest.raises(error):
            laguerre.moment(b, a, n)

    def test_moments_are_cached(self, laguerre: LaguerreFirstKindMeasure):
        """Lower orders are served from the cache without extending it."""
        logger_mock = Mock()
        with patch(target='momlab.measures.get_logger', new=Mock(return_value=logger_mock)):
            laguerre.moment(1, 1, 4)
            laguerre.moment(1, 1, 2)
            laguerre.moment(1, 1, 4)
        assert logger_mock.debug.call_count == 1

    def test_describe(self, jacobi_pineiro: JacobiPineiroMeasure):
        description = jacobi_pineiro.describe()
        assert description['family'] == 'jp'
        assert description['support'] == '[0, 1]'
        assert (description['p'], description['q']) == (2, 1)
        assert description['alpha'][1].startswith('5.0')


class TestDiscreteMeasures:
    """Finitely supported matrices of measures."""

    def test_moments(self, rational_ctx: PrecisionContext):
        mm = DiscreteMeasureMatrix(nodes=['1', '2'], weights=[[['1', '2']], [['3', '4']]], ctx=rational_ctx)
        assert (mm.p, mm.q) == (2, 1)
        assert mm.moment(1, 1, 0) == 4
        assert mm.moment(1, 2, 2) == 2 + 16

    def test_left_transformation(self, rational_ctx: PrecisionContext):
        """Column a takes column a+1, the last column takes x times the first."""
        mm = DiscreteMeasureMatrix(nodes=['1', '2'], weights=[[['1', '2']], [['3', '4']]], ctx=rational_ctx)
        transformed = mm.christoffel_left()
        assert transformed.weights == (((2, 1),), ((4, 6),))
        assert transformed.moment(1, 1, 0) == 6
        assert transformed.moment(1, 2, 0) == 7

    def test_right_transformation(self, rational_ctx: PrecisionContext):
        mm = DiscreteMeasureMatrix(nodes=['3'], weights=[[['1'], ['2']]], ctx=rational_ctx)
        assert mm.christoffel_right().weights == (((2,), (3,)),)

    def test_mass_at_zero_disappears(self, rational_ctx: PrecisionContext):
        mm = DiscreteMeasureMatrix(nodes=['0', '1'], weights=[[['1']], [['1']]], ctx=rational_ctx)
        transformed = mm.christoffel_left()
        assert transformed.nodes == (1,)
        emptied = DiscreteMeasureMatrix(nodes=['0'], weights=[[['5']]], ctx=rational_ctx).christoffel_left()
        assert emptied.moment(1, 1, 3) == 0
        assert emptied.christoffel_right() is emptied

    @pytest.mark.parametrize(
        ('nodes', 'weights'),
        [
            {'nodes': ['1', '1'], 'weights': [[['1']], [['1']]]}.values(),
            {'nodes': ['1', '2'], 'weights': [[['1']]]}.values(),
            {'nodes': ['1', '2'], 'weights': [[['1']], [['1', '1']]]}.values(),
            {'nodes': ['1'], 'weights': [[['0', '0']]]}.values(),
            {'nodes': [], 'weights': []}.values(),
        ]
    )
    def test_invalid_systems(self, rational_ctx: PrecisionContext, nodes, weights):
        with pytest.raises(InadmissibleParametersError):
            DiscreteMeasureMatrix(nodes=nodes, weights=weights, ctx=rational_ctx)

    def test_load_nodes_file(self, rational_ctx: PrecisionContext, tmp_path: Path):
        path = write_nodes_file(tmp_path / 'nodes.json', ['0', '1/2'], [[['1', '1/3']], [['2', '0']]])
        mm = load_discrete(path, rational_ctx)
        assert mm.nodes == (0, Fraction(1, 2))
        assert mm.moment(1, 2, 0) == Fraction(1, 3)

    def test_load_accepts_numbers(self, rational_ctx: PrecisionContext, tmp_path: Path):
        path = tmp_path / 'nodes.json'
        path.write_text('{"nodes": [1, 2], "weights": [[[1]], [[0.5]]]}', encoding='utf-8')
        assert load_discrete(path, rational_ctx).moment(1, 1, 1) == 2

    @pytest.mark.parametrize(
        'content',
        [
            'not json',
            '[1, 2]',
            '{"nodes": ["1"]}',
        ]
    )
    def test_load_rejects(self, rational_ctx: PrecisionContext, tmp_path: Path, content: str):
        path = tmp_path / 'nodes.json'
        path.write_text(content, encoding='utf-8')
        with pytest.raises(InadmissibleParametersError):
            load_discrete(path, rational_ctx)

    def test_missing_file(self, rational_ctx: PrecisionContext, tmp_path: Path):
        with pytest.raises(OSError):
            load_discrete(tmp_path / 'missing.json', rational_ctx)


class TestParseFamily:
    """Command line descriptions of measure matrices."""

    def test_jacobi_pineiro(self, rational_ctx: PrecisionContext):
        mm = parse_family('jp', rational_ctx, alpha='0, 1/2', beta='0', gamma='1')
        assert isinstance(mm, JacobiPineiroMeasure)
        assert mm.params.alpha == (0, Fraction(1, 2))
        assert mm.params.gamma == 1

    def test_gamma_defaults_to_zero(self, rational_ctx: PrecisionContext):
        assert parse_family('jp', rational_ctx, alpha='0', beta='0').params.gamma == 0

    @pytest.mark.parametrize(
        ('family', 'alpha', 'beta', 'error'),
        [
            {'family': 'hermite', 'alpha': '0', 'beta': '0', 'error': UnsupportedFamilyError}.values(),
            {'family': 'lag1', 'alpha': None, 'beta': '0', 'error': InvalidArgumentsError}.values(),
            {'family': 'jp', 'alpha': '0', 'beta': ' ', 'error': InvalidArgumentsError}.values(),
            {'family': 'discrete', 'alpha': None, 'beta': None, 'error': InvalidArgumentsError}.values(),
        ]
    )
    def test_rejects(self, rational_ctx: PrecisionContext, family: str, alpha, beta, error):
        with pytest.raises(error):
            parse_family(family, rational_ctx, alpha=alpha, beta=beta)
