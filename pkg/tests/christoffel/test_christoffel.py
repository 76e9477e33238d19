import math
from fractions import Fraction

import pytest

from momlab.christoffel import (
    assemble_T, chain_meeting_residual, corollary_order_report, darboux, darboux_permuted, entry_formulas, lc_ratio,
    lc_ratio_residual, parameter_level_residual, remainder, run_chain, triple_equality_residual
)
from momlab.errors import (
    ChainMismatchError, IndexOutOfWindowError, InvalidArgumentsError, SingularMinorError, WindowTooSmallError
)
from momlab.gaussborel import Side
from momlab.measures import LaguerreFirstKindMeasure
from momlab.recurrence import build_T
from momlab.scalars import PrecisionContext
from tests.components import FactorialMoments, discrete_measure

_N_MAX = 4


class TestLaguerreChains:
    """One-step chains of the scalar Laguerre measure, where every factor is known in closed form."""

    def test_left_factor(self, laguerre: LaguerreFirstKindMeasure):
        chain = run_chain(laguerre, Side.LEFT, 1, _N_MAX)
        assert (chain.K, chain.N) == (1, 6)
        factor = chain.factor(1)
        for n in range(chain.N - 1):
            assert factor[n + 1, n] == n + 1
        assert chain.bidiagonality == (0,)
        assert chain.lowers == chain.factors
        assert chain.uppers == ()

    def test_right_factor(self, laguerre: LaguerreFirstKindMeasure):
        chain = run_chain(laguerre, Side.RIGHT, 1, _N_MAX)
        for n in range(chain.N - 1):
            assert chain.factor(1)[n, n + 1] == n + 1
            assert chain.rescaled_factor(1)[n, n + 1] == Fraction(1, n + 1)

    def test_transformed_stage(self, laguerre: LaguerreFirstKindMeasure):
        """Stage 1 is the Laguerre measure with α = 1."""
        stage = run_chain(laguerre, Side.LEFT, 1, _N_MAX).stage(1)
        assert stage.factors.D == tuple(math.factorial(n) * math.factorial(n + 1) for n in range(6))
        assert stage.factors.L_unit[1, :2].tolist() == [-2, 1]
        assert stage.factors.L_unit[2, :3].tolist() == [6, -6, 1]
        assert stage.measure.params.alpha == (1,)

    @pytest.mark.parametrize(
        ('side', 'n', 'expected'),
        [
            {'side': Side.LEFT, 'n': 0, 'expected': (1, 1, 1)}.values(),
            {'side': Side.RIGHT, 'n': 1, 'expected': (2, 2, 2)}.values(),
            {'side': Side.LEFT, 'n': 4, 'expected': (5, 5, 5)}.values(),
        ]
    )
    def test_entry_formulas(self, laguerre: LaguerreFirstKindMeasure, side: Side, n: int, expected):
        chain = run_chain(laguerre, side, 1, _N_MAX)
        assert entry_formulas(chain, 1, n) == expected
        assert lc_ratio(chain, 1, n) == expected[0]

    def test_entry_bounds(self, laguerre: LaguerreFirstKindMeasure):
        chain = run_chain(laguerre, Side.LEFT, 1, _N_MAX)
        with pytest.raises(IndexOutOfWindowError):
            entry_formulas(chain, 2, 0)
        with pytest.raises(IndexOutOfWindowError):
            entry_formulas(chain, 1, chain.N - 1)
        with pytest.raises(IndexOutOfWindowError):
            chain.stage(2)

    def test_theorem(self, laguerre: LaguerreFirstKindMeasure):
        left = run_chain(laguerre, Side.LEFT, 1, _N_MAX)
        right = run_chain(laguerre, Side.RIGHT, 1, _N_MAX)
        T_left, residual_left = assemble_T(left, right, Side.LEFT, _N_MAX)
        T_right, residual_right = assemble_T(left, right, Side.RIGHT, _N_MAX)
        assert residual_left == 0
        assert residual_right == 0
        assert T_left.entry(3, 3) == 7
        assert T_left.entry(3, 2) == 9
        assert T_right.entry(2, 3) == 9
        assert chain_meeting_residual(left, right) == 0

    def test_darboux(self, laguerre: LaguerreFirstKindMeasure):
        """One step maps the α = 0 recurrence to the α = 1 one: ``b_n = 2n+2``, ``c_{n+1} = (n+1)(n+2)``."""
        left = run_chain(laguerre, Side.LEFT, 1, _N_MAX)
        right = run_chain(laguerre, Side.RIGHT, 1, _N_MAX)
        permuted, permuted_residual = darboux_permuted(left, right, Side.LEFT, 1, _N_MAX)
        conjugated, conjugated_residual = darboux(left, build_T(left.base, Side.LEFT, _N_MAX), 1)
        assert permuted_residual == 0
        assert conjugated_residual == 0
        assert conjugated.n_max == _N_MAX - 1
        assert permuted.entry(0, 0) == 2
        for n in range(_N_MAX):
            assert permuted.entry(n, n) == 2 * n + 2
            assert permuted.entry(n + 1, n) == (n + 1) * (n + 2)
        assert (conjugated.matrix == permuted.matrix[:_N_MAX, :_N_MAX]).all()

    def test_darboux_step_zero(self, laguerre: LaguerreFirstKindMeasure):
        chain = run_chain(laguerre, Side.RIGHT, 1, _N_MAX)
        base = build_T(chain.base, Side.RIGHT, _N_MAX)
        same, residual = darboux(chain, base, 0)
        assert same is base
        assert residual == 0
        with pytest.raises(ChainMismatchError):
            darboux(chain, build_T(chain.base, Side.LEFT, _N_MAX), 1)
        with pytest.raises(IndexOutOfWindowError):
            darboux(chain, base, 2)

    def test_corollary_order(self, laguerre: LaguerreFirstKindMeasure):
        left = corollary_order_report(run_chain(laguerre, Side.LEFT, 1, _N_MAX))
        right = corollary_order_report(run_chain(laguerre, Side.RIGHT, 1, _N_MAX))
        assert left[0]['kind'] == 'L'
        assert 'previous_times_inverse' in left[0]['matching']
        assert right[0]['kind'] == 'U'
        assert 'inverse_times_previous' in right[0]['matching']

    def test_parameter_level(self, laguerre: LaguerreFirstKindMeasure, rational_ctx: PrecisionContext):
        assert parameter_level_residual(run_chain(laguerre, Side.LEFT, 1, _N_MAX)) == 0
        moments_only = run_chain(FactorialMoments(p=1, q=1, ctx=rational_ctx), Side.LEFT, 1, _N_MAX)
        assert moments_only.stage(1).measure is None
        assert parameter_level_residual(moments_only) is None
        assert triple_equality_residual(moments_only) == 0

    def test_remainder(self):
        assert [remainder(n, 3) for n in range(5)] == [0, 1, 2, 0, 1]


class TestChainErrors:
    """Invalid chains and chains that cannot be combined."""

    def test_negative_steps(self, laguerre: LaguerreFirstKindMeasure):
        with pytest.raises(InvalidArgumentsError):
            run_chain(laguerre, Side.LEFT, -1, _N_MAX)

    def test_singular_stage(self, rational_ctx: PrecisionContext):
        """The point mass at 0 disappears after one step and leaves three points for four pivots."""
        mm = discrete_measure(rational_ctx, ['0', '1', '2', '3'], [[['1']], [['1']], [['1']], [['1']]])
        with pytest.raises(SingularMinorError) as exc_info:
            run_chain(mm, Side.LEFT, 1, 2)
        assert exc_info.value.stage == 1
        assert exc_info.value.index == 3
        assert str(exc_info.value) == 'singular leading principal minor at stage 1, pivot 3'

    def test_wrong_step_count(self, laguerre: LaguerreFirstKindMeasure):
        left = run_chain(laguerre, Side.LEFT, 0, _N_MAX)
        right = run_chain(laguerre, Side.RIGHT, 1, _N_MAX)
        with pytest.raises(ChainMismatchError):
            assemble_T(left, right, Side.LEFT, _N_MAX)

    def test_swapped_sides(self, laguerre: LaguerreFirstKindMeasure):
        left = run_chain(laguerre, Side.LEFT, 1, _N_MAX)
        right = run_chain(laguerre, Side.RIGHT, 1, _N_MAX)
        with pytest.raises(ChainMismatchError):
            assemble_T(right, left, Side.LEFT, _N_MAX)

    def test_different_measures(self, laguerre: LaguerreFirstKindMeasure, rational_ctx: PrecisionContext):
        other = LaguerreFirstKindMeasure(alpha=[1], beta=[0], ctx=rational_ctx)
        left = run_chain(laguerre, Side.LEFT, 1, _N_MAX)
        right = run_chain(other, Side.RIGHT, 1, _N_MAX)
        with pytest.raises(ChainMismatchError):
            assemble_T(left, right, Side.RIGHT, _N_MAX)

    def test_window_beyond_chains(self, laguerre: LaguerreFirstKindMeasure):
        left = run_chain(laguerre, Side.LEFT, 1, _N_MAX)
        right = run_chain(laguerre, Side.RIGHT, 1, _N_MAX)
        with pytest.raises(WindowTooSmallError):
            assemble_T(left, right, Side.LEFT, _N_MAX + 1)


class TestIdentitiesExact:
    """Every chain identity holds with zero residual in exact arithmetic."""

    def test_lc_ratio_matches_entries(self, laguerre: LaguerreFirstKindMeasure):
        for side in Side:
            chain = run_chain(laguerre, side, 1, _N_MAX)
            assert triple_equality_residual(chain) == 0
            assert lc_ratio_residual(chain) == 0

    def test_lc_tables_built_once_per_stage(self, laguerre: LaguerreFirstKindMeasure):
        chain = run_chain(laguerre, Side.LEFT, 1, _N_MAX)
        first = [stage.lc_table for stage in chain.stages]
        lc_ratio(chain, 1, 0)
        lc_ratio(chain, 1, 1)
        assert all(stage.lc_table is table for stage, table in zip(chain.stages, first))
