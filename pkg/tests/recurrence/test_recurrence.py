from fractions import Fraction

import pytest

from momlab.errors import IndexOutOfWindowError, InvalidArgumentsError, WindowTooSmallError
from momlab.gaussborel import GaussBorelFactors, PolynomialSide, Side, factorize, polynomials
from momlab.measures import JacobiPineiroMeasure, LaguerreFirstKindMeasure, MeasureMatrix
from momlab.momentmatrix import build, window_size
from momlab.recurrence import band_residual, build_T, build_T_upper, conjugation_residual, eigen_residual
from momlab.scalars import PrecisionContext
from tests.components import discrete_measure, random_discrete_system

_N_MAX = 6
_SAMPLE_POINTS = ('0', '1/2', '1', '-3')


def _factors(mm: MeasureMatrix, n_max: int) -> GaussBorelFactors:
    N = window_size(n_max, mm.p, mm.q)
    return factorize(build(mm, N, N), N)


class TestBuildT:
    """Recurrence matrices of measures with known three-term recurrences."""

    def test_laguerre_left(self, laguerre: LaguerreFirstKindMeasure):
        T = build_T(_factors(laguerre, _N_MAX), Side.LEFT, _N_MAX)
        for n in range(_N_MAX + 1):
            assert T.entry(n, n) == 2 * n + 1
        for n in range(_N_MAX):
            assert T.entry(n + 1, n) == (n + 1) ** 2
            assert T.entry(n, n + 1) == 1
        assert band_residual(T) == 0

    def test_laguerre_right(self, laguerre: LaguerreFirstKindMeasure):
        """The right normalization moves the squares to the superdiagonal."""
        T = build_T(_factors(laguerre, _N_MAX), Side.RIGHT, _N_MAX)
        for n in range(_N_MAX):
            assert T.entry(n, n + 1) == (n + 1) ** 2
            assert T.entry(n + 1, n) == 1

    def test_shifted_legendre(self, legendre: JacobiPineiroMeasure):
        T = build_T(_factors(legendre, 3), Side.LEFT, 3)
        assert T.entry(0, 0) == Fraction(1, 2)
        assert T.entry(1, 1) == Fraction(1, 2)
        assert T.entry(1, 0) == Fraction(1, 12)
        assert T.entry(2, 1) == Fraction(1, 15)

    def test_normalizations_are_conjugate(self, laguerre: LaguerreFirstKindMeasure):
        f = _factors(laguerre, _N_MAX)
        left = build_T(f, Side.LEFT, _N_MAX)
        right = build_T(f, Side.RIGHT, _N_MAX)
        assert conjugation_residual(left, right, f.D) == 0

    @pytest.mark.parametrize(
        ('seed', 'p', 'q'),
        [
            {'seed': 11, 'p': 2, 'q': 1}.values(),
            {'seed': 12, 'p': 1, 'q': 2}.values(),
            {'seed': 13, 'p': 2, 'q': 2}.values(),
        ]
    )
    def test_mixed_band_and_eigen_relations(self, rational_ctx: PrecisionContext, seed: int, p: int, q: int):
        """Both constructions agree, the band is exact and the polynomials are eigenvectors."""
        nodes, weights = random_discrete_system(seed=seed, p=p, q=q, nodes=10)
        mm = discrete_measure(rational_ctx, nodes, weights)
        f = _factors(mm, 5)
        for side in Side:
            T = build_T(f, side, 5)
            assert band_residual(T) == 0
            assert (T.matrix == build_T_upper(f, side, 5).matrix).all()
            for polynomial_side in PolynomialSide:
                assert eigen_residual(T, polynomials(f, polynomial_side, side), _SAMPLE_POINTS) == 0

    def test_bigfloat_band(self, jacobi_pineiro: JacobiPineiroMeasure):
        ctx = jacobi_pineiro.ctx
        f = _factors(jacobi_pineiro, _N_MAX)
        T = build_T(f, Side.LEFT, _N_MAX)
        assert ctx.tolerates(band_residual(T))
        assert ctx.tolerates(eigen_residual(T, polynomials(f, PolynomialSide.B, Side.LEFT), _SAMPLE_POINTS))

    def test_window_too_small(self, laguerre: LaguerreFirstKindMeasure):
        f = factorize(build(laguerre, 3, 3), 3)
        with pytest.raises(WindowTooSmallError):
            build_T(f, Side.LEFT, 2)
        with pytest.raises(InvalidArgumentsError):
            build_T(f, Side.LEFT, -1)


class TestBandedRecurrence:
    """Access to the window of a recurrence matrix."""

    def test_band_entries(self, laguerre: LaguerreFirstKindMeasure):
        T = build_T(_factors(laguerre, 2), Side.LEFT, 2)
        entries = list(T.band_entries())
        assert len(entries) == 7
        assert entries[:3] == [(0, 0, 1), (0, 1, 1), (1, 0, 1)]

    def test_restricted(self, laguerre: LaguerreFirstKindMeasure):
        T = build_T(_factors(laguerre, _N_MAX), Side.LEFT, _N_MAX)
        small = T.restricted(2)
        assert small.n_max == 2
        assert small.matrix.shape == (3, 3)
        assert small.entry(2, 2) == 5
        with pytest.raises(IndexOutOfWindowError):
            small.entry(3, 3)
        with pytest.raises(IndexOutOfWindowError):
            T.restricted(_N_MAX + 1)
