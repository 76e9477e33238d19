"""
Gauss–Borel factorization ``M = L_L^(-1) D U_R^(-1)`` and the mixed multiple orthogonal polynomials.

Elimination never pivots: row or column exchanges would break the correspondence between
the triangular factors and the orthogonal polynomials, so a negligible pivot is an error.
"""
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Sequence, Tuple

from momlab.errors import (
    IndexOutOfWindowError, InsufficientTruncationError, NearSingularMinorError, SingularMinorError
)
from momlab.measures import MeasureMatrix
from momlab.momentmatrix import MomentMatrix
from momlab.scalars import Matrix, PrecisionContext, Scalar
from momlab.utils import ceil_div, get_logger

Coefficients = Tuple[Scalar, ...]


class Side(str, Enum):
    """Left (unit lower factor) or right (unit upper factor) normalization."""

    LEFT = 'left'
    RIGHT = 'right'


class PolynomialSide(str, Enum):
    """Row polynomials B (q components) or column polynomials A (p components)."""

    B = 'B'
    A = 'A'


def lower_triangular_inverse(lower: Matrix, ctx: PrecisionContext) -> Matrix:
    """Inverse of a nonsingular lower triangular matrix by forward substitution."""
    size = lower.shape[0]
    inverse = ctx.zeros(size, size)
    for col in range(size):
        inverse[col, col] = ctx.one / lower[col, col]
        for row in range(col + 1, size):
            total = ctx.zero
            for k in range(col, row):
                total += lower[row, k] * inverse[k, col]
            inverse[row, col] = -total / lower[row, row]
    return inverse


def upper_triangular_inverse(upper: Matrix, ctx: PrecisionContext) -> Matrix:
    """Inverse of a nonsingular upper triangular matrix."""
    return lower_triangular_inverse(upper.T, ctx).T


def scale_rows(matrix: Matrix, factors: Sequence[Scalar]) -> Matrix:
    """``diag(factors) @ matrix``."""
    scaled = matrix.copy()
    for row, factor in enumerate(factors[:matrix.shape[0]]):
        scaled[row, :] = scaled[row, :] * factor
    return scaled


def scale_cols(matrix: Matrix, factors: Sequence[Scalar]) -> Matrix:
    """``matrix @ diag(factors)``."""
    scaled = matrix.copy()
    for col, factor in enumerate(factors[:matrix.shape[1]]):
        scaled[:, col] = scaled[:, col] * factor
    return scaled


@dataclass(frozen=True, eq=False)
class GaussBorelFactors:
    """
    Unit lower ``L_L``, diagonal ``D`` and unit upper ``U_R`` with ``L_L M U_R = D`` on an N×N window.

    Right and left normalizations derive from them: ``L_R = D^(-1) L_L`` and ``U_L = U_R D^(-1)``.
    """

    N: int
    L_unit: Matrix
    D: Tuple[Scalar, ...]
    U_unit: Matrix
    p: int
    q: int
    ctx: PrecisionContext

    @cached_property
    def D_inverse(self) -> Tuple[Scalar, ...]:
        return tuple(self.ctx.one / value for value in self.D)

    def lower(self, normalization: Side) -> Matrix:
        """``L_L`` or ``L_R``."""
        return self.L_unit if normalization is Side.LEFT else self.lower_right

    def upper(self, normalization: Side) -> Matrix:
        """``U_L`` or ``U_R``."""
        return self.upper_left if normalization is Side.LEFT else self.U_unit

    @cached_property
    def lower_right(self) -> Matrix:
        return scale_rows(self.L_unit, self.D_inverse)

    @cached_property
    def upper_left(self) -> Matrix:
        return scale_cols(self.U_unit, self.D_inverse)

    def leading(self, size: int) -> 'GaussBorelFactors':
        """
        Factorization of the leading size×size principal submatrix.

        Leading blocks of the triangular factors are the factors of the leading block.
        """
        if not 1 <= size <= self.N:
            raise IndexOutOfWindowError(f'cannot read a window of {size} from a factorization of size {self.N}')
        return GaussBorelFactors(
            N=size,
            L_unit=self.L_unit[:size, :size].copy(),
            D=self.D[:size],
            U_unit=self.U_unit[:size, :size].copy(),
            p=self.p,
            q=self.q,
            ctx=self.ctx,
        )


def factorize(M: MomentMatrix, N: int) -> GaussBorelFactors:
    """
    Gauss–Borel factorization of the leading N×N block of `M` by elimination without pivoting.

    Raises:
        InsufficientTruncationError: `M` is smaller than N×N.
        SingularMinorError: an exact zero pivot (rational mode) at the reported index.
        NearSingularMinorError: a pivot below ``pivot_tol`` times the largest entry of the
            current Schur complement (bigfloat mode).
    """
    if N < 1 or N > min(M.rows, M.cols):
        raise InsufficientTruncationError(f'cannot factorize a {N}×{N} window of a {M.rows}×{M.cols} matrix')
    ctx = M.ctx
    work = M.entries[:N, :N].copy()
    multipliers = ctx.identity(N)

    for k in range(N):
        pivot = work[k, k]
        scale = ctx.zero if ctx.is_rational else ctx.max_abs(work[k:, k:].flat)
        if ctx.is_negligible_pivot(pivot, scale):
            if ctx.is_rational:
                raise SingularMinorError(index=k)
            raise NearSingularMinorError(index=k)
        for row in range(k + 1, N):
            factor = work[row, k] / pivot
            multipliers[row, k] = factor
            work[row, k:] = work[row, k:] - work[k, k:] * factor
            work[row, k] = ctx.zero

    diagonal = tuple(work[k, k] for k in range(N))
    unit_upper = scale_rows(work, [ctx.one / value for value in diagonal])
    get_logger().debug('factorized a %s×%s window', N, N)
    return GaussBorelFactors(
        N=N,
        L_unit=lower_triangular_inverse(multipliers, ctx),
        D=diagonal,
        U_unit=upper_triangular_inverse(unit_upper, ctx),
        p=M.p,
        q=M.q,
        ctx=ctx,
    )


@dataclass(frozen=True)
class PolynomialTable:
    """
    Components of the mixed multiple orthogonal polynomials B or A.

    ``coeffs[n][c][j]`` is the coefficient of ``x^j`` in component ``c+1`` of the n-th
    polynomial; component ``c+1`` of index n has the coefficients ``j`` with ``j·r + c <= n``,
    where r is q for B and p for A.
    """

    side: PolynomialSide
    normalization: Side
    p: int
    q: int
    coeffs: Tuple[Tuple[Coefficients, ...], ...]
    ctx: PrecisionContext

    @property
    def N(self) -> int:
        return len(self.coeffs)

    @property
    def components(self) -> int:
        return self.q if self.side is PolynomialSide.B else self.p

    def component(self, n: int, c: int) -> Coefficients:
        """Ascending coefficients of component `c` (1-based) of the n-th polynomial."""
        self._check_index(n)
        return self.coeffs[n][c - 1]

    def dominant_component(self, n: int) -> int:
        """Component carrying the step-line leading coefficient of the n-th polynomial."""
        return n % self.components + 1

    def evaluate(self, n: int, x: Scalar) -> Tuple[Scalar, ...]:
        """Values of every component of the n-th polynomial at `x`."""
        self._check_index(n)
        values = []
        for coefficients in self.coeffs[n]:
            total = self.ctx.zero
            for coefficient in reversed(coefficients):
                total = total * x + coefficient
            values.append(total)
        return tuple(values)

    def _check_index(self, n: int) -> None:
        if not 0 <= n < self.N:
            raise IndexOutOfWindowError(f'polynomial index {n} is outside a table of {self.N}')


def polynomials(f: GaussBorelFactors, side: PolynomialSide, normalization: Side) -> PolynomialTable:
    """Read the polynomial table B (rows of L) or A (columns of U) in the requested normalization."""
    side = PolynomialSide(side)
    normalization = Side(normalization)
    table = []
    if side is PolynomialSide.B:
        lower = f.lower(normalization)
        for n in range(f.N):
            table.append(tuple(
                tuple(lower[n, index] for index in range(b, n + 1, f.q))
                for b in range(f.q)
            ))
    else:
        upper = f.upper(normalization)
        for n in range(f.N):
            table.append(tuple(
                tuple(upper[index, n] for index in range(a, n + 1, f.p))
                for a in range(f.p)
            ))
    return PolynomialTable(side=side, normalization=normalization, p=f.p, q=f.q, coeffs=tuple(table), ctx=f.ctx)


def leading_coefficient(t: PolynomialTable, n: int) -> Scalar:
    """
    Leading coefficient of the step-line dominant component of the n-th polynomial.

    In the table's own normalization this is the diagonal entry of the triangular factor:
    1 for left-normalized B and right-normalized A, ``1/D_n`` for the other two tables.
    """
    return t.component(n, t.dominant_component(n))[-1]


def orthogonality_residual(t: PolynomialTable, mm: MeasureMatrix) -> Scalar:
    """Largest violation of the step-line orthogonality conditions of the table against `mm`."""
    ctx = t.ctx
    worst = ctx.zero
    if t.side is PolynomialSide.A:
        for n in range(t.N):
            for b in range(1, t.q + 1):
                for power in range(ceil_div(n - b + 1, t.q)):
                    total = ctx.zero
                    for a, coefficients in enumerate(t.coeffs[n], start=1):
                        for j, coefficient in enumerate(coefficients):
                            total += coefficient * mm.moment(b, a, power + j)
                    worst = max(worst, abs(total))
        return worst

    for n in range(t.N):
        for a in range(1, t.p + 1):
            for power in range(ceil_div(n - a + 1, t.p)):
                total = ctx.zero
                for b, coefficients in enumerate(t.coeffs[n], start=1):
                    for j, coefficient in enumerate(coefficients):
                        total += coefficient * mm.moment(b, a, power + j)
                worst = max(worst, abs(total))
    return worst


def biorthogonality_residual(f: GaussBorelFactors, M: MomentMatrix) -> Scalar:
    """Largest entry of ``L_L M U_R D^(-1) - I`` on the factorization window."""
    if M.rows < f.N or M.cols < f.N:
        raise InsufficientTruncationError(f'a {M.rows}×{M.cols} matrix does not cover a window of {f.N}')
    product = scale_cols(f.L_unit @ M.entries[:f.N, :f.N] @ f.U_unit, f.D_inverse)
    return f.ctx.max_abs((product - f.ctx.identity(f.N)).flat)


def normalization_residual(f: GaussBorelFactors, M: MomentMatrix) -> Scalar:
    """Largest deviation of ``L_R^(-1) U_R^(-1)`` and ``L_L^(-1) U_L^(-1)`` from the moment matrix."""
    ctx = f.ctx
    window = M.entries[:f.N, :f.N]
    right = lower_triangular_inverse(f.lower_right, ctx) @ upper_triangular_inverse(f.U_unit, ctx)
    left = lower_triangular_inverse(f.L_unit, ctx) @ upper_triangular_inverse(f.upper_left, ctx)
    return max(ctx.max_abs((right - window).flat), ctx.max_abs((left - window).flat))
