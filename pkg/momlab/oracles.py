"""
Independent computations used to cross-check the elimination path.

Nothing here touches the Gauss–Borel factors: polynomials come from solving their defining
linear systems directly and three-term recurrences from the Stieltjes iteration on moments.
"""
from typing import List, Sequence, Tuple

from momlab.errors import InvalidArgumentsError, SingularSystemError
from momlab.exporter import OracleReport
from momlab.gaussborel import PolynomialSide, PolynomialTable, Side
from momlab.measures import MeasureMatrix
from momlab.momentmatrix import build
from momlab.recurrence import BandedRecurrence
from momlab.scalars import Matrix, PrecisionContext, Scalar
from momlab.utils import get_logger

Components = Tuple[Tuple[Scalar, ...], ...]
Moments = Sequence[Scalar]


def _solve_exact(system: Matrix, rhs: List[Scalar]) -> List[Scalar]:
    # Gauss–Jordan with row exchanges on exact fractions
    size = len(rhs)
    work = [[system[row, col] for col in range(size)] + [rhs[row]] for row in range(size)]
    for col in range(size):
        pivot_row = next((row for row in range(col, size) if work[row][col] != 0), None)
        if pivot_row is None:
            raise SingularSystemError(f'the {size}×{size} system is singular at column {col}')
        work[col], work[pivot_row] = work[pivot_row], work[col]
        pivot = work[col][col]
        work[col] = [value / pivot for value in work[col]]
        for row in range(size):
            if row != col and work[row][col] != 0:
                factor = work[row][col]
                work[row] = [value - factor * lead for value, lead in zip(work[row], work[col])]
    return [work[row][size] for row in range(size)]


def _solve_bigfloat(system: Matrix, rhs: List[Scalar], ctx: PrecisionContext) -> List[Scalar]:
    size = len(rhs)
    matrix = ctx.mp.matrix([[system[row, col] for col in range(size)] for row in range(size)])
    try:
        solution = ctx.mp.lu_solve(matrix, ctx.mp.matrix(rhs))
    except ZeroDivisionError as exc:
        raise SingularSystemError(f'the {size}×{size} system is numerically singular') from exc
    return [solution[row] for row in range(size)]


def solve_linear(system: Matrix, rhs: List[Scalar], ctx: PrecisionContext) -> List[Scalar]:
    """Solve a square system with pivoting, exactly in rational mode."""
    if ctx.is_rational:
        return _solve_exact(system, rhs)
    return _solve_bigfloat(system, rhs, ctx)


def solve_polynomial_direct(mm: MeasureMatrix, n: int, side: PolynomialSide, normalization: Side) -> Components:
    """
    Components of the n-th polynomial from its orthogonality conditions and normalization.

    The unknowns are the n+1 coefficients in step-line order. The n orthogonality conditions
    are completed either by fixing the leading coefficient of the dominant component to 1
    (left-normalized B, right-normalized A) or by the biorthogonality condition against the
    n-th dual polynomial (the other two tables).

    Raises:
        SingularSystemError: the moment system of size n+1 is singular.
    """
    side = PolynomialSide(side)
    normalization = Side(normalization)
    if n < 0:
        raise InvalidArgumentsError(f'polynomial index must be nonnegative, got {n}')
    ctx = mm.ctx
    size = n + 1
    moments = build(mm, size, size).entries
    system = moments if side is PolynomialSide.A else moments.T.copy()
    rhs = [ctx.zero] * size
    rhs[n] = ctx.one

    monic = (side is PolynomialSide.A) is (normalization is Side.RIGHT)
    if monic:
        system = system.copy()
        system[n, :] = system[n, :] * ctx.zero
        system[n, n] = ctx.one
    solution = solve_linear(system, rhs, ctx)

    components = mm.p if side is PolynomialSide.A else mm.q
    return tuple(
        tuple(solution[index] for index in range(c, size, components))
        for c in range(components)
    )


def compare_polynomials(t: PolynomialTable, mm: MeasureMatrix, n_max: int) -> OracleReport:
    """Largest coefficient deviation between a table and the direct solves for ``n <= n_max``."""
    ctx = t.ctx
    worst = ctx.zero
    for n in range(min(n_max + 1, t.N)):
        direct = solve_polynomial_direct(mm, n, t.side, t.normalization)
        for extracted, solved in zip(t.coeffs[n], direct):
            worst = max(worst, ctx.max_abs(first - second for first, second in zip(extracted, solved)))
    subject = f'polynomials {t.side.value} ({t.normalization.value}) up to {n_max}'
    return OracleReport(subject=subject, max_abs_deviation=worst, passed=ctx.tolerates(worst))


def _inner(first: Sequence[Scalar], second: Sequence[Scalar], moments: Moments, ctx: PrecisionContext) -> Scalar:
    total = ctx.zero
    for i, a in enumerate(first):
        for j, b in enumerate(second):
            total += a * b * moments[i + j]
    return total


def stieltjes_coefficients(mm: MeasureMatrix, count: int) -> Tuple[Tuple[Scalar, ...], Tuple[Scalar, ...]]:
    """
    Monic three-term recurrence coefficients ``b_0..b_{count-1}`` and ``c_0..c_{count-1}``.

    Runs the Stieltjes iteration ``π_{k+1} = (x - b_k) π_k - c_k π_{k-1}`` with inner products
    evaluated from the moments of a scalar measure; ``c_0 = 0``.

    Raises:
        InvalidArgumentsError: the measure is not scalar (p = q = 1).
    """
    if mm.p != 1 or mm.q != 1:
        raise InvalidArgumentsError(f'the Stieltjes iteration needs a scalar measure, got p={mm.p}, q={mm.q}')
    ctx = mm.ctx
    moments = [mm.moment(1, 1, order) for order in range(2 * count + 1)]
    previous: List[Scalar] = []
    current: List[Scalar] = [ctx.one]
    previous_norm = ctx.one
    diagonal, subdiagonal = [], []
    for k in range(count):
        norm = _inner(current, current, moments, ctx)
        shifted = [ctx.zero, *current]
        b_k = _inner(shifted, current, moments, ctx) / norm
        c_k = ctx.zero if k == 0 else norm / previous_norm
        diagonal.append(b_k)
        subdiagonal.append(c_k)
        following = list(shifted)
        for index, value in enumerate(current):
            following[index] -= b_k * value
        for index, value in enumerate(previous):
            following[index] -= c_k * value
        previous, current, previous_norm = current, following, norm
    get_logger().debug('Stieltjes iteration produced %s coefficient pairs', count)
    return tuple(diagonal), tuple(subdiagonal)


def classical_tridiagonal(family: MeasureMatrix, n: int) -> Tuple[Scalar, Scalar]:
    """
    Coefficients ``(b_n, c_n)`` of ``x π_n = π_{n+1} + b_n π_n + c_n π_{n-1}`` for a scalar measure.

    Laguerre measures come from ``LaguerreFirstKindMeasure([α], [0])`` and shifted Jacobi ones
    from ``JacobiPineiroMeasure([α], [0], γ)``.
    """
    if n < 0:
        raise InvalidArgumentsError(f'recurrence index must be nonnegative, got {n}')
    diagonal, subdiagonal = stieltjes_coefficients(family, n + 1)
    return diagonal[n], subdiagonal[n]


def compare_recurrence(T: BandedRecurrence, mm: MeasureMatrix) -> OracleReport:
    """Largest deviation of a left-normalized tridiagonal window from the Stieltjes coefficients."""
    ctx = T.ctx
    if T.side is not Side.LEFT:
        raise InvalidArgumentsError('the Stieltjes coefficients describe the left normalization')
    diagonal, subdiagonal = stieltjes_coefficients(mm, T.n_max + 1)
    deviations = []
    for n in range(T.n_max + 1):
        deviations.append(T.matrix[n, n] - diagonal[n])
        if n < T.n_max:
            deviations.append(T.matrix[n + 1, n] - subdiagonal[n + 1])
            deviations.append(T.matrix[n, n + 1] - ctx.one)
    worst = ctx.max_abs(deviations)
    return OracleReport(
        subject=f'three-term recurrence up to {T.n_max}',
        max_abs_deviation=worst,
        passed=ctx.tolerates(worst),
    )
