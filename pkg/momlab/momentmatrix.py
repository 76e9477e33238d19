"""Finite truncations of the semi-infinite moment matrix of a matrix of measures."""
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

from momlab.errors import IndexOutOfWindowError, InsufficientTruncationError, InvalidArgumentsError
from momlab.measures import MeasureMatrix
from momlab.scalars import Matrix, PrecisionContext, Scalar

Triplet = Tuple[int, int, Scalar]


def window_size(n_max: int, p: int, q: int) -> int:
    """Size of the factorization window that keeps every index up to `n_max` valid."""
    return n_max + max(p, q) + 1


def truncation_size(n_max: int, k: int, p: int, q: int) -> int:
    """Rows and columns of the moment matrix that `k` Christoffel steps over `n_max` consume."""
    return window_size(n_max, p, q) + k


def entry_indices(m: int, n: int, p: int, q: int) -> Tuple[int, int, int]:
    """Measure entry (b, a) and moment order behind the moment matrix entry (m, n)."""
    return m % q + 1, n % p + 1, m // q + n // p


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    """
    Dense rows×cols truncation of the moment matrix.

    ``entries[m, n] = moment((m mod q)+1, (n mod p)+1, ⌊m/q⌋ + ⌊n/p⌋)``.
    """

    rows: int
    cols: int
    p: int
    q: int
    entries: Matrix
    ctx: PrecisionContext

    def entry(self, m: int, n: int) -> Scalar:
        if not (0 <= m < self.rows and 0 <= n < self.cols):
            raise IndexOutOfWindowError(f'({m}, {n}) is outside a {self.rows}×{self.cols} moment matrix')
        return self.entries[m, n]

    def leading(self, rows: int, cols: Optional[int] = None) -> 'MomentMatrix':
        """Leading rows×cols submatrix."""
        cols = rows if cols is None else cols
        if rows > self.rows or cols > self.cols:
            raise InsufficientTruncationError(
                f'cannot take a {rows}×{cols} window of a {self.rows}×{self.cols} moment matrix'
            )
        return self._replace(self.entries[:rows, :cols])

    def triplets(self) -> Iterator[Triplet]:
        """Entries in row-major order."""
        for row in range(self.rows):
            for col in range(self.cols):
                yield row, col, self.entries[row, col]

    def _replace(self, entries: Matrix) -> 'MomentMatrix':
        rows, cols = entries.shape
        return MomentMatrix(rows=rows, cols=cols, p=self.p, q=self.q, entries=entries.copy(), ctx=self.ctx)


def build(mm: MeasureMatrix, rows: int, cols: int) -> MomentMatrix:
    """
    Materialize the rows×cols truncation of the moment matrix of `mm`.

    Raises:
        InvalidArgumentsError: `rows` or `cols` is not positive.
        DegreeBudgetExceededError: the truncation needs moments beyond the budget.
    """
    if rows < 1 or cols < 1:
        raise InvalidArgumentsError(f'a moment matrix needs at least one row and column, got {rows}×{cols}')
    entries = mm.ctx.zeros(rows, cols)
    for m in range(rows):
        for n in range(cols):
            b, a, order = entry_indices(m, n, mm.p, mm.q)
            entries[m, n] = mm.moment(b, a, order)
    return MomentMatrix(rows=rows, cols=cols, p=mm.p, q=mm.q, entries=entries, ctx=mm.ctx)


def build_for_window(mm: MeasureMatrix, n_max: int, k: int) -> MomentMatrix:
    """Square moment matrix sized by the truncation policy for `n_max` and `k` Christoffel steps."""
    size = truncation_size(n_max, k, mm.p, mm.q)
    return build(mm, size, size)


def shift_left(M: MomentMatrix, k: int, cols: Optional[int] = None) -> MomentMatrix:
    """
    Column shift ``M (Λ^k)^⊤``: entry (m, n) of the result is entry (m, n+k) of `M`.

    Raises:
        InsufficientTruncationError: `M` has fewer than ``cols + k`` columns.
    """
    cols = M.cols - k if cols is None else cols
    if k < 0 or cols < 1 or cols + k > M.cols:
        raise InsufficientTruncationError(f'shifting {M.cols} columns by {k} leaves no room for {cols} columns')
    return M._replace(M.entries[:, k:k + cols])


def shift_right(M: MomentMatrix, k: int, rows: Optional[int] = None) -> MomentMatrix:
    """
    Row shift ``Λ^k M``: entry (m, n) of the result is entry (m+k, n) of `M`.

    Raises:
        InsufficientTruncationError: `M` has fewer than ``rows + k`` rows.
    """
    rows = M.rows - k if rows is None else rows
    if k < 0 or rows < 1 or rows + k > M.rows:
        raise InsufficientTruncationError(f'shifting {M.rows} rows by {k} leaves no room for {rows} rows')
    return M._replace(M.entries[k:k + rows, :])


def hankel_residual(M: MomentMatrix) -> Scalar:
    """Largest deviation between ``Λ_[q] M`` and ``M Λ_[p]^⊤`` on their common window."""
    if M.rows < M.q + 1 or M.cols < M.p + 1:
        raise InsufficientTruncationError(
            f'a {M.rows}×{M.cols} matrix is too small to compare shifts by q={M.q} and p={M.p}'
        )
    rows, cols = M.rows - M.q, M.cols - M.p
    shifted_rows = shift_right(M, M.q).entries[:rows, :cols]
    shifted_cols = shift_left(M, M.p).entries[:rows, :cols]
    return M.ctx.max_abs((shifted_rows - shifted_cols).flat)
