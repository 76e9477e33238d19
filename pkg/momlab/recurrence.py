"""The (p,q)-banded recurrence matrix ``T = L Λ^q L^(-1) = U^(-1) (Λ^p)^⊤ U``."""
from dataclasses import dataclass
from typing import Iterator, Sequence

from momlab.errors import IndexOutOfWindowError, InvalidArgumentsError, WindowTooSmallError
from momlab.gaussborel import (
    GaussBorelFactors, PolynomialSide, PolynomialTable, Side, lower_triangular_inverse, scale_cols,
    scale_rows, upper_triangular_inverse
)
from momlab.momentmatrix import Triplet
from momlab.scalars import Matrix, PrecisionContext, Scalar


@dataclass(frozen=True, eq=False)
class BandedRecurrence:
    """
    Window ``0 <= n, m <= n_max`` of the recurrence matrix in one normalization.

    `matrix` holds the full window; entries outside the band ``n - p <= m <= n + q`` are
    kept so the band structure can be verified rather than assumed.
    """

    side: Side
    n_max: int
    p: int
    q: int
    matrix: Matrix
    ctx: PrecisionContext

    def entry(self, n: int, m: int) -> Scalar:
        if not (0 <= n <= self.n_max and 0 <= m <= self.n_max):
            raise IndexOutOfWindowError(f'({n}, {m}) is outside the recurrence window {self.n_max}')
        return self.matrix[n, m]

    def in_band(self, n: int, m: int) -> bool:
        return n - self.p <= m <= n + self.q

    def band_entries(self) -> Iterator[Triplet]:
        """In-band entries sorted by (row, column)."""
        for n in range(self.n_max + 1):
            for m in range(max(0, n - self.p), min(self.n_max, n + self.q) + 1):
                yield n, m, self.matrix[n, m]

    def restricted(self, n_max: int) -> 'BandedRecurrence':
        """The leading window up to `n_max`."""
        if not 0 <= n_max <= self.n_max:
            raise IndexOutOfWindowError(f'cannot restrict a window of {self.n_max} to {n_max}')
        return BandedRecurrence(
            side=self.side,
            n_max=n_max,
            p=self.p,
            q=self.q,
            matrix=self.matrix[:n_max + 1, :n_max + 1].copy(),
            ctx=self.ctx,
        )


def _check_window(f: GaussBorelFactors, n_max: int) -> None:
    if n_max < 0:
        raise InvalidArgumentsError(f'n_max must be nonnegative, got {n_max}')
    needed = n_max + max(f.p, f.q) + 1
    if f.N < needed:
        raise WindowTooSmallError(f'a recurrence window of {n_max} needs factors of size {needed}, got {f.N}')


def build_T(f: GaussBorelFactors, side: Side, n_max: int) -> BandedRecurrence:
    """
    Recurrence matrix ``L Λ^q L^(-1)`` with ``L = L_L`` (left) or ``L_R`` (right).

    Raises:
        WindowTooSmallError: ``f.N < n_max + max(p, q) + 1``.
    """
    side = Side(side)
    _check_window(f, n_max)
    lower = f.lower(side)
    inverse = lower_triangular_inverse(lower, f.ctx)
    size = n_max + 1
    matrix = lower[:size, :f.N - f.q] @ inverse[f.q:, :size]
    return BandedRecurrence(side=side, n_max=n_max, p=f.p, q=f.q, matrix=matrix, ctx=f.ctx)


def build_T_upper(f: GaussBorelFactors, side: Side, n_max: int) -> BandedRecurrence:
    """Recurrence matrix through the upper factor, ``U^(-1) (Λ^p)^⊤ U``."""
    side = Side(side)
    _check_window(f, n_max)
    upper = f.upper(side)
    inverse = upper_triangular_inverse(upper, f.ctx)
    size = n_max + 1
    matrix = inverse[:size, f.p:] @ upper[:f.N - f.p, :size]
    return BandedRecurrence(side=side, n_max=n_max, p=f.p, q=f.q, matrix=matrix, ctx=f.ctx)


def band_residual(T: BandedRecurrence) -> Scalar:
    """Largest entry outside the (p,q) band."""
    outside = (
        T.matrix[n, m]
        for n in range(T.n_max + 1)
        for m in range(T.n_max + 1)
        if not T.in_band(n, m)
    )
    return T.ctx.max_abs(outside)


def conjugation_residual(T_left: BandedRecurrence, T_right: BandedRecurrence, D: Sequence[Scalar]) -> Scalar:
    """Largest deviation of ``T_R`` from ``D^(-1) T_L D`` on the common window."""
    ctx = T_left.ctx
    size = min(T_left.n_max, T_right.n_max) + 1
    inverse = [ctx.one / value for value in D[:size]]
    conjugated = scale_cols(scale_rows(T_left.matrix[:size, :size], inverse), D[:size])
    return ctx.max_abs((conjugated - T_right.matrix[:size, :size]).flat)


def eigen_residual(T: BandedRecurrence, t: PolynomialTable, sample_points: Sequence[Scalar]) -> Scalar:
    """
    Largest violation of ``T B(x) = x B(x)`` (B tables) or ``A(x) T = x A(x)`` (A tables).

    Only rows (B) or columns (A) whose whole band lies inside the window are checked.
    """
    ctx = T.ctx
    if t.N <= T.n_max:
        raise IndexOutOfWindowError(f'a table of {t.N} polynomials cannot cover the window {T.n_max}')
    worst = ctx.zero
    for point in sample_points:
        x = ctx.coerce(point)
        values = [t.evaluate(index, x) for index in range(T.n_max + 1)]
        if t.side is PolynomialSide.B:
            for n in range(T.n_max - T.q + 1):
                for c in range(t.components):
                    total = ctx.zero
                    for m in range(T.n_max + 1):
                        total += T.matrix[n, m] * values[m][c]
                    worst = max(worst, abs(total - x * values[n][c]))
            continue
        for m in range(T.n_max - T.p + 1):
            for c in range(t.components):
                total = ctx.zero
                for n in range(T.n_max + 1):
                    total += values[n][c] * T.matrix[n, m]
                worst = max(worst, abs(total - x * values[m][c]))
    return worst
