"""
Iterated Christoffel transformations and the bidiagonal factorization of the recurrence matrix.

A left chain factorizes ``M (Λ^k)^⊤`` for ``k = 0..K`` and yields unit lower bidiagonal
factors ``L_k = L_L^(k-1) (L_L^(k))^(-1)``; a right chain factorizes ``Λ^k M`` and yields unit
upper bidiagonal factors ``U_k = (U_R^(k))^(-1) U_R^(k-1)``. A left chain with p steps and a
right chain with q steps of the same measure assemble the recurrence matrix.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

from momlab.errors import (
    ChainMismatchError, IndexOutOfWindowError, InvalidArgumentsError, SingularMinorError, UnsupportedFamilyError,
    WindowTooSmallError
)
from momlab.gaussborel import (
    GaussBorelFactors, PolynomialSide, PolynomialTable, Side, factorize, lower_triangular_inverse, polynomials,
    scale_cols, scale_rows, upper_triangular_inverse
)
from momlab.measures import MeasureMatrix
from momlab.momentmatrix import MomentMatrix, build, shift_left, shift_right, window_size
from momlab.recurrence import BandedRecurrence, build_T
from momlab.scalars import Matrix, PrecisionContext, Scalar
from momlab.utils import get_logger

EntryFormulas = Tuple[Scalar, Scalar, Scalar]


@dataclass(frozen=True, eq=False)
class ChainStage:
    """Factorization of the k-times transformed measure; `measure` is None when the family cannot be transformed."""

    k: int
    side: Side
    factors: GaussBorelFactors
    measure: Optional[MeasureMatrix]

    @cached_property
    def lc_table(self) -> PolynomialTable:
        """Polynomial table of leading coefficient ratios, A on the left and B on the right side."""
        table_side = PolynomialSide.A if self.side is Side.LEFT else PolynomialSide.B
        return polynomials(self.factors, table_side, self.side)


@dataclass(frozen=True, eq=False)
class BidiagonalChain:
    """
    Stages ``0..K`` of one side and the bidiagonal factors between consecutive stages.

    ``factors[k-1]`` is ``L_k`` (left) or ``U_k`` (right); ``rescaled[k-1]`` is
    ``D^(-1) L_k D`` or ``D U_k D^(-1)`` with the diagonal of stage 0.
    """

    side: Side
    n_max: int
    p: int
    q: int
    moments: MomentMatrix
    stages: Tuple[ChainStage, ...]
    factors: Tuple[Matrix, ...]
    rescaled: Tuple[Matrix, ...]
    bidiagonality: Tuple[Scalar, ...]
    ctx: PrecisionContext

    @property
    def K(self) -> int:
        return len(self.factors)

    @property
    def N(self) -> int:
        return self.stages[0].factors.N

    @property
    def base(self) -> GaussBorelFactors:
        return self.stages[0].factors

    @property
    def lowers(self) -> Tuple[Matrix, ...]:
        return self.factors if self.side is Side.LEFT else ()

    @property
    def uppers(self) -> Tuple[Matrix, ...]:
        return self.factors if self.side is Side.RIGHT else ()

    def factor(self, k: int) -> Matrix:
        self._check_step(k)
        return self.factors[k - 1]

    def rescaled_factor(self, k: int) -> Matrix:
        self._check_step(k)
        return self.rescaled[k - 1]

    def stage(self, k: int) -> ChainStage:
        if not 0 <= k <= self.K:
            raise IndexOutOfWindowError(f'stage {k} is outside a chain of {self.K} steps')
        return self.stages[k]

    def _check_step(self, k: int) -> None:
        if not 1 <= k <= self.K:
            raise IndexOutOfWindowError(f'step {k} is outside a chain of {self.K} steps')


def _off_bidiagonal(matrix: Matrix, side: Side, ctx: PrecisionContext) -> Scalar:
    size = matrix.shape[0]
    deviations = []
    for row in range(size):
        for col in range(size):
            value = matrix[row, col]
            if row == col:
                deviations.append(value - ctx.one)
                continue
            neighbour = row == col + 1 if side is Side.LEFT else col == row + 1
            if not neighbour:
                deviations.append(value)
    return ctx.max_abs(deviations)


def _transform(measure: Optional[MeasureMatrix], side: Side) -> Optional[MeasureMatrix]:
    if measure is None:
        return None
    try:
        return measure.christoffel_left() if side is Side.LEFT else measure.christoffel_right()
    except UnsupportedFamilyError:
        get_logger().debug('%s has no parameter-level transformation', type(measure).__name__)
        return None


def run_chain(mm: MeasureMatrix, side: Side, K: int, n_max: int) -> BidiagonalChain:
    """
    Factorize K left or right Christoffel transformations of `mm` and extract the bidiagonal factors.

    Every stage is factorized on the window ``n_max + max(p, q) + 1`` of the same base
    moment matrix, so the factor windows do not shrink along the chain.

    Raises:
        SingularMinorError: a leading minor of stage k vanishes; the error carries the stage.
    """
    side = Side(side)
    if K < 0 or n_max < 0:
        raise InvalidArgumentsError(f'a chain needs K >= 0 and n_max >= 0, got K={K}, n_max={n_max}')
    ctx = mm.ctx
    N = window_size(n_max, mm.p, mm.q)
    moments = build(mm, N + K, N + K)

    stages: List[ChainStage] = []
    measure: Optional[MeasureMatrix] = mm
    for k in range(K + 1):
        shifted = shift_left(moments, k, cols=N) if side is Side.LEFT else shift_right(moments, k, rows=N)
        try:
            factors = factorize(shifted, N)
        except SingularMinorError as exc:
            raise exc.with_stage(k) from exc
        stages.append(ChainStage(k=k, side=side, factors=factors, measure=measure))
        if k < K:
            measure = _transform(measure, side)

    base_diagonal = stages[0].factors.D
    base_inverse = stages[0].factors.D_inverse
    factors, rescaled, bidiagonality = [], [], []
    for k in range(1, K + 1):
        previous, current = stages[k - 1].factors, stages[k].factors
        if side is Side.LEFT:
            factor = previous.L_unit @ lower_triangular_inverse(current.L_unit, ctx)
            scaled = scale_cols(scale_rows(factor, base_inverse), base_diagonal)
        else:
            factor = upper_triangular_inverse(current.U_unit, ctx) @ previous.U_unit
            scaled = scale_cols(scale_rows(factor, base_diagonal), base_inverse)
        deviation = _off_bidiagonal(factor, side, ctx)
        if not ctx.tolerates(deviation):
            get_logger().warning(
                '%s factor %s is not bidiagonal within tolerance: %s', side.value, k, ctx.to_str(deviation)
            )
        factors.append(factor)
        rescaled.append(scaled)
        bidiagonality.append(deviation)

    get_logger().info('%s Christoffel chain of %s steps factorized on a window of %s', side.value, K, N)
    return BidiagonalChain(
        side=side,
        n_max=n_max,
        p=mm.p,
        q=mm.q,
        moments=moments,
        stages=tuple(stages),
        factors=tuple(factors),
        rescaled=tuple(rescaled),
        bidiagonality=tuple(bidiagonality),
        ctx=ctx,
    )


def _check_entry(chain: BidiagonalChain, k: int, n: int) -> None:
    if not 1 <= k <= chain.K:
        raise IndexOutOfWindowError(f'step {k} is outside a chain of {chain.K} steps')
    if not 0 <= n <= chain.N - 2:
        raise IndexOutOfWindowError(f'entry index {n} is outside the window {chain.N}')


def entry_formulas(chain: BidiagonalChain, k: int, n: int) -> EntryFormulas:
    """
    Three independent evaluations of the off-diagonal entry of the k-th bidiagonal factor.

    Returns the factor entry itself, the ratio of consecutive diagonal entries of ``U_L``
    (left) or ``L_R`` (right) across stages k and k-1, and the difference of the first
    off-diagonal entries of the unit factors across the same stages.
    """
    _check_entry(chain, k, n)
    previous, current = chain.stages[k - 1].factors, chain.stages[k].factors
    if chain.side is Side.LEFT:
        return (
            chain.factors[k - 1][n + 1, n],
            current.upper_left[n, n] / previous.upper_left[n + 1, n + 1],
            previous.L_unit[n + 1, n] - current.L_unit[n + 1, n],
        )
    return (
        chain.factors[k - 1][n, n + 1],
        current.lower_right[n, n] / previous.lower_right[n + 1, n + 1],
        previous.U_unit[n, n + 1] - current.U_unit[n, n + 1],
    )


def remainder(n: int, r: int) -> int:
    """Remainder of the integer division of n by r."""
    return n % r


def lc_ratio(chain: BidiagonalChain, k: int, n: int) -> Scalar:
    """
    Off-diagonal entry of the k-th factor as a ratio of leading coefficients.

    Left chains use the left-normalized A tables, right chains the right-normalized B tables;
    the numerator is component ``r(n)+1`` of polynomial n after k steps, the denominator
    component ``r(n+1)+1`` of polynomial n+1 after k-1 steps.
    """
    _check_entry(chain, k, n)
    components = chain.p if chain.side is Side.LEFT else chain.q
    current = chain.stages[k].lc_table
    previous = chain.stages[k - 1].lc_table
    numerator = current.component(n, remainder(n, components) + 1)[-1]
    denominator = previous.component(n + 1, remainder(n + 1, components) + 1)[-1]
    return numerator / denominator


def triple_equality_residual(chain: BidiagonalChain) -> Scalar:
    """Largest disagreement among the three entry formulas over the chain."""
    worst = chain.ctx.zero
    for k in range(1, chain.K + 1):
        for n in range(chain.N - 1):
            values = entry_formulas(chain, k, n)
            worst = max(worst, max(values) - min(values))
    return worst


def lc_ratio_residual(chain: BidiagonalChain) -> Scalar:
    """Largest deviation of the leading coefficient ratios from the factor entries."""
    worst = chain.ctx.zero
    for k in range(1, chain.K + 1):
        for n in range(chain.N - 1):
            entry = entry_formulas(chain, k, n)[0]
            worst = max(worst, abs(lc_ratio(chain, k, n) - entry))
    return worst


def chain_meeting_residual(chain_left: BidiagonalChain, chain_right: BidiagonalChain) -> Scalar:
    """Largest deviation between the diagonals of the p-fold left and the q-fold right stages."""
    left = chain_left.stages[-1].factors.D
    right = chain_right.stages[-1].factors.D
    size = min(len(left), len(right))
    return chain_left.ctx.max_abs(left[index] - right[index] for index in range(size))


def _check_pair(chain_left: BidiagonalChain, chain_right: BidiagonalChain, n_max: int) -> None:
    if chain_left.side is not Side.LEFT or chain_right.side is not Side.RIGHT:
        raise ChainMismatchError('expected a left chain and a right chain')
    if (chain_left.p, chain_left.q) != (chain_right.p, chain_right.q):
        raise ChainMismatchError('chains of different (p, q)')
    if chain_left.K != chain_left.p or chain_right.K != chain_right.q:
        raise ChainMismatchError(
            f'expected {chain_left.p} left and {chain_left.q} right steps, '
            f'got {chain_left.K} and {chain_right.K}'
        )
    size = min(chain_left.moments.rows, chain_right.moments.rows)
    if (chain_left.moments.entries[:size, :size] != chain_right.moments.entries[:size, :size]).any():
        raise ChainMismatchError('chains built from different moment matrices')
    if n_max < 0 or n_max > min(chain_left.n_max, chain_right.n_max):
        raise WindowTooSmallError(
            f'chains built for windows {chain_left.n_max} and {chain_right.n_max} cannot cover {n_max}'
        )
    meeting = chain_meeting_residual(chain_left, chain_right)
    if not chain_left.ctx.tolerates(meeting):
        raise ChainMismatchError(
            f'p-fold left and q-fold right diagonals disagree by {chain_left.ctx.to_str(meeting)}'
        )


def _product(ctx: PrecisionContext, size: int, matrices: Sequence[Matrix]) -> Matrix:
    result = ctx.identity(size)
    for matrix in matrices:
        result = result @ matrix[:size, :size]
    return result


def _ratios(numerator: Sequence[Scalar], denominator: Sequence[Scalar], size: int) -> List[Scalar]:
    return [numerator[index] / denominator[index] for index in range(size)]


def _left_core(chain_left: BidiagonalChain, chain_right: BidiagonalChain, size: int, first: int) -> Matrix:
    # L_{first+1} ⋯ L_p D^(p) D^(-1) Ũ_q ⋯ Ũ_1
    ctx = chain_left.ctx
    product = _product(ctx, size, chain_left.factors[first:])
    product = scale_cols(product, _ratios(chain_left.stages[-1].factors.D, chain_left.base.D, size))
    return product @ _product(ctx, size, tuple(reversed(chain_right.rescaled)))


def _right_core(chain_left: BidiagonalChain, chain_right: BidiagonalChain, size: int, last: int) -> Matrix:
    # L̃_1 ⋯ L̃_p D^(-1) D^(q) U_q ⋯ U_{last+1}
    ctx = chain_left.ctx
    product = _product(ctx, size, chain_left.rescaled)
    product = scale_cols(product, _ratios(chain_right.stages[-1].factors.D, chain_right.base.D, size))
    return product @ _product(ctx, size, tuple(reversed(chain_right.factors[last:])))


def _residual(matrix: Matrix, reference: BandedRecurrence) -> Scalar:
    return reference.ctx.max_abs((matrix - reference.matrix).flat)


def assemble_T(
        chain_left: BidiagonalChain,
        chain_right: BidiagonalChain,
        side: Side,
        n_max: int,
) -> Tuple[BandedRecurrence, Scalar]:
    """
    Assemble the recurrence matrix from its bidiagonal factors.

    ``T_L = L_1⋯L_p D^(p) D^(-1) Ũ_q⋯Ũ_1`` and ``T_R = L̃_1⋯L̃_p D^(-1) D^(q) U_q⋯U_1``;
    returns the product on the window `n_max` and its largest deviation from `build_T`.

    Raises:
        ChainMismatchError: the chains do not belong together, or their p-fold left and
            q-fold right diagonals disagree.
        WindowTooSmallError: the chains do not cover `n_max`.
    """
    side = Side(side)
    _check_pair(chain_left, chain_right, n_max)
    size = n_max + 1
    if side is Side.LEFT:
        matrix = _left_core(chain_left, chain_right, size, first=0)
    else:
        matrix = _right_core(chain_left, chain_right, size, last=0)
    assembled = BandedRecurrence(
        side=side, n_max=n_max, p=chain_left.p, q=chain_left.q, matrix=matrix, ctx=chain_left.ctx
    )
    return assembled, _residual(matrix, build_T(chain_left.base, side, n_max))


def darboux(chain: BidiagonalChain, base_T: BandedRecurrence, k: int) -> Tuple[BandedRecurrence, Scalar]:
    """
    Recurrence matrix of the k-times transformed measure by conjugating the base one.

    ``T_L^(k) = L_k^(-1)⋯L_1^(-1) T_L L_1⋯L_k`` and ``T_R^(k) = U_k⋯U_1 T_R U_1^(-1)⋯U_k^(-1)``.
    The result lives on ``base_T.n_max - max(p, q)``, the window where the truncated
    product is exact; the residual is taken against `build_T` of stage k.
    """
    if not 0 <= k <= chain.K:
        raise IndexOutOfWindowError(f'step {k} is outside a chain of {chain.K} steps')
    if base_T.side is not chain.side:
        raise ChainMismatchError(f'a {chain.side.value} chain conjugates {chain.side.value} recurrence matrices')
    ctx = chain.ctx
    if k == 0:
        return base_T, _residual(base_T.matrix, build_T(chain.base, chain.side, base_T.n_max))

    window = base_T.n_max - max(chain.p, chain.q)
    if window < 0:
        raise WindowTooSmallError(f'a recurrence window of {base_T.n_max} leaves nothing to conjugate')
    size = base_T.n_max + 1
    if chain.side is Side.LEFT:
        forward = _product(ctx, size, chain.factors[:k])
        matrix = lower_triangular_inverse(forward, ctx) @ base_T.matrix @ forward
    else:
        forward = _product(ctx, size, tuple(reversed(chain.factors[:k])))
        matrix = forward @ base_T.matrix @ upper_triangular_inverse(forward, ctx)
    matrix = matrix[:window + 1, :window + 1]
    transformed = BandedRecurrence(side=chain.side, n_max=window, p=chain.p, q=chain.q, matrix=matrix, ctx=ctx)
    return transformed, _residual(matrix, build_T(chain.stages[k].factors, chain.side, window))


def darboux_permuted(
        chain_left: BidiagonalChain,
        chain_right: BidiagonalChain,
        side: Side,
        k: int,
        n_max: int,
) -> Tuple[BandedRecurrence, Scalar]:
    """
    Recurrence matrix of the k-times transformed measure by cyclically permuting the bidiagonal factors.

    ``T_L^(k) = L_{k+1}⋯L_p D^(p) D^(-1) Ũ_q⋯Ũ_1 L_1⋯L_k`` and
    ``T_R^(k) = U_k⋯U_1 L̃_1⋯L̃_p D^(-1) D^(q) U_q⋯U_{k+1}``.
    """
    side = Side(side)
    _check_pair(chain_left, chain_right, n_max)
    chain = chain_left if side is Side.LEFT else chain_right
    if not 0 <= k <= chain.K:
        raise IndexOutOfWindowError(f'step {k} is outside a chain of {chain.K} steps')
    ctx = chain.ctx
    size = min(chain_left.N, chain_right.N)
    if side is Side.LEFT:
        matrix = _left_core(chain_left, chain_right, size, first=k) @ _product(ctx, size, chain_left.factors[:k])
    else:
        moved = _product(ctx, size, tuple(reversed(chain_right.factors[:k])))
        matrix = moved @ _right_core(chain_left, chain_right, size, last=k)
    matrix = matrix[:n_max + 1, :n_max + 1]
    transformed = BandedRecurrence(side=side, n_max=n_max, p=chain.p, q=chain.q, matrix=matrix, ctx=ctx)
    return transformed, _residual(matrix, build_T(chain.stages[k].factors, side, n_max))


def corollary_order_report(chain: BidiagonalChain) -> List[Dict[str, Any]]:
    """
    Compare both product orders of consecutive unit factors against the stage relation.

    For each step k the candidates ``X_prev X_cur^(-1)`` and ``X_cur^(-1) X_prev`` are built
    from the unit factors of stages k-1 and k (``L_L`` for left chains, ``U_R`` for right
    chains) and checked against ``L^(k-1) = L_k L^(k)`` or ``U^(k-1) = U^(k) U_k``.
    """
    ctx = chain.ctx
    report = []
    for k in range(1, chain.K + 1):
        previous, current = chain.stages[k - 1].factors, chain.stages[k].factors
        if chain.side is Side.LEFT:
            unit_previous, unit_current = previous.L_unit, current.L_unit
            inverse = lower_triangular_inverse(unit_current, ctx)
        else:
            unit_previous, unit_current = previous.U_unit, current.U_unit
            inverse = upper_triangular_inverse(unit_current, ctx)
        candidates = {
            'previous_times_inverse': unit_previous @ inverse,
            'inverse_times_previous': inverse @ unit_previous,
        }
        entry: Dict[str, Any] = {'k': k, 'kind': 'L' if chain.side is Side.LEFT else 'U'}
        matching = []
        for name, candidate in candidates.items():
            if chain.side is Side.LEFT:
                relation = candidate @ unit_current - unit_previous
            else:
                relation = unit_current @ candidate - unit_previous
            residual = ctx.max_abs(relation.flat)
            entry[name] = {
                'relation_residual': ctx.to_str(residual),
                'bidiagonality': ctx.to_str(_off_bidiagonal(candidate, chain.side, ctx)),
            }
            if ctx.tolerates(residual):
                matching.append(name)
        entry['matching'] = matching
        report.append(entry)
    return report


def parameter_level_residual(chain: BidiagonalChain) -> Optional[Scalar]:
    """
    Largest deviation between stages built from transformed measures and from moment shifts.

    Compares moment matrices and factors (``L_L``, ``D``, ``U_R``) stage by stage; None when
    no stage carries a transformed measure.
    """
    ctx = chain.ctx
    worst: Optional[Scalar] = None
    for stage in chain.stages[1:]:
        if stage.measure is None:
            continue
        direct = build(stage.measure, chain.N, chain.N)
        if chain.side is Side.LEFT:
            shifted = shift_left(chain.moments, stage.k, cols=chain.N)
        else:
            shifted = shift_right(chain.moments, stage.k, rows=chain.N)
        factors = factorize(direct, chain.N)
        deviations = [
            ctx.max_abs((direct.entries - shifted.entries[:chain.N, :chain.N]).flat),
            ctx.max_abs((factors.L_unit - stage.factors.L_unit).flat),
            ctx.max_abs((factors.U_unit - stage.factors.U_unit).flat),
            ctx.max_abs(first - second for first, second in zip(factors.D, stage.factors.D)),
        ]
        current = max(deviations)
        worst = current if worst is None else max(worst, current)
    return worst
