"""
Matrices of measures presented through per-entry moment oracles.

A `MeasureMatrix` is a q×p array of measures on a common support. Its only observable is
`moment(b, a, n)`, the n-th moment of the entry in row b and column a (both 1-based).
Moments are produced lazily, in order, and cached per entry.
"""
import threading
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from pathlib import Path
from typing import ClassVar, Dict, List, Optional, Sequence, Tuple

from momlab.errors import (
    AdmissibilityWarning, DegreeBudgetExceededError, InadmissibleParametersError, IndexOutOfWindowError,
    InvalidArgumentsError, UnsupportedFamilyError
)
from momlab.scalars import PrecisionContext, RealLike, Scalar, beta, gamma_fn
from momlab.utils import UTF8, get_logger, orjson_loads

UNIT_INTERVAL = '[0, 1]'
HALF_LINE = '[0, +inf)'
FINITE_POINTS = 'finite point set'

DEFAULT_N_MAX = 64

ScalarVector = Tuple[Scalar, ...]
WeightMatrix = Tuple[Tuple[Scalar, ...], ...]


class FamilyTag(str, Enum):
    """Families of measure matrices known to the command line."""

    JACOBI_PINEIRO = 'jp'
    LAGUERRE_FIRST_KIND = 'lag1'
    DISCRETE = 'discrete'


def degree_budget_for(n_max: int, k: int, p: int, q: int) -> int:
    """Moments per entry needed by a window bound `n_max` and `k` Christoffel steps."""
    return 4 * (n_max + k + max(p, q))


class MeasureMatrix(ABC):
    """
    A q×p matrix of measures known through its moments.

    Args:
        p: Number of columns.
        q: Number of rows.
        ctx: Precision context of every moment.
        degree_budget: Largest moment order that may be requested.
    """

    family_tag: ClassVar[Optional[FamilyTag]] = None
    support: ClassVar[str] = ''

    _p: int
    _q: int
    _ctx: PrecisionContext
    _degree_budget: int
    _cache: Dict[Tuple[int, int], List[Scalar]]
    _lock: threading.Lock

    def __init__(self, p: int, q: int, ctx: PrecisionContext, degree_budget: Optional[int] = None) -> None:
        if p < 1 or q < 1:
            raise InvalidArgumentsError(f'a matrix of measures needs p, q >= 1, got p={p}, q={q}')
        if degree_budget is None:
            degree_budget = degree_budget_for(DEFAULT_N_MAX, max(p, q), p, q)
        self._p = p
        self._q = q
        self._ctx = ctx
        self._degree_budget = degree_budget
        self._cache = {}
        self._lock = threading.Lock()

    @property
    def p(self) -> int:
        return self._p

    @property
    def q(self) -> int:
        return self._q

    @property
    def ctx(self) -> PrecisionContext:
        return self._ctx

    @property
    def degree_budget(self) -> int:
        return self._degree_budget

    def moment(self, b: int, a: int, n: int) -> Scalar:
        """
        Moment ``∫ x^n dμ_{b,a}``.

        Raises:
            IndexOutOfWindowError: `b` or `a` is not a valid entry.
            DegreeBudgetExceededError: `n` exceeds the degree budget.
        """
        if not (1 <= b <= self._q and 1 <= a <= self._p):
            raise IndexOutOfWindowError(f'no measure at ({b}, {a}) in a {self._q}×{self._p} matrix')
        if n < 0:
            raise InvalidArgumentsError(f'moment order must be nonnegative, got {n}')
        if n > self._degree_budget:
            raise DegreeBudgetExceededError(f'moment order {n} exceeds the degree budget {self._degree_budget}')

        with self._lock:
            known = self._cache.setdefault((b, a), [])
            if len(known) <= n:
                get_logger().debug('extending moments of entry (%s, %s) to order %s', b, a, n)
            while len(known) <= n:
                known.append(self._next_moment(b, a, known))
            return known[n]

    def christoffel_left(self) -> 'MeasureMatrix':
        """Multiply on the right by the transposed cyclic polynomial matrix of order p."""
        raise UnsupportedFamilyError(f'{type(self).__name__} has no left Christoffel transformation')

    def christoffel_right(self) -> 'MeasureMatrix':
        """Multiply on the left by the cyclic polynomial matrix of order q."""
        raise UnsupportedFamilyError(f'{type(self).__name__} has no right Christoffel transformation')

    def describe(self) -> Dict[str, object]:
        """Serializable description of the family and its parameters."""
        return {
            'family': self.family_tag.value if self.family_tag else None,
            'support': self.support,
            'p': self._p,
            'q': self._q,
        }

    @abstractmethod
    def _next_moment(self, b: int, a: int, known: Sequence[Scalar]) -> Scalar:
        """Moment of order ``len(known)`` of entry (b, a), given all lower orders."""


@dataclass(frozen=True)
class JacobiPineiroParams:
    """Parameters of the mixed Jacobi–Piñeiro matrix ``x^β_b x^α_a (1-x)^γ dx`` on [0, 1]."""

    alpha: ScalarVector
    beta: ScalarVector
    gamma: Scalar


@dataclass(frozen=True)
class LaguerreFirstKindParams:
    """Parameters of the mixed Laguerre matrix of the first kind ``x^β_b x^α_a e^(-x) dx``."""

    alpha: ScalarVector
    beta: ScalarVector


def _check_admissible(name: str, values: ScalarVector, ctx: PrecisionContext) -> None:
    if not values:
        raise InadmissibleParametersError(f'{name} must have at least one entry')
    for value in values:
        if value <= -1:
            raise InadmissibleParametersError(f'every {name} entry must exceed -1, got {ctx.to_str(value)}')
    for first, second in combinations(values, 2):
        difference = first - second
        is_integer = difference.denominator == 1 if ctx.is_rational else ctx.mp.isint(difference)
        if is_integer:
            warnings.warn(
                f'{name} entries {ctx.to_str(first)} and {ctx.to_str(second)} differ by an integer; '
                'the system may fail to be perfect',
                AdmissibilityWarning,
                stacklevel=3,
            )


def _cycle(values: ScalarVector, one: Scalar) -> ScalarVector:
    return (*values[1:], values[0] + one)


class JacobiPineiroMeasure(MeasureMatrix):
    """
    Mixed Jacobi–Piñeiro matrix of measures.

    ``moment(b, a, n) = B(α_a + β_b + n + 1, γ + 1)``, evaluated through the ratio
    ``m_{n+1}/m_n = (α_a + β_b + n + 1) / (α_a + β_b + γ + n + 2)``.
    """

    family_tag = FamilyTag.JACOBI_PINEIRO
    support = UNIT_INTERVAL

    params: JacobiPineiroParams

    def __init__(
            self,
            alpha: Sequence[RealLike],
            beta: Sequence[RealLike],
            gamma: RealLike,
            ctx: PrecisionContext,
            degree_budget: Optional[int] = None,
    ) -> None:
        params = JacobiPineiroParams(
            alpha=tuple(ctx.coerce(value) for value in alpha),
            beta=tuple(ctx.coerce(value) for value in beta),
            gamma=ctx.coerce(gamma),
        )
        _check_admissible('alpha', params.alpha, ctx)
        _check_admissible('beta', params.beta, ctx)
        if params.gamma <= -1:
            raise InadmissibleParametersError(f'gamma must exceed -1, got {ctx.to_str(params.gamma)}')
        super().__init__(p=len(params.alpha), q=len(params.beta), ctx=ctx, degree_budget=degree_budget)
        self.params = params

    def reparametrized(
            self,
            alpha: Optional[Sequence[RealLike]] = None,
            beta: Optional[Sequence[RealLike]] = None,
    ) -> 'JacobiPineiroMeasure':
        """Same family with `alpha` or `beta` replaced."""
        return JacobiPineiroMeasure(
            alpha=self.params.alpha if alpha is None else alpha,
            beta=self.params.beta if beta is None else beta,
            gamma=self.params.gamma,
            ctx=self._ctx,
            degree_budget=self._degree_budget,
        )

    def christoffel_left(self) -> 'JacobiPineiroMeasure':
        return self.reparametrized(alpha=_cycle(self.params.alpha, self._ctx.one))

    def christoffel_right(self) -> 'JacobiPineiroMeasure':
        return self.reparametrized(beta=_cycle(self.params.beta, self._ctx.one))

    def describe(self) -> Dict[str, object]:
        return {
            **super().describe(),
            'alpha': [self._ctx.to_str(value) for value in self.params.alpha],
            'beta': [self._ctx.to_str(value) for value in self.params.beta],
            'gamma': self._ctx.to_str(self.params.gamma),
        }

    def _next_moment(self, b: int, a: int, known: Sequence[Scalar]) -> Scalar:
        exponent = self.params.alpha[a - 1] + self.params.beta[b - 1]
        if not known:
            return beta(exponent + 1, self.params.gamma + 1, self._ctx)
        order = len(known) - 1
        return known[-1] * (exponent + order + 1) / (exponent + self.params.gamma + order + 2)


class LaguerreFirstKindMeasure(MeasureMatrix):
    """
    Mixed Laguerre matrix of measures of the first kind.

    ``moment(b, a, n) = Γ(α_a + β_b + n + 1)``, evaluated through ``m_{n+1}/m_n = α_a + β_b + n + 1``.
    """

    family_tag = FamilyTag.LAGUERRE_FIRST_KIND
    support = HALF_LINE

    params: LaguerreFirstKindParams

    def __init__(
            self,
            alpha: Sequence[RealLike],
            beta: Sequence[RealLike],
            ctx: PrecisionContext,
            degree_budget: Optional[int] = None,
    ) -> None:
        params = LaguerreFirstKindParams(
            alpha=tuple(ctx.coerce(value) for value in alpha),
            beta=tuple(ctx.coerce(value) for value in beta),
        )
        _check_admissible('alpha', params.alpha, ctx)
        _check_admissible('beta', params.beta, ctx)
        super().__init__(p=len(params.alpha), q=len(params.beta), ctx=ctx, degree_budget=degree_budget)
        self.params = params

    def reparametrized(
            self,
            alpha: Optional[Sequence[RealLike]] = None,
            beta: Optional[Sequence[RealLike]] = None,
    ) -> 'LaguerreFirstKindMeasure':
        """Same family with `alpha` or `beta` replaced."""
        return LaguerreFirstKindMeasure(
            alpha=self.params.alpha if alpha is None else alpha,
            beta=self.params.beta if beta is None else beta,
            ctx=self._ctx,
            degree_budget=self._degree_budget,
        )

    def christoffel_left(self) -> 'LaguerreFirstKindMeasure':
        return self.reparametrized(alpha=_cycle(self.params.alpha, self._ctx.one))

    def christoffel_right(self) -> 'LaguerreFirstKindMeasure':
        return self.reparametrized(beta=_cycle(self.params.beta, self._ctx.one))

    def describe(self) -> Dict[str, object]:
        return {
            **super().describe(),
            'alpha': [self._ctx.to_str(value) for value in self.params.alpha],
            'beta': [self._ctx.to_str(value) for value in self.params.beta],
        }

    def _next_moment(self, b: int, a: int, known: Sequence[Scalar]) -> Scalar:
        exponent = self.params.alpha[a - 1] + self.params.beta[b - 1]
        if not known:
            return gamma_fn(exponent + 1, self._ctx)
        return known[-1] * (exponent + len(known))


class DiscreteMeasureMatrix(MeasureMatrix):
    """
    Finitely supported matrix of measures ``Σ_m W_m δ_{x_m}``.

    Args:
        nodes: Pairwise distinct support points.
        weights: One q×p weight matrix per node, each with a nonzero entry.
        ctx: Precision context.
        degree_budget: Largest moment order that may be requested.
    """

    family_tag = FamilyTag.DISCRETE
    support = FINITE_POINTS

    nodes: ScalarVector
    weights: Tuple[WeightMatrix, ...]

    def __init__(
            self,
            nodes: Sequence[RealLike],
            weights: Sequence[Sequence[Sequence[RealLike]]],
            ctx: PrecisionContext,
            degree_budget: Optional[int] = None,
    ) -> None:
        converted_nodes = tuple(ctx.coerce(node) for node in nodes)
        converted_weights = tuple(
            tuple(tuple(ctx.coerce(entry) for entry in row) for row in matrix)
            for matrix in weights
        )
        if len(converted_nodes) != len(converted_weights):
            raise InadmissibleParametersError(
                f'{len(converted_nodes)} nodes but {len(converted_weights)} weight matrices'
            )
        if len(set(converted_nodes)) != len(converted_nodes):
            raise InadmissibleParametersError('nodes must be pairwise distinct')
        if not converted_weights:
            raise InadmissibleParametersError('a discrete matrix of measures needs at least one node')

        q = len(converted_weights[0])
        p = len(converted_weights[0][0]) if q else 0
        for matrix in converted_weights:
            if len(matrix) != q or any(len(row) != p for row in matrix):
                raise InadmissibleParametersError('every weight matrix must have the same q×p shape')
            if all(entry == 0 for row in matrix for entry in row):
                raise InadmissibleParametersError('every node needs at least one nonzero weight')

        super().__init__(p=p, q=q, ctx=ctx, degree_budget=degree_budget)
        self.nodes = converted_nodes
        self.weights = converted_weights

    def christoffel_left(self) -> 'DiscreteMeasureMatrix':
        weights = []
        for node, matrix in zip(self.nodes, self.weights):
            weights.append(tuple((*row[1:], node * row[0]) for row in matrix))
        return self._derived(weights)

    def christoffel_right(self) -> 'DiscreteMeasureMatrix':
        weights = []
        for node, matrix in zip(self.nodes, self.weights):
            weights.append((*matrix[1:], tuple(node * entry for entry in matrix[0])))
        return self._derived(weights)

    def describe(self) -> Dict[str, object]:
        return {
            **super().describe(),
            'nodes': [self._ctx.to_str(node) for node in self.nodes],
            'weights': [
                [[self._ctx.to_str(entry) for entry in row] for row in matrix]
                for matrix in self.weights
            ],
        }

    def _derived(self, weights: Sequence[WeightMatrix]) -> 'DiscreteMeasureMatrix':
        # nodes whose weights vanish after multiplication by x carry no mass
        kept = [
            (node, matrix) for node, matrix in zip(self.nodes, weights)
            if any(entry != 0 for row in matrix for entry in row)
        ]
        if not kept:
            return _ZeroMeasureMatrix(p=self._p, q=self._q, ctx=self._ctx, degree_budget=self._degree_budget)
        return DiscreteMeasureMatrix(
            nodes=[node for node, _ in kept],
            weights=[matrix for _, matrix in kept],
            ctx=self._ctx,
            degree_budget=self._degree_budget,
        )

    def _next_moment(self, b: int, a: int, known: Sequence[Scalar]) -> Scalar:
        order = len(known)
        total = self._ctx.zero
        for node, matrix in zip(self.nodes, self.weights):
            total += matrix[b - 1][a - 1] * node ** order
        return total


class _ZeroMeasureMatrix(DiscreteMeasureMatrix):
    """The discrete matrix of measures without mass, reached by transforming a point mass at 0."""

    def __init__(self, p: int, q: int, ctx: PrecisionContext, degree_budget: Optional[int] = None) -> None:
        MeasureMatrix.__init__(self, p=p, q=q, ctx=ctx, degree_budget=degree_budget)
        self.nodes = ()
        self.weights = ()

    def christoffel_left(self) -> 'DiscreteMeasureMatrix':
        return self

    def christoffel_right(self) -> 'DiscreteMeasureMatrix':
        return self


def moment(mm: MeasureMatrix, b: int, a: int, n: int) -> Scalar:
    """Moment of order `n` of the entry (b, a)."""
    return mm.moment(b, a, n)


def christoffel_left(mm: MeasureMatrix) -> MeasureMatrix:
    """One left Christoffel transformation: column a ← column a+1, column p ← x·column 1."""
    return mm.christoffel_left()


def christoffel_right(mm: MeasureMatrix) -> MeasureMatrix:
    """One right Christoffel transformation: row b ← row b+1, row q ← x·row 1."""
    return mm.christoffel_right()


def christoffel_left_iterate(mm: MeasureMatrix, k: int) -> MeasureMatrix:
    """`k` left Christoffel transformations; `k = 0` returns `mm` itself."""
    for _ in range(k):
        mm = mm.christoffel_left()
    return mm


def christoffel_right_iterate(mm: MeasureMatrix, k: int) -> MeasureMatrix:
    """`k` right Christoffel transformations; `k = 0` returns `mm` itself."""
    for _ in range(k):
        mm = mm.christoffel_right()
    return mm


def load_discrete(path: Path, ctx: PrecisionContext, degree_budget: Optional[int] = None) -> DiscreteMeasureMatrix:
    """
    Read a discrete matrix of measures from a JSON nodes file.

    The file holds ``{"nodes": [...], "weights": [[[...]]]}``: one q×p matrix per node,
    every scalar written as a string (numbers are accepted too).

    Raises:
        OSError: the file cannot be read.
        InadmissibleParametersError: the document does not describe a valid measure.
    """
    text = Path(path).read_text(encoding=UTF8)
    try:
        document = orjson_loads(text)
    except ValueError as exc:
        raise InadmissibleParametersError(f'{path}: not a JSON document') from exc
    if not isinstance(document, dict) or 'nodes' not in document or 'weights' not in document:
        raise InadmissibleParametersError(f'{path}: expected an object with "nodes" and "weights"')
    return DiscreteMeasureMatrix(
        nodes=[str(node) for node in document['nodes']],
        weights=[[[str(entry) for entry in row] for row in matrix] for matrix in document['weights']],
        ctx=ctx,
        degree_budget=degree_budget,
    )


def parse_vector(text: Optional[str], name: str) -> List[str]:
    """Split a comma separated parameter list such as ``0,0.5``."""
    if text is None or not text.strip():
        raise InvalidArgumentsError(f'--{name} is required for this family')
    return [item.strip() for item in text.split(',')]


def parse_family(
        family: str,
        ctx: PrecisionContext,
        alpha: Optional[str] = None,
        beta: Optional[str] = None,
        gamma: Optional[str] = None,
        nodes_file: Optional[Path] = None,
        degree_budget: Optional[int] = None,
) -> MeasureMatrix:
    """Build a measure matrix from its command line description."""
    try:
        tag = FamilyTag(family)
    except ValueError as exc:
        raise UnsupportedFamilyError(f'unknown family {family!r}') from exc

    if tag is FamilyTag.JACOBI_PINEIRO:
        return JacobiPineiroMeasure(
            alpha=parse_vector(alpha, 'alpha'),
            beta=parse_vector(beta, 'beta'),
            gamma=gamma if gamma is not None else '0',
            ctx=ctx,
            degree_budget=degree_budget,
        )
    if tag is FamilyTag.LAGUERRE_FIRST_KIND:
        return LaguerreFirstKindMeasure(
            alpha=parse_vector(alpha, 'alpha'),
            beta=parse_vector(beta, 'beta'),
            ctx=ctx,
            degree_budget=degree_budget,
        )
    if nodes_file is None:
        raise InvalidArgumentsError('--nodes-file is required for the discrete family')
    return load_discrete(nodes_file, ctx=ctx, degree_budget=degree_budget)
