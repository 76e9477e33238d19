"""Lazily evaluated computations on one measure and one window, shared by commands and suites."""
from dataclasses import dataclass
from functools import cached_property

from momlab.christoffel import BidiagonalChain, run_chain
from momlab.gaussborel import GaussBorelFactors, PolynomialSide, PolynomialTable, Side, factorize, polynomials
from momlab.measures import MeasureMatrix
from momlab.momentmatrix import MomentMatrix, build, window_size
from momlab.recurrence import BandedRecurrence, build_T
from momlab.scalars import PrecisionContext


@dataclass(frozen=True, eq=False)
class Pipeline:
    """
    Every object derived from `mm` on the window `n_max`, computed on first access.

    The moment matrix covers the factor window plus ``max(p, q)`` shifts, enough for both
    the p-step left and the q-step right chains.
    """

    mm: MeasureMatrix
    n_max: int

    @property
    def ctx(self) -> PrecisionContext:
        return self.mm.ctx

    @property
    def p(self) -> int:
        return self.mm.p

    @property
    def q(self) -> int:
        return self.mm.q

    @cached_property
    def N(self) -> int:
        return window_size(self.n_max, self.p, self.q)

    @cached_property
    def moments(self) -> MomentMatrix:
        size = self.N + max(self.p, self.q)
        return build(self.mm, size, size)

    @cached_property
    def factors(self) -> GaussBorelFactors:
        return factorize(self.moments, self.N)

    @cached_property
    def chain_left(self) -> BidiagonalChain:
        return run_chain(self.mm, Side.LEFT, self.p, self.n_max)

    @cached_property
    def chain_right(self) -> BidiagonalChain:
        return run_chain(self.mm, Side.RIGHT, self.q, self.n_max)

    def chain(self, side: Side) -> BidiagonalChain:
        return self.chain_left if Side(side) is Side.LEFT else self.chain_right

    def recurrence(self, side: Side) -> BandedRecurrence:
        return build_T(self.factors, side, self.n_max)

    def table(self, side: PolynomialSide, normalization: Side) -> PolynomialTable:
        return polynomials(self.factors, side, normalization)
