"""
Arithmetic backends shared by every module.

Two modes exist: ``rational`` computes with `fractions.Fraction` and every comparison is
exact; ``bigfloat`` computes with `mpmath` numbers at a fixed number of decimal digits
and compares against the tolerances of the context. Each `PrecisionContext` owns a private
`mpmath.MPContext`, so contexts of different precision never share global state.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Type, Union

import mpmath
import numpy as np

from momlab.errors import (
    InvalidPrecisionError, ModeMismatchError, NonPositiveArgumentError, RationalModeNonIntegerError
)

# A `Fraction` in rational mode, an `mpf` of the owning context in bigfloat mode.
Scalar = Any
RealLike = Union[int, str, Fraction, Scalar]
Matrix = np.ndarray

DEFAULT_DIGITS = 64
MIN_DIGITS = 16

# every MPContext derives its own mpf type from this base
BigFloat: Type[Any] = mpmath.mpf.__base__


class Mode(str, Enum):
    """Arithmetic mode of a precision context."""

    BIGFLOAT = 'bigfloat'
    RATIONAL = 'rational'


def _is_mpf(value: Any) -> bool:
    return isinstance(value, BigFloat)


@dataclass(frozen=True)
class PrecisionContext:
    """
    Arithmetic mode, working precision and comparison tolerances.

    Args:
        mode: ``bigfloat`` or ``rational``.
        digits: Decimal digits of working precision (bigfloat only, at least 16).
        residual_tol: Tolerance of every residual check, ``10^(-digits/2)`` by default.
        pivot_tol: Relative pivot threshold of the elimination, ``10^(-digits+10)`` by default.
    """

    mode: Mode = Mode.BIGFLOAT
    digits: int = DEFAULT_DIGITS
    residual_tol: Any = None
    pivot_tol: Any = None
    mp: Any = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        try:
            mode = Mode(self.mode)
        except ValueError as exc:
            raise InvalidPrecisionError(f'unknown arithmetic mode {self.mode!r}') from exc
        object.__setattr__(self, 'mode', mode)

        if self.digits < 1:
            raise InvalidPrecisionError(f'digits must be positive, got {self.digits}')
        if mode is Mode.BIGFLOAT and self.digits < MIN_DIGITS:
            raise InvalidPrecisionError(f'bigfloat mode needs at least {MIN_DIGITS} digits, got {self.digits}')

        context = mpmath.MPContext()
        context.dps = self.digits
        object.__setattr__(self, 'mp', context)

        if mode is Mode.RATIONAL:
            for name in ('residual_tol', 'pivot_tol'):
                value = getattr(self, name)
                if value is not None and self.coerce(value) != 0:
                    raise InvalidPrecisionError(f'rational mode compares exactly, {name} must be 0')
                object.__setattr__(self, name, Fraction(0))
            return

        ten = context.mpf(10)
        residual_tol = ten ** (-context.mpf(self.digits) / 2) if self.residual_tol is None else self.residual_tol
        pivot_tol = ten ** (10 - self.digits) if self.pivot_tol is None else self.pivot_tol
        object.__setattr__(self, 'residual_tol', self.coerce(residual_tol))
        object.__setattr__(self, 'pivot_tol', self.coerce(pivot_tol))
        if self.residual_tol < 0 or self.pivot_tol < 0:
            raise InvalidPrecisionError('tolerances must be nonnegative')

    @property
    def is_rational(self) -> bool:
        """Whether all arithmetic is exact."""
        return self.mode is Mode.RATIONAL

    @cached_property
    def zero(self) -> Scalar:
        """Additive identity of the mode."""
        return self.coerce(0)

    @cached_property
    def one(self) -> Scalar:
        """Multiplicative identity of the mode."""
        return self.coerce(1)

    def coerce(self, value: RealLike) -> Scalar:
        """
        Convert a real value into a scalar of this context.

        Integers, exact fractions and text are accepted in both modes. An `mpf` is accepted
        only in bigfloat mode and is re-rounded to this context; floats only in bigfloat mode.

        Raises:
            ModeMismatchError: a bigfloat value or a float is given to a rational context.
        """
        if isinstance(value, str):
            return self.from_str(value)
        if isinstance(value, bool):
            raise ModeMismatchError('booleans are not scalars')
        if isinstance(value, int):
            return Fraction(value) if self.is_rational else self.mp.mpf(value)
        if isinstance(value, Fraction):
            if self.is_rational:
                return value
            return self.mp.mpf(value.numerator) / value.denominator
        if _is_mpf(value) or isinstance(value, float):
            if self.is_rational:
                raise ModeMismatchError(f'bigfloat value {value!r} used in rational mode')
            return self.mp.mpf(value)
        raise ModeMismatchError(f'cannot use {type(value).__name__} as a scalar')

    def from_str(self, text: str) -> Scalar:
        """Parse a decimal (optionally with exponent) or a ``p/q`` literal."""
        text = text.strip()
        if self.is_rational or '/' in text:
            try:
                exact = Fraction(text)
            except (ValueError, ZeroDivisionError) as exc:
                raise InvalidPrecisionError(f'not a real literal: {text!r}') from exc
            return self.coerce(exact)
        try:
            return self.mp.mpf(text)
        except ValueError as exc:
            raise InvalidPrecisionError(f'not a real literal: {text!r}') from exc

    def to_str(self, value: Scalar) -> str:
        """Serialize a scalar: ``p/q`` in rational mode, decimal with explicit exponent otherwise."""
        if self.is_rational:
            if not isinstance(value, Fraction):
                raise ModeMismatchError(f'{value!r} is not a rational scalar')
            return str(value)
        return self.mp.nstr(self.coerce(value), self.digits, min_fixed=0, max_fixed=0, show_zero_exponent=True)

    def as_integer(self, value: Scalar) -> int:
        """Return `value` as an int when it is an exact integer."""
        if isinstance(value, Fraction) and value.denominator == 1:
            return value.numerator
        raise RationalModeNonIntegerError(f'rational mode needs an integer argument, got {value}')

    def zeros(self, rows: int, cols: int) -> Matrix:
        """Dense matrix of zeros."""
        return np.full((rows, cols), self.zero, dtype=object)

    def identity(self, size: int) -> Matrix:
        """Dense identity matrix."""
        matrix = self.zeros(size, size)
        for index in range(size):
            matrix[index, index] = self.one
        return matrix

    def diagonal(self, values: Iterable[Scalar]) -> Matrix:
        """Dense diagonal matrix."""
        values = list(values)
        matrix = self.zeros(len(values), len(values))
        for index, value in enumerate(values):
            matrix[index, index] = value
        return matrix

    def max_abs(self, values: Iterable[Scalar]) -> Scalar:
        """Maximum absolute value, zero for an empty collection."""
        return max((abs(value) for value in values), default=self.zero)

    def tolerates(self, residual: Scalar) -> bool:
        """Whether a residual passes the residual tolerance."""
        return bool(residual <= self.residual_tol)

    def is_negligible_pivot(self, pivot: Scalar, scale: Scalar) -> bool:
        """Whether a pivot is zero, or negligible against the scale of its Schur complement."""
        if pivot == 0:
            return True
        if self.is_rational:
            return False
        return bool(abs(pivot) < self.pivot_tol * scale)


def gamma_fn(a: RealLike, ctx: PrecisionContext) -> Scalar:
    """
    Gamma function; ``(a-1)!`` exactly in rational mode.

    Raises:
        NonPositiveArgumentError: ``a <= 0``.
        RationalModeNonIntegerError: rational mode with a non-integer argument.
    """
    value = ctx.coerce(a)
    if value <= 0:
        raise NonPositiveArgumentError(f'gamma needs a positive argument, got {a}')
    if ctx.is_rational:
        return Fraction(math.factorial(ctx.as_integer(value) - 1))
    return ctx.mp.gamma(value)


def beta(a: RealLike, b: RealLike, ctx: PrecisionContext) -> Scalar:
    """
    Euler Beta function ``Γ(a)Γ(b)/Γ(a+b)``.

    In rational mode both arguments must be positive integers and the result is
    ``(a-1)!(b-1)!/(a+b-1)!`` exactly.

    Raises:
        NonPositiveArgumentError: an argument is not strictly positive.
        RationalModeNonIntegerError: rational mode with a non-integer argument.
    """
    first, second = ctx.coerce(a), ctx.coerce(b)
    if first <= 0 or second <= 0:
        raise NonPositiveArgumentError(f'beta needs positive arguments, got ({a}, {b})')
    if ctx.is_rational:
        left, right = ctx.as_integer(first), ctx.as_integer(second)
        return Fraction(
            math.factorial(left - 1) * math.factorial(right - 1),
            math.factorial(left + right - 1),
        )
    return ctx.mp.beta(first, second)
