from fractions import Fraction

import pytest

from momlab.measures import JacobiPineiroMeasure, LaguerreFirstKindMeasure
from momlab.scalars import Mode, PrecisionContext


@pytest.fixture()
def rational_ctx() -> PrecisionContext:
    """Exact arithmetic context."""
    return PrecisionContext(mode=Mode.RATIONAL)


@pytest.fixture()
def bigfloat_ctx() -> PrecisionContext:
    """Arbitrary precision context at the default 64 digits."""
    return PrecisionContext(mode=Mode.BIGFLOAT, digits=64)


@pytest.fixture()
def laguerre(rational_ctx: PrecisionContext) -> LaguerreFirstKindMeasure:
    """The scalar Laguerre measure ``e^(-x) dx``, whose moments are ``n!``."""
    return LaguerreFirstKindMeasure(alpha=[0], beta=[0], ctx=rational_ctx)


@pytest.fixture()
def legendre(rational_ctx: PrecisionContext) -> JacobiPineiroMeasure:
    """The scalar Lebesgue measure on [0, 1], whose moment matrix is the Hilbert matrix."""
    return JacobiPineiroMeasure(alpha=[0], beta=[0], gamma=0, ctx=rational_ctx)


@pytest.fixture()
def jacobi_pineiro(bigfloat_ctx: PrecisionContext) -> JacobiPineiroMeasure:
    """A 1×2 Jacobi–Piñeiro matrix of measures with non-integer parameter differences."""
    return JacobiPineiroMeasure(alpha=[0, Fraction(1, 2)], beta=[0], gamma=0, ctx=bigfloat_ctx)
