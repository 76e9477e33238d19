__version__ = '0.1.0'

from .scalars import Mode, PrecisionContext, beta, gamma_fn
from .measures import (
    DiscreteMeasureMatrix, JacobiPineiroMeasure, LaguerreFirstKindMeasure, MeasureMatrix, christoffel_left,
    christoffel_right, moment
)
from .momentmatrix import MomentMatrix, build, shift_left, shift_right
from .gaussborel import GaussBorelFactors, PolynomialSide, PolynomialTable, Side, factorize, polynomials
from .recurrence import BandedRecurrence, build_T
from .christoffel import BidiagonalChain, assemble_T, darboux, darboux_permuted, entry_formulas, lc_ratio, run_chain
from .oracles import classical_tridiagonal, solve_polynomial_direct

__all__ = (
    'Mode',
    'PrecisionContext',
    'MeasureMatrix',
    'JacobiPineiroMeasure',
    'LaguerreFirstKindMeasure',
    'DiscreteMeasureMatrix',
    'build',
    'factorize',
    'polynomials',
    'build_T',
    'run_chain',
    'assemble_T',
    'darboux',
    'darboux_permuted',
)
