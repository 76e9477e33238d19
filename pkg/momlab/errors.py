from typing import Optional


class MomlabError(Exception):
    """Base class of all errors raised by the package."""


class InvalidArgumentsError(MomlabError, ValueError):
    """Arguments of an operation or of the command line are invalid."""


class InvalidPrecisionError(InvalidArgumentsError):
    """The precision context cannot be constructed with the given settings."""


class ModeMismatchError(MomlabError, TypeError):
    """A value of one arithmetic mode was used in a context of the other mode."""


class NonPositiveArgumentError(InvalidArgumentsError):
    """A special function received an argument that is not strictly positive."""


class RationalModeNonIntegerError(InvalidArgumentsError):
    """A special function in rational mode received a non-integer argument."""


class InadmissibleParametersError(InvalidArgumentsError):
    """Family parameters are outside the admissible range (> -1)."""


class UnsupportedFamilyError(InvalidArgumentsError):
    """The measure family does not support the requested operation."""


class DegreeBudgetExceededError(MomlabError):
    """A moment beyond the configured degree budget was requested."""


class InsufficientTruncationError(MomlabError):
    """A truncated matrix has too few rows or columns for the requested shift."""


class IndexOutOfWindowError(MomlabError, IndexError):
    """An index lies outside the valid window of a truncated object."""


class WindowTooSmallError(MomlabError):
    """A factorization window is too small for the requested recurrence window."""


class ChainMismatchError(MomlabError):
    """Two Christoffel chains cannot be combined."""


class SingularSystemError(MomlabError):
    """A direct linear solve met a singular system."""


class SingularMinorError(MomlabError):
    """A leading principal minor of a moment matrix vanishes."""

    index: int
    stage: Optional[int]

    def __init__(self, index: int, stage: Optional[int] = None) -> None:
        """
        Describe the failing minor.

        Args:
            index: Index of the vanishing pivot.
            stage: Christoffel stage at which the factorization failed, if any.
        """
        self.index = index
        self.stage = stage
        super().__init__(self._describe())

    def with_stage(self, stage: int) -> 'SingularMinorError':
        """Copy this error attaching a Christoffel stage."""
        return type(self)(index=self.index, stage=stage)

    def _describe(self) -> str:
        where = f'pivot {self.index}'
        if self.stage is not None:
            where = f'stage {self.stage}, {where}'
        return f'{self._kind} leading principal minor at {where}'

    @property
    def _kind(self) -> str:
        return 'singular'


class NearSingularMinorError(SingularMinorError):
    """A pivot is negligible relative to the current Schur complement."""

    @property
    def _kind(self) -> str:
        return 'near-singular'


class AdmissibilityWarning(UserWarning):
    """Parameters are admissible but do not guarantee a perfect system."""
