"""Run configuration assembled from command line arguments and the environment."""
import os
from argparse import Namespace
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from momlab.errors import InvalidArgumentsError
from momlab.gaussborel import PolynomialSide, Side
from momlab.measures import MeasureMatrix, degree_budget_for, parse_family
from momlab.scalars import DEFAULT_DIGITS, Mode, PrecisionContext

DIGITS_ENV = 'MOMLAB_DIGITS'
DEFAULT_N_MAX = 8
DEFAULT_SUITE = 'all'


class OutputFormat(str, Enum):
    JSON = 'json'
    CSV = 'csv'


# commands whose default --format is not json
COMMAND_FORMATS = {
    'moments': OutputFormat.CSV,
}


@dataclass(frozen=True)
class RunConfig:
    """
    Everything one command needs.

    `k` is the number of Christoffel steps the `moments` truncation accounts for
    (``max(p, q)`` when omitted) and the transformation step of `darboux` (1 when omitted).
    """

    command: str
    family: str = ''
    alpha: Optional[str] = None
    beta: Optional[str] = None
    gamma: Optional[str] = None
    nodes_file: Optional[Path] = None
    n_max: int = DEFAULT_N_MAX
    k: Optional[int] = None
    digits: int = DEFAULT_DIGITS
    mode: Mode = Mode.BIGFLOAT
    output_format: Optional[OutputFormat] = None
    out: Optional[Path] = None
    side: Side = Side.LEFT
    suite: str = DEFAULT_SUITE
    size: Optional[int] = None
    poly_side: PolynomialSide = PolynomialSide.B
    normalization: Side = Side.LEFT
    residual_tol: Optional[str] = None
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise InvalidArgumentsError(f'--nmax must be at least 1, got {self.n_max}')
        if self.k is not None and self.k < 0:
            raise InvalidArgumentsError(f'--k must be nonnegative, got {self.k}')
        if self.size is not None and self.size < 1:
            raise InvalidArgumentsError(f'--size must be positive, got {self.size}')

    @classmethod
    def from_namespace(cls, namespace: Namespace, environ: Optional[Mapping[str, str]] = None) -> 'RunConfig':
        """
        Build a configuration from parsed arguments.

        Options missing from `namespace` take their defaults; `MOMLAB_DIGITS` replaces the
        default precision when ``--digits`` is not given.
        """
        environ = os.environ if environ is None else environ
        values: Dict[str, Any] = {
            name: getattr(namespace, name)
            for name in cls.__dataclass_fields__
            if getattr(namespace, name, None) is not None
        }
        if 'digits' not in values and environ.get(DIGITS_ENV):
            try:
                values['digits'] = int(environ[DIGITS_ENV])
            except ValueError as exc:
                raise InvalidArgumentsError(f'{DIGITS_ENV} must be an integer, got {environ[DIGITS_ENV]!r}') from exc
        for name, kind in (
                ('mode', Mode),
                ('output_format', OutputFormat),
                ('side', Side),
                ('poly_side', PolynomialSide),
                ('normalization', Side),
        ):
            if name in values:
                values[name] = kind(values[name])
        for name in ('nodes_file', 'out'):
            if name in values:
                values[name] = Path(values[name])
        return cls(**values)

    @property
    def report_format(self) -> OutputFormat:
        """``--format`` when given, otherwise the default of the command."""
        if self.output_format is not None:
            return self.output_format
        return COMMAND_FORMATS.get(self.command, OutputFormat.JSON)

    def precision(self) -> PrecisionContext:
        """Precision context of the run."""
        return PrecisionContext(mode=self.mode, digits=self.digits, residual_tol=self.residual_tol)

    def measure(self, ctx: PrecisionContext) -> MeasureMatrix:
        """
        Measure matrix of the run with a degree budget large enough for the command.

        The budget depends on (p, q), which are only known once the family is parsed, and
        covers a ``--size`` truncation larger than the window.
        """
        mm = self._parse(ctx, degree_budget=None)
        window = self.n_max if self.size is None else max(self.n_max, self.size)
        needed = degree_budget_for(window, self.steps(mm), mm.p, mm.q)
        if needed > mm.degree_budget:
            mm = self._parse(ctx, degree_budget=needed)
        return mm

    def steps(self, mm: MeasureMatrix) -> int:
        """Number of Christoffel steps K."""
        return self.k if self.k is not None else max(mm.p, mm.q)

    def as_meta(self) -> Dict[str, Any]:
        """Configuration echoed in the ``meta`` block of JSON documents."""
        return {
            'command': self.command,
            'family': self.family,
            'alpha': self.alpha,
            'beta': self.beta,
            'gamma': self.gamma,
            'nodes_file': str(self.nodes_file) if self.nodes_file is not None else None,
            'n_max': self.n_max,
            'k': self.k,
            'digits': self.digits,
            'mode': self.mode.value,
            'side': self.side.value,
            'suite': self.suite,
            'residual_tol': self.residual_tol,
        }

    def _parse(self, ctx: PrecisionContext, degree_budget: Optional[int]) -> MeasureMatrix:
        return parse_family(
            self.family,
            ctx,
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            nodes_file=self.nodes_file,
            degree_budget=degree_budget,
        )
