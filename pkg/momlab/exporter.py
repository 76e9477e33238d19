"""
Serializable reports of every computed object.

Reports are dataclasses; `as_dict` turns their fields into JSON-ready values through the
type → converter table in `BaseInfo.Config.dumpers`, so scalars always leave the package
as strings.
"""
import csv
import io
from dataclasses import dataclass, field, fields
from enum import Enum
from fractions import Fraction
from pathlib import PurePath
from typing import Any, Callable, ClassVar, Dict, Iterable, List, Optional, Sequence, Tuple, Type

import numpy as np

from momlab.errors import InvalidArgumentsError
from momlab.gaussborel import GaussBorelFactors, PolynomialTable
from momlab.momentmatrix import MomentMatrix, Triplet
from momlab.recurrence import BandedRecurrence
from momlab.scalars import BigFloat
from momlab.utils import orjson_dumps

CSV_HEADER = ('row', 'col', 'value')


def convert_to_str(value: Any) -> str:
    """Convert any value to a string."""
    return str(value)


def convert_bigfloat(value: Any) -> str:
    """Decimal with explicit exponent at the precision of the owning context."""
    context = value.context
    return context.nstr(value, context.dps, min_fixed=0, max_fixed=0, show_zero_exponent=True)


def convert_enum(value: Enum) -> Any:
    return value.value


def convert_matrix(value: np.ndarray) -> List[Any]:
    return [BaseInfo.dump_value(row) for row in value.tolist()]


@dataclass
class BaseInfo:
    """Base class of every report."""

    class Config:
        """Converters applied to field values, first match wins."""

        dumpers: Dict[Type[Any], Callable[..., Any]] = {
            Fraction: convert_to_str,
            BigFloat: convert_bigfloat,
            Enum: convert_enum,
            PurePath: convert_to_str,
            np.ndarray: convert_matrix,
        }

    csv_header: ClassVar[Optional[Tuple[str, ...]]] = None

    @classmethod
    def dump_value(cls, value: Any) -> Any:
        """Convert a value, recursing into containers and nested reports."""
        if isinstance(value, BaseInfo):
            return value.as_dict()
        if isinstance(value, dict):
            return {key: cls.dump_value(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [cls.dump_value(item) for item in value]
        for dumper_type, func in BaseInfo.Config.dumpers.items():
            if isinstance(value, dumper_type):
                return func(value)
        return value

    def as_dict(self, exclude_none: bool = True) -> Dict[str, Any]:
        """Convert this object to a dictionary."""
        data = {}
        for item in fields(self):
            value = getattr(self, item.name)
            if exclude_none and value is None:
                continue
            data[item.name] = self.dump_value(value)
        return data

    def as_json(self, exclude_none: bool = True) -> str:
        """Convert this object to a JSON string."""
        return orjson_dumps(self.as_dict(exclude_none=exclude_none))

    def csv_rows(self) -> Iterable[Sequence[Any]]:
        """Rows of the CSV rendering; reports without one refuse the format."""
        raise InvalidArgumentsError(f'{type(self).__name__} has no CSV form, use --format json')

    def as_csv(self) -> str:
        """
        Render the report as CSV.

        The header is written plainly, scalar values are quoted so that no tool reads them as floats.
        """
        rows = list(self.csv_rows())
        header = self.csv_header or CSV_HEADER
        buffer = io.StringIO()
        buffer.write(','.join(header) + '\n')
        writer = csv.writer(buffer, quoting=csv.QUOTE_NONNUMERIC, lineterminator='\n')
        for row in rows:
            writer.writerow(self.dump_value(list(row)))
        return buffer.getvalue()


def _triplets(entries: Iterable[Triplet]) -> Tuple[Triplet, ...]:
    return tuple(sorted(entries, key=lambda triplet: (triplet[0], triplet[1])))


@dataclass
class MomentMatrixInfo(BaseInfo):
    """Truncated moment matrix as (row, col, value) triplets."""

    rows: int
    cols: int
    p: int
    q: int
    entries: Tuple[Triplet, ...]

    @classmethod
    def from_moment_matrix(cls, M: MomentMatrix) -> 'MomentMatrixInfo':
        return cls(rows=M.rows, cols=M.cols, p=M.p, q=M.q, entries=_triplets(M.triplets()))

    def csv_rows(self) -> Iterable[Sequence[Any]]:
        return self.entries


@dataclass
class FactorsInfo(BaseInfo):
    """Unit lower ``L_L``, diagonal ``D`` and unit upper ``U_R`` of a factorization."""

    csv_header = ('factor', 'row', 'col', 'value')

    N: int
    L: Tuple[Triplet, ...]
    D: Tuple[Any, ...]
    U: Tuple[Triplet, ...]

    @classmethod
    def from_factors(cls, f: GaussBorelFactors) -> 'FactorsInfo':
        lower = ((row, col, f.L_unit[row, col]) for row in range(f.N) for col in range(row + 1))
        upper = ((row, col, f.U_unit[row, col]) for row in range(f.N) for col in range(row, f.N))
        return cls(N=f.N, L=_triplets(lower), D=tuple(f.D), U=_triplets(upper))

    def csv_rows(self) -> Iterable[Sequence[Any]]:
        yield from (('L', *triplet) for triplet in self.L)
        yield from (('D', index, index, value) for index, value in enumerate(self.D))
        yield from (('U', *triplet) for triplet in self.U)


@dataclass
class PolynomialInfo(BaseInfo):
    """Ascending coefficients of one component of one polynomial."""

    n: int
    component: int
    coeffs: Tuple[Any, ...]


@dataclass
class PolynomialTableInfo(BaseInfo):
    """Every component of the polynomials ``0..n_max`` of a table."""

    csv_header = ('n', 'component', 'power', 'value')

    side: str
    normalization: str
    polynomials: Tuple[PolynomialInfo, ...]

    @classmethod
    def from_table(cls, t: PolynomialTable, n_max: int) -> 'PolynomialTableInfo':
        polynomials = tuple(
            PolynomialInfo(n=n, component=c, coeffs=t.component(n, c))
            for n in range(min(n_max + 1, t.N))
            for c in range(1, t.components + 1)
        )
        return cls(side=t.side.value, normalization=t.normalization.value, polynomials=polynomials)

    def csv_rows(self) -> Iterable[Sequence[Any]]:
        for polynomial in self.polynomials:
            for power, value in enumerate(polynomial.coeffs):
                yield polynomial.n, polynomial.component, power, value


@dataclass
class RecurrenceInfo(BaseInfo):
    """In-band entries of a recurrence matrix window."""

    side: str
    n_max: int
    p: int
    q: int
    entries: Tuple[Triplet, ...]
    residuals: Optional[Dict[str, Any]] = None

    @classmethod
    def from_recurrence(cls, T: BandedRecurrence, residuals: Optional[Dict[str, Any]] = None) -> 'RecurrenceInfo':
        return cls(
            side=T.side.value,
            n_max=T.n_max,
            p=T.p,
            q=T.q,
            entries=_triplets(T.band_entries()),
            residuals=residuals,
        )

    def csv_rows(self) -> Iterable[Sequence[Any]]:
        return self.entries


@dataclass
class FactorEntriesInfo(BaseInfo):
    """Off-diagonal entries of one bidiagonal factor."""

    k: int
    kind: str
    entries: Tuple[Triplet, ...]


@dataclass
class ChainReportInfo(BaseInfo):
    """Bidiagonal factors of one chain and the residuals of the checks run on them."""

    csv_header = ('k', 'kind', 'row', 'col', 'value')

    side: str
    K: int
    factors: Tuple[FactorEntriesInfo, ...]
    residuals: Dict[str, Any] = field(default_factory=dict)

    def csv_rows(self) -> Iterable[Sequence[Any]]:
        for factor in self.factors:
            for triplet in factor.entries:
                yield (factor.k, factor.kind, *triplet)


@dataclass
class BidiagReportInfo(BaseInfo):
    """Left and right chains of one measure with the outcome of the factorization checks."""

    csv_header = ChainReportInfo.csv_header

    chains: Tuple[ChainReportInfo, ...]
    passed: bool

    def csv_rows(self) -> Iterable[Sequence[Any]]:
        for chain in self.chains:
            yield from chain.csv_rows()


@dataclass
class DarbouxInfo(BaseInfo):
    """Recurrence matrix of a transformed measure obtained by permuting bidiagonal factors."""

    side: str
    k: int
    recurrence: RecurrenceInfo
    residuals: Dict[str, Any]
    passed: bool

    def csv_rows(self) -> Iterable[Sequence[Any]]:
        return self.recurrence.entries


@dataclass
class OracleReport(BaseInfo):
    """Comparison of a main-path result with an independent computation."""

    subject: str
    max_abs_deviation: Any
    passed: bool

    def as_dict(self, exclude_none: bool = True) -> Dict[str, Any]:
        data = super().as_dict(exclude_none=exclude_none)
        data['pass'] = data.pop('passed')
        return data


@dataclass
class SuiteInfo(BaseInfo):
    """Outcome of one verification suite."""

    name: str
    passed: bool
    residual: Optional[Any] = None
    details: Optional[Dict[str, Any]] = None


@dataclass
class VerifyReportInfo(BaseInfo):
    """Outcomes of the selected verification suites in registry order."""

    csv_header = ('suite', 'passed', 'residual')

    suites: Tuple[SuiteInfo, ...]
    passed: bool

    def csv_rows(self) -> Iterable[Sequence[Any]]:
        for suite in self.suites:
            yield suite.name, str(suite.passed).lower(), suite.residual if suite.residual is not None else ''


def render(report: BaseInfo, output_format: str, meta: Optional[Dict[str, Any]] = None) -> str:
    """Render a report as a JSON document (with its ``meta`` block) or as CSV."""
    if output_format == 'csv':
        return report.as_csv()
    document: Dict[str, Any] = {}
    if meta is not None:
        document['meta'] = BaseInfo.dump_value(meta)
    document.update(report.as_dict())
    return orjson_dumps(document) + '\n'
