import csv
import datetime
import pathlib
import typing
from collections import abc

import orjson
import pydantic

__all__ = [
    'FLOOR',
    'BalanceReport',
    'CellIndex',
    'ConvergenceReport',
    'DecayMeasurement',
    'DecayRecord',
    'DefectReport',
    'ExperimentManifest',
    'Floor',
    'NormEntry',
    'NormReport',
    'OracleReport',
    'OutputFile',
    'PairSeries',
    'PredicateReport',
    'ProfileNorms',
    'SetSizeReport',
    'SweepReport',
    'TimeSeries',
    'TimeSeriesRecord',
    'write_json',
    'write_jsonl',
]

Floor = typing.Literal['floor']
FLOOR: Floor = 'floor'

_JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2


class CellIndex(pydantic.BaseModel):
    """A localization address (k, p, q, l).

    ``p`` and ``q`` are non-positive integers or the ``'floor'`` sentinel
    that collects every mode below ``p_min``/``q_min``; ``None`` means the
    index is not localized at all.

    """

    model_config = pydantic.ConfigDict(frozen=True)

    k: int
    p: int | Floor | None = None
    q: int | Floor | None = None
    l: int | None = None  # noqa: E741

    @pydantic.field_validator('p', 'q')
    @classmethod
    def check_nonpositive(
        cls, value: int | Floor | None
    ) -> int | Floor | None:
        if isinstance(value, int) and value > 0:
            raise ValueError('anisotropy indices must be <= 0')
        return value

    @pydantic.model_validator(mode='after')
    def check_angular_index(self) -> typing.Self:
        if self.l is not None:
            if self.l < 0:
                raise ValueError('l must be >= 0')
            if isinstance(self.p, int) and self.p + self.l < 0:
                raise ValueError('cells with p + l < 0 are empty')
        return self

    def admissible(self, p_min: int, q_min: int) -> bool:
        """False when the (p, q) pair cannot hold any mode."""
        if self.p is None or self.q is None:
            return True
        p = p_min if self.p == FLOOR else self.p
        q = q_min if self.q == FLOOR else self.q
        return 2.0**-3 <= 2.0 ** (2 * p) + 2.0**q <= 2.0**3

    def sort_key(self) -> tuple[int, ...]:
        def rank(value: int | Floor | None) -> tuple[int, int]:
            if value is None:
                return (0, 0)
            if value == FLOOR:
                return (1, 0)
            return (2, value)

        return (self.k, *rank(self.p), *rank(self.q), *rank(self.l))

    def labels(self) -> tuple[str, str, str, str]:
        def text(value: int | str | None) -> str:
            return '' if value is None else str(value)

        return text(self.k), text(self.p), text(self.q), text(self.l)


class NormEntry(pydantic.BaseModel):
    cell: CellIndex
    weight: float = pydantic.Field(ge=0)
    localized_l2: float = pydantic.Field(ge=0)
    product: float = pydantic.Field(ge=0)
    boundary: bool = False  # p + l == 0, the R_{<=l} branch


class NormReport(pydantic.BaseModel):
    """Weighted sup over localization cells."""

    name: str
    entries: list[NormEntry] = pydantic.Field(default_factory=list)

    @pydantic.computed_field  # type: ignore[prop-decorator]
    @property
    def value(self) -> float:
        return max((e.product for e in self.entries), default=0.0)

    @pydantic.computed_field  # type: ignore[prop-decorator]
    @property
    def argmax_cell(self) -> CellIndex | None:
        if not self.entries or self.value == 0.0:
            return None
        return max(self.entries, key=lambda e: e.product).cell

    def write_csv(self, path: pathlib.Path) -> None:
        with path.open('w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(
                ['k', 'p', 'q', 'l', 'weight', 'localized_l2', 'product']
            )
            for entry in sorted(
                self.entries, key=lambda e: e.cell.sort_key()
            ):
                writer.writerow(
                    [
                        *entry.cell.labels(),
                        repr(entry.weight),
                        repr(entry.localized_l2),
                        repr(entry.product),
                    ]
                )


class DecayRecord(pydantic.BaseModel):
    t: float
    sup_norm: float
    bound: float


class DecayMeasurement(pydantic.BaseModel):
    """Sup-norm history of a localized piece under the linear flow."""

    cell: CellIndex | None
    n: int
    times: list[float]
    sup_norms: list[float]
    bound_values: list[float]
    fitted_slope: float | None = None
    fit_window: tuple[float, float] | None = None
    d_norm: float = 0.0
    accepted: bool | None = None

    @pydantic.model_validator(mode='after')
    def check_series(self) -> typing.Self:
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError('times must be strictly increasing')
        if any(value < 0 for value in self.sup_norms):
            raise ValueError('sup norms must be nonnegative')
        if not len(self.times) == len(self.sup_norms) == len(
            self.bound_values
        ):
            raise ValueError('series lengths differ')
        return self

    def records(self) -> list[DecayRecord]:
        return [
            DecayRecord(t=t, sup_norm=s, bound=b)
            for t, s, b in zip(
                self.times, self.sup_norms, self.bound_values, strict=True
            )
        ]


class SweepReport(pydantic.BaseModel):
    n_samples: int
    n_hypothesis_hits: int = 0
    seed: int | None = None
    min_ratio: float | None = None
    max_ratio: float | None = None
    min_p_max: int | None = None
    min_derivative_ratio: float | None = None
    max_derivative_ratio: float | None = None
    violations: list[dict[str, typing.Any]] = pydantic.Field(
        default_factory=list
    )


class PredicateReport(pydantic.BaseModel):
    predicate: str
    status: typing.Literal[
        'holds', 'violated', 'hypothesis-empty', 'support-empty'
    ]
    draws: int = 0
    hits: int = 0
    conclusions: dict[str, bool] = pydantic.Field(default_factory=dict)
    counterexamples: list[list[list[float]]] = pydantic.Field(
        default_factory=list
    )


class SetSizeReport(pydantic.BaseModel):
    n_pairs: int
    seed: int
    n: int
    ratios: list[float] = pydantic.Field(default_factory=list)

    @pydantic.computed_field  # type: ignore[prop-decorator]
    @property
    def constant(self) -> float:
        return max(self.ratios, default=0.0)


class DefectReport(pydantic.BaseModel):
    order: int
    lhs: float
    rhs: float

    @pydantic.computed_field  # type: ignore[prop-decorator]
    @property
    def relative_defect(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return 0.0 if scale == 0.0 else abs(self.lhs - self.rhs) / scale


class OracleReport(pydantic.BaseModel):
    dt: float
    defect: float
    relative: bool


class ProfileNorms(pydantic.BaseModel):
    """Whole-field norms of both profiles of a stored state."""

    t: float
    kappa: float
    b_plus: float
    b_minus: float
    x_plus: float
    x_minus: float
    d_plus: float
    d_minus: float


class TimeSeriesRecord(pydantic.BaseModel):
    step: int
    t: float
    l2: float
    h1: float
    grad_sup: float
    divergence_residual: float
    axisymmetry_residual: float
    axis_mass: float = 0.0
    b_plus: float | None = None
    b_minus: float | None = None
    x_plus: float | None = None
    x_minus: float | None = None
    d_plus: float | None = None
    d_minus: float | None = None


class TimeSeries(pydantic.BaseModel):
    """Diagnostics of one run.

    ``records`` follow the diagnostics cadence; ``energy`` holds one row
    per step, ``[t, |u|^2, |grad u|^2, |grad u|_inf, |u|_{H^m}^2 ...,
    |grad u|_{H^m}^2 ...]`` for m = 1..sobolev_order.

    """

    kappa: float
    dt: float
    records: list[TimeSeriesRecord] = pydantic.Field(default_factory=list)
    energy: list[list[float]] = pydantic.Field(default_factory=list)

    @pydantic.model_validator(mode='after')
    def check_monotone(self) -> typing.Self:
        times = [r.t for r in self.records]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError('time series must be monotone in t')
        return self

    def write_csv(self, path: pathlib.Path) -> None:
        fields = list(TimeSeriesRecord.model_fields)
        with path.open('w', newline='', encoding='utf-8') as handle:
            writer = csv.DictWriter(
                handle, fieldnames=fields, lineterminator='\n'
            )
            writer.writeheader()
            for record in self.records:
                writer.writerow(record.model_dump())

    def write_energy_csv(self, path: pathlib.Path) -> None:
        orders = max(len(self.energy[0]) - 4, 0) // 2 if self.energy else 0
        header = ['t', 'l2_sq', 'grad_sq', 'grad_sup']
        header += [f'h{m}_sq' for m in range(1, orders + 1)]
        header += [f'grad_h{m}_sq' for m in range(1, orders + 1)]
        with path.open('w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(header)
            writer.writerows([repr(v) for v in row] for row in self.energy)


class BalanceReport(pydantic.BaseModel):
    """Energy balance of a run at Sobolev order m."""

    m: int
    times: list[float]
    defects: list[float]
    constant: float | None = None
    growth_exponent: float | None = None

    @pydantic.computed_field  # type: ignore[prop-decorator]
    @property
    def max_defect(self) -> float:
        return max((abs(d) for d in self.defects), default=0.0)


class PairSeries(pydantic.BaseModel):
    kappa_1: float
    kappa_2: float
    times: list[float]
    difference_sq: list[float]
    envelope: list[float]

    @pydantic.computed_field  # type: ignore[prop-decorator]
    @property
    def max_chain_ratio(self) -> float:
        ratios = [
            d / e if e > 0 else (0.0 if d == 0 else float('inf'))
            for d, e in zip(self.difference_sq, self.envelope, strict=True)
        ]
        return max(ratios, default=0.0)


class ConvergenceReport(pydantic.BaseModel):
    kappas: list[float]
    t_end: float
    pairs: list[PairSeries]
    exponent_kappa: float | None = None
    exponent_kappa_sq: float | None = None
    exponent_time: float | None = None
    exponent_time_sq: float | None = None
    allowance: float = 0.05

    @pydantic.computed_field  # type: ignore[prop-decorator]
    @property
    def chain_holds(self) -> bool:
        return all(
            pair.max_chain_ratio <= 1.0 + self.allowance
            for pair in self.pairs
        )


class OutputFile(pydantic.BaseModel):
    path: str
    sha256: str


class ExperimentManifest(pydantic.BaseModel):
    command: str
    config: dict[str, typing.Any]
    version: str
    seed: int | None = None
    started_at: datetime.datetime
    finished_at: datetime.datetime | None = None
    outputs: list[OutputFile] = pydantic.Field(default_factory=list)


def write_json(path: pathlib.Path, model: pydantic.BaseModel) -> None:
    """Write a model as sorted, indented JSON (byte-stable across runs)."""
    path.write_bytes(
        orjson.dumps(model.model_dump(mode='json'), option=_JSON_OPTIONS)
    )


def write_jsonl(
    path: pathlib.Path, models: abc.Iterable[pydantic.BaseModel]
) -> None:
    with path.open('wb') as handle:
        for model in models:
            handle.write(
                orjson.dumps(
                    model.model_dump(mode='json'),
                    option=orjson.OPT_SORT_KEYS | orjson.OPT_APPEND_NEWLINE,
                )
            )
