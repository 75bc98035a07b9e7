"""OHLC bar ingestion, fuzzy price preprocessing, descriptive statistics,
realized volatility, and plot-ready table emission.

Each bar's (low, close, high) triple becomes a triangular fuzzy price; its
risk-weighted expectation is the working price series, and bar-to-bar
percentage changes of that series feed the jump labeling pipeline.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta
from pathlib import Path
from typing import IO, Sequence, Union

import numpy as np
from scipy import stats as sps

from .fuzzy import EtaLike, RiskAttitude, TriangularFuzzyNumber, expectation

__all__ = [
    "Bar",
    "BarFormat",
    "FuzzyBarSeries",
    "DescriptiveStats",
    "DayRecord",
    "RealizedVolSeries",
    "DayBoundary",
    "PlotTable",
    "parse_bars",
    "serialize_bars",
    "to_fuzzy_series",
    "descriptive_stats",
    "realized_volatility",
    "emit_plot_data",
]


@dataclass(frozen=True)
class Bar:
    """One OHLC bar at minute precision."""

    timestamp: datetime
    open: float
    high: float
    low: float
    close: float
    volume: float | None = None

    def __post_init__(self):
        lo_oc = min(self.open, self.close)
        hi_oc = max(self.open, self.close)
        if not (self.low <= lo_oc and hi_oc <= self.high):
            raise ValueError(
                f"OHLC invariant violated at {self.timestamp}: "
                f"low={self.low} open={self.open} close={self.close} high={self.high}"
            )
        if self.volume is not None and self.volume < 0:
            raise ValueError(f"negative volume at {self.timestamp}")


@dataclass(frozen=True)
class BarFormat:
    """Column layout of a delimited bar file."""

    delimiter: str = ","
    timestamp_column: str = "timestamp"
    open_column: str = "open"
    high_column: str = "high"
    low_column: str = "low"
    close_column: str = "close"
    volume_column: str | None = "volume"


def _parse_timestamp(text: str, row: int) -> datetime:
    raw = text.strip()
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    try:
        return datetime.fromisoformat(raw)
    except ValueError as exc:
        raise ValueError(f"row {row}: bad timestamp {text!r}: {exc}") from None


def parse_bars(
    source: Union[str, Path, IO[str]], fmt: BarFormat = BarFormat()
) -> list[Bar]:
    """Parse and validate delimited OHLC text.

    Rows must be time sorted with unique timestamps (no silent re-sort);
    every violation is reported with its data row number (header is row 0).
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", newline="") as fp:
            return parse_bars(fp, fmt)
    reader = csv.DictReader(source, delimiter=fmt.delimiter)
    if reader.fieldnames is None:
        raise ValueError("empty input: missing header row")
    required = [
        fmt.timestamp_column,
        fmt.open_column,
        fmt.high_column,
        fmt.low_column,
        fmt.close_column,
    ]
    missing = [c for c in required if c not in reader.fieldnames]
    if missing:
        raise ValueError(f"missing columns: {', '.join(missing)}")
    has_volume = (
        fmt.volume_column is not None and fmt.volume_column in reader.fieldnames
    )

    bars: list[Bar] = []
    prev_ts: datetime | None = None
    for i, rec in enumerate(reader, start=1):
        ts = _parse_timestamp(rec[fmt.timestamp_column], i)
        try:
            o = float(rec[fmt.open_column])
            h = float(rec[fmt.high_column])
            lo = float(rec[fmt.low_column])
            c = float(rec[fmt.close_column])
            v = float(rec[fmt.volume_column]) if has_volume and rec[fmt.volume_column] not in (None, "") else None
        except (TypeError, ValueError) as exc:
            raise ValueError(f"row {i}: malformed numeric field: {exc}") from None
        if prev_ts is not None:
            if ts == prev_ts:
                raise ValueError(f"row {i}: duplicate timestamp {ts}")
            if ts < prev_ts:
                raise ValueError(f"row {i}: timestamps not increasing ({ts} after {prev_ts})")
        try:
            bar = Bar(ts, o, h, lo, c, v)
        except ValueError as exc:
            raise ValueError(f"row {i}: {exc}") from None
        bars.append(bar)
        prev_ts = ts
    return bars


def serialize_bars(bars: Sequence[Bar], fmt: BarFormat = BarFormat()) -> str:
    """Delimited-text form of a bar list; round-trips through parse_bars."""
    out = io.StringIO()
    cols = [
        fmt.timestamp_column,
        fmt.open_column,
        fmt.high_column,
        fmt.low_column,
        fmt.close_column,
    ]
    any_volume = any(b.volume is not None for b in bars)
    if any_volume and fmt.volume_column:
        cols.append(fmt.volume_column)
    out.write(fmt.delimiter.join(cols) + "\n")
    for b in bars:
        row = [
            b.timestamp.isoformat(),
            repr(b.open),
            repr(b.high),
            repr(b.low),
            repr(b.close),
        ]
        if any_volume and fmt.volume_column:
            row.append("" if b.volume is None else repr(b.volume))
        out.write(fmt.delimiter.join(row) + "\n")
    return out.getvalue()


@dataclass(frozen=True)
class FuzzyBarSeries:
    """Bars with derived fuzzy prices, expectations, and percentage changes.

    ``pct_changes[k-1]`` is the percentage change of the expectation series
    from bar k-1 to bar k (so it has one fewer entry than there are bars).
    """

    bars: tuple[Bar, ...]
    fuzzy_prices: tuple[TriangularFuzzyNumber, ...]
    eta: RiskAttitude
    expectations: np.ndarray
    pct_changes: np.ndarray

    def __len__(self) -> int:
        return len(self.bars)


def to_fuzzy_series(bars: Sequence[Bar], eta: EtaLike = RiskAttitude()) -> FuzzyBarSeries:
    """Attach (low, close, high) fuzzy prices and their eta-weighted
    expectations to a validated bar list."""
    if isinstance(eta, (int, float)):
        eta = RiskAttitude(float(eta))
    fuzzy_prices = tuple(TriangularFuzzyNumber(b.low, b.close, b.high) for b in bars)
    exp = np.array([expectation(p, eta) for p in fuzzy_prices])
    if len(exp) and np.min(exp) <= 0.0:
        raise ValueError("fuzzy price expectations must be strictly positive")
    if len(exp) >= 2:
        pct = 100.0 * (exp[1:] - exp[:-1]) / exp[:-1]
    else:
        pct = np.empty(0)
    return FuzzyBarSeries(tuple(bars), fuzzy_prices, eta, exp, pct)


@dataclass(frozen=True)
class DescriptiveStats:
    mean: float
    median: float
    minimum: float
    maximum: float
    skewness: float
    kurtosis: float

    def as_dict(self) -> dict:
        return {
            "mean": self.mean,
            "median": self.median,
            "minimum": self.minimum,
            "maximum": self.maximum,
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
        }


def descriptive_stats(values: Sequence[float]) -> DescriptiveStats:
    """Mean, median, extremes, bias-adjusted sample skewness, and
    bias-adjusted excess kurtosis. Needs n >= 4 and nonzero dispersion."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or len(arr) < 4:
        raise ValueError("descriptive statistics need at least 4 values")
    if np.var(arr) == 0.0:
        raise ValueError("skewness and kurtosis are undefined for a constant series")
    return DescriptiveStats(
        mean=float(np.mean(arr)),
        median=float(np.median(arr)),
        minimum=float(np.min(arr)),
        maximum=float(np.max(arr)),
        skewness=float(sps.skew(arr, bias=False)),
        kurtosis=float(sps.kurtosis(arr, fisher=True, bias=False)),
    )


@dataclass(frozen=True)
class DayBoundary:
    """Session cutoff: bars at or before ``cutoff`` belong to that calendar
    date's session, later bars roll into the next date (24-hour sessions)."""

    cutoff: time = time(17, 0)

    def session_date(self, ts: datetime) -> date:
        if ts.timetz().replace(tzinfo=None) <= self.cutoff:
            return ts.date()
        return ts.date() + timedelta(days=1)


@dataclass(frozen=True)
class DayRecord:
    day: date
    rv: float
    n_returns: int


@dataclass(frozen=True)
class RealizedVolSeries:
    days: tuple[DayRecord, ...]
    warnings: tuple[str, ...] = ()


def realized_volatility(
    series: FuzzyBarSeries, boundary: DayBoundary = DayBoundary()
) -> RealizedVolSeries:
    """Per-session sum of squared log returns of the expectation series.

    Returns never span a session boundary; sessions with fewer than two
    bars are omitted and reported in ``warnings``.
    """
    if len(series) == 0:
        raise ValueError("series is empty")
    days: list[DayRecord] = []
    warnings: list[str] = []
    exp = series.expectations
    groups: dict[date, list[int]] = {}
    for i, bar in enumerate(series.bars):
        groups.setdefault(boundary.session_date(bar.timestamp), []).append(i)
    for day in sorted(groups):
        idx = groups[day]
        if len(idx) < 2:
            warnings.append(f"{day.isoformat()}: fewer than 2 bars, day omitted")
            continue
        logs = np.log(exp[idx])
        rets = np.diff(logs)
        days.append(DayRecord(day, float(np.sum(rets * rets)), len(rets)))
    return RealizedVolSeries(tuple(days), tuple(warnings))


@dataclass(frozen=True)
class PlotTable:
    """Plot-ready rows with a fixed header; writes as delimited text."""

    kind: str
    header: tuple[str, ...]
    rows: tuple[tuple, ...]

    def write(self, fp: IO[str], delimiter: str = ",") -> None:
        fp.write(delimiter.join(self.header) + "\n")
        for row in self.rows:
            fp.write(delimiter.join(_cell(v) for v in row) + "\n")

    def to_text(self) -> str:
        out = io.StringIO()
        self.write(out)
        return out.getvalue()


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _monthly_box(series: FuzzyBarSeries) -> PlotTable:
    groups: dict[str, list[float]] = {}
    for bar, e in zip(series.bars, series.expectations):
        groups.setdefault(bar.timestamp.strftime("%Y-%m"), []).append(float(e))
    rows = []
    for month in sorted(groups):
        vals = np.array(groups[month])
        q1, q2, q3 = np.percentile(vals, [25.0, 50.0, 75.0])
        iqr = q3 - q1
        in_lo = vals[vals >= q1 - 1.5 * iqr]
        in_hi = vals[vals <= q3 + 1.5 * iqr]
        lo_whisker = float(np.min(in_lo))
        hi_whisker = float(np.max(in_hi))
        outliers = sorted(float(v) for v in vals[(vals < lo_whisker) | (vals > hi_whisker)])
        rows.append(
            (
                month,
                float(q1),
                float(q2),
                float(q3),
                lo_whisker,
                hi_whisker,
                len(outliers),
                ";".join(repr(o) for o in outliers),
            )
        )
    header = ("month", "q1", "median", "q3", "lo_whisker", "hi_whisker", "n_outliers", "outliers")
    return PlotTable("monthly_box", header, tuple(rows))


def _histogram(values: np.ndarray, kind: str, bins: int) -> PlotTable:
    counts, edges = np.histogram(values, bins=bins)
    rows = tuple(
        (float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(len(counts))
    )
    return PlotTable(kind, ("bin_left", "bin_right", "count"), rows)


def emit_plot_data(
    data: Union[FuzzyBarSeries, RealizedVolSeries],
    kind: str,
    bins: int = 50,
    rv_threshold: float = 0.0001,
) -> PlotTable:
    """Build one of the five plot tables.

    monthly_box, price_histogram, and pct_change_histogram take the fuzzy
    bar series; rv_heatmap and rv_line take a realized volatility series.
    The heatmap flags days with rv above ``rv_threshold`` (default 0.01%,
    i.e. 0.0001 in raw units).
    """
    if kind == "monthly_box":
        if not isinstance(data, FuzzyBarSeries):
            raise ValueError("monthly_box needs a FuzzyBarSeries")
        return _monthly_box(data)
    if kind == "price_histogram":
        if not isinstance(data, FuzzyBarSeries):
            raise ValueError("price_histogram needs a FuzzyBarSeries")
        return _histogram(data.expectations, kind, bins)
    if kind == "pct_change_histogram":
        if not isinstance(data, FuzzyBarSeries):
            raise ValueError("pct_change_histogram needs a FuzzyBarSeries")
        return _histogram(data.pct_changes, kind, bins)
    if kind == "rv_heatmap":
        if not isinstance(data, RealizedVolSeries):
            raise ValueError("rv_heatmap needs a RealizedVolSeries")
        rows = tuple(
            (d.day.isoformat(), d.rv, int(d.rv > rv_threshold)) for d in data.days
        )
        return PlotTable(kind, ("date", "rv", "above_threshold"), rows)
    if kind == "rv_line":
        if not isinstance(data, RealizedVolSeries):
            raise ValueError("rv_line needs a RealizedVolSeries")
        rows = tuple((d.day.isoformat(), d.rv) for d in data.days)
        return PlotTable(kind, ("date", "rv"), rows)
    raise ValueError(f"unknown plot kind {kind!r}")
