"""
Daily and monthly series, CSV ingestion, and the mixed-frequency panel.

Dates are held as ``numpy.datetime64[D]`` arrays and months as
``numpy.datetime64[M]`` arrays, so month arithmetic (``t - k``) is plain
integer arithmetic on the underlying representation.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from garchmidas.errors import (
    DuplicateDate,
    EmptyPeriod,
    InsufficientLagHistory,
    MalformedRow,
    NonPositivePrice,
    RegressorGap,
    WrongKind,
)

__all__ = [
    "DEFAULT_LAGS",
    "DailySeries",
    "LowFrequencySeries",
    "MixedPanel",
    "Period",
    "align_panel",
    "atomic_write_text",
    "compute_log_returns",
    "load_daily_series",
    "load_monthly_series",
    "realized_volatility",
    "to_month",
    "write_daily_csv",
    "write_monthly_csv",
]

DEFAULT_LAGS = 24
KINDS = ("price", "log_return")


def to_month(value) -> np.datetime64:
    """Coerce ``'YYYY-MM'``, a date, or a datetime64 to ``datetime64[M]``."""
    if isinstance(value, str) and len(value) > 7:
        value = value[:7]
    return np.datetime64(value, "M")


def _month_of(dates: np.ndarray) -> np.ndarray:
    return dates.astype("datetime64[M]")


@dataclass(frozen=True, eq=False)
class DailySeries:
    """Dated daily observations, either prices or log returns."""

    dates: np.ndarray
    values: np.ndarray
    kind: str = "price"

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if dates.ndim != 1 or dates.shape != values.shape:
            raise ValueError("dates and values must be 1-d arrays of equal length")
        if dates.size > 1:
            step = np.diff(dates.astype(np.int64))
            if np.any(step == 0):
                dup = dates[1:][step == 0][0]
                raise DuplicateDate(f"duplicate date {dup}")
            if np.any(step < 0):
                raise ValueError("dates must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if self.kind == "price":
            if np.any(values <= 0):
                bad = dates[values <= 0][0]
                raise NonPositivePrice(f"non-positive price on {bad}")
            if values.size < 2:
                raise ValueError("a price series needs at least two observations")

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, DailySeries):
            return NotImplemented
        return (
            self.kind == other.kind
            and np.array_equal(self.dates, other.dates)
            and np.array_equal(self.values, other.values)
        )

    @property
    def months(self) -> np.ndarray:
        return _month_of(self.dates)

    def between(self, start=None, end=None) -> "DailySeries":
        """Sub-series with months in ``[start, end]`` (either bound optional)."""
        keep = np.ones(len(self), dtype=bool)
        months = self.months
        if start is not None:
            keep &= months >= to_month(start)
        if end is not None:
            keep &= months <= to_month(end)
        return DailySeries(self.dates[keep], self.values[keep], self.kind)


@dataclass(frozen=True, eq=False)
class LowFrequencySeries:
    """Monthly regressor values over a gap-free range of months."""

    months: np.ndarray
    values: np.ndarray
    label: str = "x"

    def __post_init__(self):
        months = np.asarray(self.months, dtype="datetime64[M]")
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "months", months)
        object.__setattr__(self, "values", values)
        if months.ndim != 1 or months.shape != values.shape:
            raise ValueError("months and values must be 1-d arrays of equal length")
        if months.size == 0:
            raise ValueError("a monthly series needs at least one observation")
        step = np.diff(months.astype(np.int64))
        if np.any(step == 0):
            raise DuplicateDate(f"duplicate month {months[1:][step == 0][0]}")
        if np.any(step < 0):
            raise ValueError("months must be strictly increasing")
        if np.any(step > 1):
            gap = months[:-1][step > 1][0]
            raise RegressorGap(f"{self.label}: no value for the month after {gap}")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.label}: values must be finite")

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, LowFrequencySeries):
            return NotImplemented
        return (
            self.label == other.label
            and np.array_equal(self.months, other.months)
            and np.array_equal(self.values, other.values)
        )

    @property
    def first(self) -> np.datetime64:
        return self.months[0]

    @property
    def last(self) -> np.datetime64:
        return self.months[-1]

    def value_at(self, month) -> float:
        idx = int((to_month(month) - self.first).astype(int))
        if idx < 0 or idx >= len(self):
            raise KeyError(str(month))
        return float(self.values[idx])


@dataclass(frozen=True)
class Period:
    period_id: np.datetime64
    day_returns: np.ndarray

    @property
    def n_days(self) -> int:
        return int(self.day_returns.size)


@dataclass(frozen=True, eq=False)
class MixedPanel:
    """
    Daily returns grouped into calendar months, each month carrying the
    ``n_lags`` regressor values of the months strictly before it.

    Attributes
    ----------
    dates, returns : ndarray
        Daily dates and log returns of every modelled day, in order.
    period_index : ndarray of int
        Row of ``months``/``lags`` that each day belongs to.
    months : ndarray of datetime64[M]
        One entry per period.
    lags : ndarray, shape (n_periods, n_lags)
        ``lags[t, k - 1]`` is the regressor value in month ``months[t] - k``.
    regressor : str
        Label of the regressor series.
    n_excluded : int
        Leading months dropped for lack of lag history.
    """

    dates: np.ndarray
    returns: np.ndarray
    period_index: np.ndarray
    months: np.ndarray
    lags: np.ndarray
    regressor: str = "x"
    n_excluded: int = 0

    def __post_init__(self):
        if self.lags.ndim != 2 or self.lags.shape[0] != self.months.size:
            raise ValueError("lag matrix must have one row per period")
        if self.returns.shape != self.period_index.shape:
            raise ValueError("returns and period_index must align")
        counts = np.bincount(self.period_index, minlength=self.months.size)
        if self.months.size and np.any(counts == 0):
            raise EmptyPeriod(f"month {self.months[counts == 0][0]} has no trading days")

    @property
    def n_lags(self) -> int:
        return int(self.lags.shape[1])

    @property
    def n_periods(self) -> int:
        return int(self.months.size)

    @property
    def n_days(self) -> int:
        return int(self.returns.size)

    @property
    def days_per_period(self) -> np.ndarray:
        return np.bincount(self.period_index, minlength=self.n_periods)

    @property
    def periods(self) -> list[Period]:
        bounds = np.concatenate([[0], np.cumsum(self.days_per_period)])
        return [
            Period(self.months[t], self.returns[bounds[t]:bounds[t + 1]])
            for t in range(self.n_periods)
        ]

    def select(self, start=None, end=None) -> "MixedPanel":
        """Sub-panel restricted to months in ``[start, end]``."""
        keep = np.ones(self.n_periods, dtype=bool)
        if start is not None:
            keep &= self.months >= to_month(start)
        if end is not None:
            keep &= self.months <= to_month(end)
        rows = np.flatnonzero(keep)
        if rows.size == 0:
            raise EmptyPeriod(f"no months of the panel fall in [{start}, {end}]")
        day_keep = keep[self.period_index]
        return MixedPanel(
            dates=self.dates[day_keep],
            returns=self.returns[day_keep],
            period_index=self.period_index[day_keep] - rows[0],
            months=self.months[rows],
            lags=self.lags[rows],
            regressor=self.regressor,
            n_excluded=self.n_excluded,
        )

    def daily_series(self) -> DailySeries:
        return DailySeries(self.dates, self.returns, "log_return")


# ---------------------------------------------------------------------------
# CSV ingestion


def _read_rows(path, columns):
    path = Path(path)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise MalformedRow(f"{path}: empty file", line=1)
        header = [h.strip() for h in header]
        try:
            idx = [header.index(c) for c in columns]
        except ValueError:
            raise MalformedRow(
                f"{path}: header {header} lacks columns {list(columns)}", line=1
            ) from None
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < len(header):
                raise MalformedRow(f"{path}: expected {len(header)} fields", line=line)
            rows.append((line, [row[i].strip() for i in idx]))
    if not rows:
        raise MalformedRow(f"{path}: no data rows", line=2)
    return rows


def _parse_float(text, path, line):
    try:
        value = float(text)
    except ValueError:
        raise MalformedRow(f"{path}: cannot parse value {text!r}", line=line) from None
    if not np.isfinite(value):
        raise MalformedRow(f"{path}: non-finite value {text!r}", line=line)
    return value


def load_daily_series(path, kind="price", date_column="date", value_column="value"):
    """
    Read a daily CSV with a header row into a :class:`DailySeries`.

    Rows may appear in any order; they are sorted by date. ``kind`` says
    whether the values are prices or log returns and is never inferred.
    """
    rows = _read_rows(path, (date_column, value_column))
    dates, values = [], []
    for line, (d, v) in rows:
        try:
            dates.append(np.datetime64(d, "D"))
        except ValueError:
            raise MalformedRow(f"{path}: cannot parse date {d!r}", line=line) from None
        values.append(_parse_float(v, path, line))
    dates = np.array(dates, dtype="datetime64[D]")
    values = np.array(values)
    order = np.argsort(dates, kind="stable")
    return DailySeries(dates[order], values[order], kind)


def load_monthly_series(path, label=None, month_column="month", value_column="value"):
    """Read a monthly ``month,value`` CSV (month as ``YYYY-MM``)."""
    rows = _read_rows(path, (month_column, value_column))
    months, values = [], []
    for line, (m, v) in rows:
        try:
            if len(m) != 7:
                raise ValueError
            months.append(np.datetime64(m, "M"))
        except ValueError:
            raise MalformedRow(f"{path}: cannot parse month {m!r}", line=line) from None
        values.append(_parse_float(v, path, line))
    months = np.array(months, dtype="datetime64[M]")
    values = np.array(values)
    order = np.argsort(months, kind="stable")
    if label is None:
        label = Path(path).stem
    return LowFrequencySeries(months[order], values[order], label)


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_daily_csv(series: DailySeries, path):
    rows = ((str(d), repr(float(v))) for d, v in zip(series.dates, series.values))
    atomic_write_text(path, _csv_text(("date", "value"), rows))


def write_monthly_csv(series: LowFrequencySeries, path):
    rows = ((str(m), repr(float(v))) for m, v in zip(series.months, series.values))
    atomic_write_text(path, _csv_text(("month", "value"), rows))


# ---------------------------------------------------------------------------
# Transformations


def compute_log_returns(series: DailySeries) -> DailySeries:
    """Log price differences, dated on the later day of each pair."""
    if series.kind != "price":
        raise WrongKind("compute_log_returns expects a price series")
    return DailySeries(series.dates[1:], np.diff(np.log(series.values)), "log_return")


def _group_months(dates):
    """Contiguous month labels and day->month index; raises on empty months."""
    months = _month_of(dates)
    first = months[0]
    offset = (months - first).astype(np.int64)
    counts = np.bincount(offset)
    if np.any(counts == 0):
        missing = first + np.flatnonzero(counts == 0)[0]
        raise EmptyPeriod(f"month {missing} has no trading days")
    return first + np.arange(counts.size), offset


def realized_volatility(data, label="RV") -> LowFrequencySeries:
    """
    Monthly realized volatility: the sum of squared daily returns in each month.

    ``data`` is a return :class:`DailySeries` (grouped by calendar month) or a
    :class:`MixedPanel` (grouped by its periods).
    """
    if isinstance(data, MixedPanel):
        rv = np.bincount(data.period_index, weights=data.returns**2,
                         minlength=data.n_periods)
        return LowFrequencySeries(data.months, rv, label)
    if data.kind != "log_return":
        raise WrongKind("realized volatility needs a return series")
    if len(data) == 0:
        raise EmptyPeriod("no daily returns")
    months, offset = _group_months(data.dates)
    rv = np.bincount(offset, weights=data.values**2, minlength=months.size)
    return LowFrequencySeries(months, rv, label)


def align_panel(daily: DailySeries, regressor: LowFrequencySeries,
                n_lags: int = DEFAULT_LAGS, drop_incomplete: bool = False) -> MixedPanel:
    """
    Group daily returns into calendar months and attach lagged regressor values.

    Every month ``t`` receives the regressor at months ``t-1, ..., t-n_lags``.
    A month whose lag window starts before the regressor does raises
    :class:`InsufficientLagHistory`, unless ``drop_incomplete`` is set, in
    which case such leading months are dropped and counted in
    ``MixedPanel.n_excluded``. A regressor that ends before ``t-1`` for some
    modelled month raises :class:`RegressorGap`.
    """
    if daily.kind != "log_return":
        raise WrongKind("align_panel expects a log-return series")
    if n_lags < 1:
        raise ValueError("n_lags must be a positive integer")
    if len(daily) == 0:
        raise EmptyPeriod("daily series is empty")
    months, offset = _group_months(daily.dates)

    first_usable = regressor.first + n_lags
    if months[-1] - 1 > regressor.last:
        raise RegressorGap(
            f"{regressor.label} ends {regressor.last}; month {months[-1]} needs "
            f"a value for {months[-1] - 1}"
        )
    usable = months >= first_usable
    if not usable.all():
        if not drop_incomplete or not usable.any():
            raise InsufficientLagHistory(
                f"{regressor.label} starts {regressor.first}; {n_lags} lags are "
                f"available from {first_usable}, but the daily data start {months[0]}",
                first_usable=first_usable,
            )
    keep_months = months[usable]
    n_excluded = int((~usable).sum())
    day_keep = usable[offset]

    # lags[t, k-1] = regressor value at month (keep_months[t] - k)
    base = (keep_months - regressor.first).astype(np.int64)
    cols = base[:, None] - np.arange(1, n_lags + 1)[None, :]
    lags = regressor.values[cols]

    return MixedPanel(
        dates=daily.dates[day_keep],
        returns=daily.values[day_keep],
        period_index=offset[day_keep] - n_excluded,
        months=keep_months,
        lags=lags,
        regressor=regressor.label,
        n_excluded=n_excluded,
    )
