"""Loading bivariate CSV exports and the usual stationarity transforms."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ignis.errors import EmptyAfterCleaning, MissingColumn, NonPositivePrice, TooFewObservations
from ignis.features import pseudo_observations


@dataclass
class BivariateSeries:
    labels: tuple[str, str]
    x: np.ndarray
    y: np.ndarray
    timestamps: list[dt.date | dt.datetime] | None = None
    dropped_count: int = 0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.shape != self.y.shape:
            raise ValueError("x and y must have equal length")
        if self.timestamps is not None and len(self.timestamps) != self.x.size:
            raise ValueError("timestamps must align with values")

    def __len__(self) -> int:
        return self.x.size


def parse_timestamp(text: str) -> dt.date | dt.datetime:
    """ISO-8601 date or datetime (a trailing 'Z' is accepted)."""
    s = text.strip()
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    if len(s) == 10:
        return dt.date.fromisoformat(s)
    return dt.datetime.fromisoformat(s)


def _sort_key(ts: dt.date | dt.datetime) -> tuple:
    if isinstance(ts, dt.datetime):
        naive = ts.replace(tzinfo=None)
        return (naive.date(), naive.time())
    return (ts, dt.time.min)


def _finite_float(text: str) -> float:
    val = float(text)
    if not math.isfinite(val):
        raise ValueError("non-finite")
    return val


def load_bivariate_csv(path: str | Path, col_x: str, col_y: str, col_time: str | None = None) -> BivariateSeries:
    """Read two numeric columns (and optionally a time column) from a CSV file.

    Rows with a missing or unparseable cell in any requested column are
    dropped and counted.  With ``col_time`` the rows are returned in
    chronological order (stable for equal stamps).
    """
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for name in (col_x, col_y) + ((col_time,) if col_time else ()):
            if name not in header:
                raise MissingColumn(f"column {name!r} not found; available: {', '.join(header)}")
        xs, ys, stamps = [], [], []
        dropped = 0
        for row in reader:
            try:
                a = _finite_float(row[col_x])
                b = _finite_float(row[col_y])
                ts = parse_timestamp(row[col_time]) if col_time else None
            except (TypeError, ValueError):
                dropped += 1
                continue
            xs.append(a)
            ys.append(b)
            stamps.append(ts)
    if not xs:
        raise EmptyAfterCleaning(f"{path}: no usable rows ({dropped} dropped)")
    x, y = np.array(xs), np.array(ys)
    timestamps = None
    if col_time:
        order = sorted(range(len(stamps)), key=lambda i: _sort_key(stamps[i]))
        x, y = x[order], y[order]
        timestamps = [stamps[i] for i in order]
    return BivariateSeries((col_x, col_y), x, y, timestamps, dropped)


def log_returns(prices: Sequence[float]) -> np.ndarray:
    """r_i = ln(p_{i+1} / p_i)."""
    p = np.asarray(prices, dtype=float)
    if p.size < 2:
        raise TooFewObservations("log returns need at least 2 prices")
    if np.any(~(p > 0)):
        raise NonPositivePrice("log returns need strictly positive prices")
    return np.diff(np.log(p))


def difference(series: Sequence[float]) -> np.ndarray:
    s = np.asarray(series, dtype=float)
    if s.size < 2:
        raise TooFewObservations("differencing needs at least 2 values")
    return np.diff(s)


@dataclass
class MonthlyAggregate:
    months: list[str]
    mean: np.ndarray
    p99: np.ndarray
    skipped: list[str] = field(default_factory=list)

    def as_series(self) -> BivariateSeries:
        stamps = [dt.date(int(m[:4]), int(m[5:]), 1) for m in self.months]
        return BivariateSeries(("monthly_mean", "monthly_p99"), self.mean, self.p99, stamps)


def _month_index(key: str) -> int:
    return int(key[:4]) * 12 + int(key[5:]) - 1


def monthly_aggregate(timestamps, values, q: float = 99.0) -> MonthlyAggregate:
    """Per calendar month: arithmetic mean and the ``q``-th percentile.

    Percentiles interpolate linearly between order statistics.  Calendar
    months without data inside the observed span are not emitted; they are
    listed in ``skipped``.
    """
    vals = np.asarray(values, dtype=float)
    if len(timestamps) != vals.size:
        raise ValueError("timestamps and values must have equal length")
    groups: dict[str, list[float]] = {}
    for ts, val in zip(timestamps, vals):
        if isinstance(ts, str):
            ts = parse_timestamp(ts)
        groups.setdefault(f"{ts.year:04d}-{ts.month:02d}", []).append(float(val))
    months = sorted(groups, key=_month_index)
    mean = np.array([np.mean(groups[m]) for m in months])
    pct = np.array([np.percentile(groups[m], q, method="linear") for m in months])
    skipped = []
    if months:
        present = {_month_index(m) for m in months}
        for k in range(_month_index(months[0]), _month_index(months[-1]) + 1):
            if k not in present:
                skipped.append(f"{k // 12:04d}-{k % 12 + 1:02d}")
    return MonthlyAggregate(months, mean, pct, skipped)


def to_pseudo(series: BivariateSeries) -> tuple[np.ndarray, np.ndarray]:
    return pseudo_observations(series.x, series.y)


TRANSFORMS = ("none", "logret", "diff")


def apply_transform(series: BivariateSeries, kind: str) -> BivariateSeries:
    """Apply ``none``, ``logret`` or ``diff`` to both columns."""
    if kind == "none":
        return series
    fn = {"logret": log_returns, "diff": difference}.get(kind)
    if fn is None:
        raise ValueError(f"unknown transform {kind!r}; expected one of {TRANSFORMS}")
    stamps = series.timestamps[1:] if series.timestamps is not None else None
    return BivariateSeries(series.labels, fn(series.x), fn(series.y), stamps, series.dropped_count)
