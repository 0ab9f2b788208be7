"""Reader/writer for the US national COVID Tracking CSV and series extraction."""
from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataGapError, IntegrityError, ParseError, SchemaError
from .series import TimeSeries

COUNT_COLUMNS = (
    "death",
    "deathIncrease",
    "inIcuCumulative",
    "inIcuCurrently",
    "hospitalizedIncrease",
    "hospitalizedCurrently",
    "hospitalizedCumulative",
    "negative",
    "negativeIncrease",
    "onVentilatorCumulative",
    "onVentilatorCurrently",
    "positive",
    "positiveIncrease",
    "states",
    "totalTestResults",
    "totalTestResultsIncrease",
    "recovered",
)
COLUMNS = ("date",) + COUNT_COLUMNS
CUMULATIVE_COLUMNS = (
    "death", "positive", "negative", "totalTestResults", "recovered",
    "hospitalizedCumulative",
)


@dataclass(frozen=True)
class CovidRecord:
    date: dt.date
    counts: dict

    def __getattr__(self, name):
        counts = object.__getattribute__(self, "counts")
        if name in counts:
            return counts[name]
        raise AttributeError(name)


@dataclass(frozen=True)
class Dataset:
    records: tuple
    source: str = ""
    row_count: int = 0

    def __len__(self):
        return len(self.records)

    @property
    def dates(self):
        return [r.date for r in self.records]

    def column(self, name):
        """Column values as float64 with NaN for missing cells."""
        if name not in COUNT_COLUMNS:
            raise SchemaError(f"unknown column {name!r}; valid columns: {', '.join(COUNT_COLUMNS)}")
        return np.array([np.nan if r.counts[name] is None else r.counts[name]
                         for r in self.records], dtype=np.float64)

    def invariant_violations(self):
        """(column, date) pairs where a cumulative column decreases."""
        bad = []
        for name in CUMULATIVE_COLUMNS:
            prev = None
            for r in self.records:
                v = r.counts[name]
                if v is None:
                    continue
                if prev is not None and v < prev:
                    bad.append((name, r.date))
                prev = v
        return bad


def _parse_date(text, row):
    text = text.strip()
    try:
        if len(text) == 8 and text.isdigit():
            return dt.datetime.strptime(text, "%Y%m%d").date()
        return dt.date.fromisoformat(text)
    except ValueError:
        raise ParseError(f"row {row}: bad date {text!r}", row=row, column="date") from None


def _parse_count(text, row, column):
    text = text.strip()
    if text == "":
        return None
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"row {row}, column {column}: non-numeric value {text!r}",
                         row=row, column=column) from None
    if not math.isfinite(v):
        raise ParseError(f"row {row}, column {column}: non-finite value {text!r}",
                         row=row, column=column)
    return v


def parse_csv(path):
    """Read the 18-column national CSV.

    Column order is free and extra columns are ignored.  A file sorted newest
    first (the original COVID Tracking export) is accepted and returned in
    ascending date order; any other ordering problem is an integrity error.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        missing = [c for c in COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing required column(s): {', '.join(missing)}")
        pos = {c: header.index(c) for c in COLUMNS}
        records = []
        for rowno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < len(header):
                row = row + [""] * (len(header) - len(row))
            date = _parse_date(row[pos["date"]], rowno)
            counts = {c: _parse_count(row[pos[c]], rowno, c) for c in COUNT_COLUMNS}
            records.append(CovidRecord(date, counts))

    dates = [r.date for r in records]
    if len(set(dates)) != len(dates):
        raise IntegrityError(f"{path}: duplicate dates")
    if len(records) > 1 and dates[0] > dates[-1]:
        records.reverse()
        dates.reverse()
    one_day = dt.timedelta(days=1)
    for a, b in zip(dates, dates[1:]):
        if b - a != one_day:
            raise IntegrityError(f"{path}: dates out of order or not daily between {a} and {b}")
    return Dataset(tuple(records), str(path), len(records))


def _format_count(v):
    if v is None:
        return ""
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def write_csv(ds, path):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in ds.records:
            writer.writerow([r.date.isoformat()] + [_format_count(r.counts[c]) for c in COUNT_COLUMNS])
    return path


def extract_series(ds, column, trim_head=0):
    """The ``column`` values after dropping the first ``trim_head`` records."""
    if column not in COUNT_COLUMNS:
        raise SchemaError(f"unknown column {column!r}; valid columns: {', '.join(COUNT_COLUMNS)}")
    n = len(ds)
    if trim_head < 0 or trim_head >= n:
        raise ValueError(f"trim_head must lie in [0, {n}), got {trim_head}")
    kept = ds.records[trim_head:]
    vals = []
    for r in kept:
        v = r.counts[column]
        if v is None:
            raise DataGapError(f"missing {column} on {r.date.isoformat()}", date=r.date)
        vals.append(v)
    return TimeSeries(np.array(vals), kept[0].date, column)


def derive_infection_series(ds, trim_head=0):
    """Currently-infected ``I = C - H`` and hospitalized ``IH = H - R - D``.

    ``C`` is ``positive``, ``H`` ``hospitalizedCumulative``, ``R``
    ``recovered`` and ``D`` ``death``.
    """
    c = extract_series(ds, "positive", trim_head)
    h = extract_series(ds, "hospitalizedCumulative", trim_head)
    r = extract_series(ds, "recovered", trim_head)
    d = extract_series(ds, "death", trim_head)
    infected = TimeSeries(c.values - h.values, c.start_date, "I")
    hospitalized = TimeSeries(h.values - r.values - d.values, c.start_date, "IH")
    return infected, hospitalized
