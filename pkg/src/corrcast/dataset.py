"""Loading, validation and splitting of M4-format time-series data.

The M4 distribution stores each frequency group as a ragged CSV: a header
row followed by one row per series, the series id in the first cell and the
observations in the remaining cells, with trailing empty cells allowed.
Metadata (seasonal pattern, horizon, starting date) lives in a separate
info CSV.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

FREQUENCY_LABELS = ("Hourly", "Daily", "Weekly", "Monthly", "Quarterly", "Yearly")

# Series-length range observed in the Daily group; lengths outside it are
# suspicious but not invalid.
DAILY_LENGTH_RANGE = (93, 9919)

DEFAULT_HORIZON = 14

_DATE_FORMATS = (
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%d %H:%M",
    "%Y-%m-%d",
    "%d-%m-%y %H:%M",
    "%d-%m-%Y %H:%M",
    "%d-%m-%Y",
)


class LoadError(ValueError):
    """Raised when an input file violates the expected format."""


@dataclass(frozen=True)
class TimeSeries:
    """One univariate series: id, float64 values, and optional metadata.

    Values are stored read-only so a loaded dataset can be shared freely
    across worker processes and threads.
    """

    id: str
    values: np.ndarray
    frequency_label: str = "Daily"
    horizon: int = DEFAULT_HORIZON
    start_date: date | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError(f"series {self.id!r} must hold a non-empty 1-D value array")
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"series {self.id!r} contains non-finite values")
        if self.horizon < 1:
            raise ValueError(f"series {self.id!r} has non-positive horizon {self.horizon}")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def date_of(self, position: int) -> date | None:
        """Calendar date of the 0-based value position (one value per day)."""
        if self.start_date is None:
            return None
        return date.fromordinal(self.start_date.toordinal() + position)


class Dataset:
    """Ordered, immutable collection of series with unique ids.

    Iteration order equals file order; the file position (0-based here,
    1-based in the ids of M4 files) is the canonical series index used for
    deterministic tie-breaking.
    """

    def __init__(self, series: Iterable[TimeSeries]):
        self.series: list[TimeSeries] = list(series)
        self._index: dict[str, int] = {}
        for pos, ts in enumerate(self.series):
            if ts.id in self._index:
                raise LoadError(f"duplicate series id {ts.id!r}")
            self._index[ts.id] = pos

    def __len__(self) -> int:
        return len(self.series)

    def __iter__(self) -> Iterator[TimeSeries]:
        return iter(self.series)

    def __contains__(self, sid: str) -> bool:
        return sid in self._index

    def __getitem__(self, sid: str) -> TimeSeries:
        return self.series[self._index[sid]]

    def position(self, sid: str) -> int:
        """0-based file position of a series id."""
        return self._index[sid]

    def ids(self) -> list[str]:
        return [ts.id for ts in self.series]


@dataclass(frozen=True)
class InfoRecord:
    """Per-series metadata from an M4 info file."""

    frequency_label: str
    period: int | None
    horizon: int
    start_date: date | None


@dataclass(frozen=True)
class HoldoutSplit:
    """Training prefix plus the withheld final ``h`` values of each series."""

    train: Dataset
    test: dict[str, np.ndarray] = field(default_factory=dict)


def load_m4_values(path: str | Path) -> Dataset:
    """Load a ragged M4 values CSV into a Dataset.

    The first row is a header and is skipped. Each subsequent row is a
    series id followed by decimal values; trailing empty cells are dropped,
    but an empty or non-numeric cell in the middle of a row is an error
    (column numbers in error messages are 1-based and count the id cell).
    """
    series = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            next(reader)
        except StopIteration:
            raise LoadError(f"{path}: empty file") from None
        for row in reader:
            if not row:
                continue
            sid = row[0].strip()
            if not sid:
                raise LoadError(f"{path}: row {reader.line_num} has an empty series id")
            cells = row[1:]
            while cells and cells[-1].strip() == "":
                cells.pop()
            values = np.empty(len(cells), dtype=np.float64)
            for i, cell in enumerate(cells):
                try:
                    v = float(cell)
                except ValueError:
                    raise LoadError(
                        f"malformed value in row {sid!r}, column {i + 2}: {cell!r}"
                    ) from None
                if not math.isfinite(v):
                    raise LoadError(
                        f"non-finite value in row {sid!r}, column {i + 2}: {cell!r}"
                    )
                values[i] = v
            if values.size == 0:
                raise LoadError(f"series {sid!r} has no values")
            series.append(TimeSeries(id=sid, values=values))
    return Dataset(series)


def _parse_start_date(text: str) -> date | None:
    text = text.strip()
    if not text:
        return None
    for fmt in _DATE_FORMATS:
        try:
            return datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    return None


def load_m4_info(path: str | Path) -> dict[str, InfoRecord]:
    """Parse an M4 info CSV into a map id -> InfoRecord.

    Columns are located by header name: the series id column contains
    "id", the seasonal-pattern label column is "SP", the seasonal period
    column is "Frequency", plus "Horizon" and "StartingDate". Unparseable
    dates produce a warning and are treated as absent.
    """
    records: dict[str, InfoRecord] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip().lower() for h in next(reader)]
        except StopIteration:
            raise LoadError(f"{path}: empty file") from None

        def find(*names, required=True):
            for name in names:
                if name in header:
                    return header.index(name)
            if required:
                raise LoadError(f"{path}: missing column (expected one of {names})")
            return None

        id_col = find("m4id", "id")
        sp_col = find("sp", "frequency_label", required=False)
        period_col = find("frequency", "period", required=False)
        horizon_col = find("horizon")
        date_col = find("startingdate", "starting_date", "start_date", required=False)

        for row in reader:
            if not row or not row[0].strip():
                continue
            sid = row[id_col].strip()
            label = row[sp_col].strip() if sp_col is not None and sp_col < len(row) else ""
            if label and label not in FREQUENCY_LABELS:
                raise LoadError(f"{path}: unknown frequency label {label!r} for {sid!r}")
            period = None
            if period_col is not None and period_col < len(row) and row[period_col].strip():
                period = int(float(row[period_col]))
            try:
                horizon = int(float(row[horizon_col]))
            except (ValueError, IndexError):
                raise LoadError(f"{path}: bad horizon for series {sid!r}") from None
            start = None
            if date_col is not None and date_col < len(row):
                raw = row[date_col]
                start = _parse_start_date(raw)
                if start is None and raw.strip():
                    warnings.warn(
                        f"unparseable start date {raw!r} for series {sid!r}; treated as absent"
                    )
            records[sid] = InfoRecord(
                frequency_label=label or "Daily",
                period=period,
                horizon=horizon,
                start_date=start,
            )
    return records


def attach_meta(dataset: Dataset, info: Mapping[str, InfoRecord]) -> Dataset:
    """Return a new Dataset with info-file metadata attached to each series.

    Series without an info record keep their current metadata. Daily series
    whose length falls outside the expected range trigger a warning only.
    """
    out = []
    for ts in dataset:
        rec = info.get(ts.id)
        if rec is None:
            out.append(ts)
            continue
        new = TimeSeries(
            id=ts.id,
            values=ts.values,
            frequency_label=rec.frequency_label,
            horizon=rec.horizon,
            start_date=rec.start_date,
        )
        lo, hi = DAILY_LENGTH_RANGE
        if new.frequency_label == "Daily" and not lo <= len(new) <= hi:
            warnings.warn(
                f"Daily series {new.id!r} has length {len(new)}, outside the expected "
                f"range [{lo}, {hi}]"
            )
        out.append(new)
    return Dataset(out)


def holdout_split(dataset: Dataset, h: int) -> HoldoutSplit:
    """Move the last ``h`` values of every series into a test map.

    Every series must be strictly longer than ``h``; violations name the
    offending series. Concatenating train and test values reproduces the
    original series exactly.
    """
    if h < 1:
        raise ValueError(f"holdout length must be positive, got {h}")
    train = []
    test = {}
    for ts in dataset:
        if len(ts) <= h:
            raise ValueError(
                f"series {ts.id!r} has length {len(ts)} <= holdout length {h}"
            )
        train.append(
            TimeSeries(
                id=ts.id,
                values=ts.values[:-h],
                frequency_label=ts.frequency_label,
                horizon=ts.horizon,
                start_date=ts.start_date,
            )
        )
        test[ts.id] = ts.values[-h:].copy()
    return HoldoutSplit(train=Dataset(train), test=test)


def write_values_csv(dataset: Dataset, path: str | Path) -> None:
    """Write a Dataset back to the ragged M4 values layout.

    Values are printed with full round-trip precision, so a load/write/load
    cycle is bit-identical.
    """
    width = max((len(ts) for ts in dataset), default=0)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + [f"V{i}" for i in range(1, width + 1)])
        for ts in dataset:
            writer.writerow([ts.id] + [repr(float(v)) for v in ts.values])


def write_forecast_csv(forecasts: Mapping[str, np.ndarray], path: str | Path) -> None:
    """Write forecasts as ``id,F1,...,Fh`` rows with round-trip precision."""
    width = max((len(v) for v in forecasts.values()), default=0)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id"] + [f"F{i}" for i in range(1, width + 1)])
        for sid, vals in forecasts.items():
            writer.writerow([sid] + [repr(float(v)) for v in np.asarray(vals).ravel()])


def read_forecast_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Read a forecast CSV (``id,F1,...,Fh``) into an ordered id -> values map."""
    out: dict[str, np.ndarray] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            next(reader)
        except StopIteration:
            raise LoadError(f"{path}: empty file") from None
        for row in reader:
            if not row or not row[0].strip():
                continue
            sid = row[0].strip()
            if sid in out:
                raise LoadError(f"{path}: duplicate forecast id {sid!r}")
            cells = row[1:]
            while cells and cells[-1].strip() == "":
                cells.pop()
            try:
                out[sid] = np.array([float(c) for c in cells], dtype=np.float64)
            except ValueError:
                raise LoadError(f"{path}: malformed forecast row for {sid!r}") from None
    return out
