"""Labelled univariate time series: loading, resampling, and fold splitting.

Timestamps are held internally as epoch seconds (float64). CSV files carry a
header row with configurable column names; timestamps may be ISO-8601 strings
or plain epoch seconds. Anomaly labels come from NAB-style JSON window files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import (
    DuplicateTimestamp,
    EmptySeries,
    GapTooLarge,
    IrreconcilableGrid,
    MalformedRow,
    MalformedWindow,
    SeriesTooShort,
)


@dataclass
class TimeSeries:
    """Uniformly-sampled (after :func:`resample_uniform`) univariate series.

    ``labels`` is None when no ground truth is attached; otherwise a boolean
    array marking records inside an anomaly window.
    """

    timestamps: np.ndarray
    values: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=bool)
            if len(self.labels) != len(self.values):
                raise MalformedWindow("labels length differs from values length")
        if len(self.timestamps) != len(self.values):
            raise EmptySeries("timestamps and values differ in length")
        if len(self.timestamps) > 1 and not np.all(np.diff(self.timestamps) > 0):
            raise DuplicateTimestamp("timestamps must be strictly increasing")
        if np.isnan(self.values).any():
            raise MalformedRow(int(np.flatnonzero(np.isnan(self.values))[0]), "NaN value")

    def __len__(self):
        return len(self.values)

    @property
    def spacing(self) -> float:
        if len(self) < 2:
            raise SeriesTooShort("spacing needs at least two records")
        return float(self.timestamps[1] - self.timestamps[0])

    def is_uniform(self, rtol: float = 1e-9) -> bool:
        if len(self) < 3:
            return True
        d = np.diff(self.timestamps)
        return bool(np.allclose(d, d[0], rtol=rtol, atol=0))

    def slice(self, start: int, stop: int) -> "TimeSeries":
        return TimeSeries(
            self.timestamps[start:stop],
            self.values[start:stop],
            None if self.labels is None else self.labels[start:stop],
        )

    def take(self, indices: np.ndarray) -> "TimeSeries":
        return TimeSeries(
            self.timestamps[indices],
            self.values[indices],
            None if self.labels is None else self.labels[indices],
        )


@dataclass(frozen=True)
class FoldSplit:
    """One expanding-window CV fold.

    ``train_range``/``test_range`` are half-open index intervals into the
    parent series; ``train_indices`` is the training range with labelled
    anomalies already excluded.
    """

    fold_index: int
    train_range: tuple[int, int]
    test_range: tuple[int, int]
    train_indices: np.ndarray = field(repr=False)


def _parse_timestamp(text: str) -> float:
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ValueError(f"unparseable timestamp {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def load_csv(path, timestamp_column: str = "timestamp",
             value_column: str = "value",
             label_column: str | None = None) -> TimeSeries:
    """Load a series from a headered CSV, sorting by timestamp.

    Raises :class:`MalformedRow` (with the offending 1-based data row index),
    :class:`DuplicateTimestamp`, or :class:`EmptySeries`.
    """
    times, values, labels = [], [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or timestamp_column not in reader.fieldnames:
            raise MalformedRow(0, f"missing column {timestamp_column!r}")
        if value_column not in reader.fieldnames:
            raise MalformedRow(0, f"missing column {value_column!r}")
        has_labels = label_column is not None and label_column in reader.fieldnames
        for i, row in enumerate(reader, start=1):
            try:
                t = _parse_timestamp(row[timestamp_column])
            except ValueError as exc:
                raise MalformedRow(i, str(exc)) from exc
            try:
                v = float(row[value_column])
            except (TypeError, ValueError):
                raise MalformedRow(i, f"non-numeric value {row[value_column]!r}")
            if math.isnan(v):
                raise MalformedRow(i, "NaN value")
            times.append(t)
            values.append(v)
            if has_labels:
                labels.append(row[label_column].strip() not in ("0", "", "false", "False"))
    if not times:
        raise EmptySeries(f"{path} has no data rows")
    order = np.argsort(times, kind="stable")
    times = np.asarray(times)[order]
    if np.any(np.diff(times) == 0):
        raise DuplicateTimestamp(f"{path} contains duplicate timestamps")
    values = np.asarray(values)[order]
    lab = np.asarray(labels, dtype=bool)[order] if labels else None
    return TimeSeries(times, values, lab)


def write_csv(series: TimeSeries, path,
              timestamp_column: str = "timestamp",
              value_column: str = "value") -> None:
    """Write ``timestamp,value[,label]`` with round-trippable floats."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [timestamp_column, value_column]
        if series.labels is not None:
            header.append("label")
        writer.writerow(header)
        for i in range(len(series)):
            row = [repr(float(series.timestamps[i])), repr(float(series.values[i]))]
            if series.labels is not None:
                row.append("1" if series.labels[i] else "0")
            writer.writerow(row)


def merge_windows(windows) -> list[tuple[float, float]]:
    """Sort windows and merge overlapping/touching ones."""
    cleaned = []
    for start, end in windows:
        if end < start:
            raise MalformedWindow(f"window end {end} before start {start}")
        cleaned.append((float(start), float(end)))
    cleaned.sort()
    merged: list[list[float]] = []
    for start, end in cleaned:
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return [(s, e) for s, e in merged]


def load_label_windows(path, dataset: str | None = None) -> list[tuple[float, float]]:
    """Load NAB-format label windows: JSON object mapping dataset name to a
    list of ``[start, end]`` timestamp pairs.

    When the file holds several datasets, ``dataset`` selects one.
    """
    with open(path) as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict):
        raise MalformedWindow("label file must be a JSON object")
    if dataset is None:
        if len(payload) != 1:
            raise MalformedWindow(
                f"label file holds {len(payload)} datasets; pass a dataset name")
        dataset = next(iter(payload))
    if dataset not in payload:
        raise MalformedWindow(f"dataset {dataset!r} not in label file")
    windows = []
    for pair in payload[dataset]:
        if len(pair) != 2:
            raise MalformedWindow(f"window {pair!r} is not a [start, end] pair")
        windows.append((_parse_timestamp(str(pair[0])), _parse_timestamp(str(pair[1]))))
    return merge_windows(windows)


def apply_label_windows(series: TimeSeries, windows) -> TimeSeries:
    """Return a copy of ``series`` labelled true inside any window (inclusive
    endpoints, NAB convention)."""
    windows = merge_windows(windows)
    labels = np.zeros(len(series), dtype=bool)
    for start, end in windows:
        labels |= (series.timestamps >= start) & (series.timestamps <= end)
    return TimeSeries(series.timestamps, series.values, labels)


def _modal_spacing(diffs: np.ndarray) -> float:
    uniq, counts = np.unique(diffs, return_counts=True)
    best = int(np.argmax(counts))
    if counts[best] * 2 < len(diffs):
        raise IrreconcilableGrid(
            "no spacing covers at least half of the observed intervals")
    return float(uniq[best])


def resample_uniform(series: TimeSeries, max_gap_steps: int = 3) -> TimeSeries:
    """Snap a nearly-regular series onto a uniform grid.

    The grid step is the modal spacing of the input. Points snap to the
    nearest grid point (within half a step); grid points left empty are
    filled by carrying the last observation forward, up to ``max_gap_steps``
    consecutive fills. Longer gaps raise :class:`GapTooLarge` (use
    :func:`resample_split` to break the series at such gaps instead).
    """
    if len(series) < 2:
        raise SeriesTooShort("resampling needs at least two records")
    diffs = np.diff(series.timestamps)
    if series.is_uniform():
        return series
    step = _modal_spacing(diffs)
    t0 = float(series.timestamps[0])
    slots = np.rint((series.timestamps - t0) / step).astype(np.int64)
    # When two raw points snap to the same slot, keep the nearer one.
    offsets = np.abs(series.timestamps - (t0 + slots * step))
    keep: dict[int, int] = {}
    for i, slot in enumerate(slots):
        j = keep.get(int(slot))
        if j is None or offsets[i] < offsets[j]:
            keep[int(slot)] = i
    n_slots = int(max(keep)) + 1
    values = np.empty(n_slots)
    labels = np.zeros(n_slots, dtype=bool) if series.labels is not None else None
    filled = np.zeros(n_slots, dtype=bool)
    for slot, i in keep.items():
        values[slot] = series.values[i]
        filled[slot] = True
        if labels is not None:
            labels[slot] = series.labels[i]
    run = 0
    for slot in range(n_slots):
        if filled[slot]:
            run = 0
            continue
        run += 1
        if run > max_gap_steps:
            raise GapTooLarge(
                f"gap of more than {max_gap_steps} grid steps near slot {slot}")
        values[slot] = values[slot - 1]
        if labels is not None:
            labels[slot] = labels[slot - 1]
    timestamps = t0 + step * np.arange(n_slots)
    return TimeSeries(timestamps, values, labels)


def resample_split(series: TimeSeries, max_gap_steps: int = 3) -> list[TimeSeries]:
    """Like :func:`resample_uniform` but break the series at oversized gaps,
    returning one uniform segment per contiguous stretch."""
    if len(series) < 2:
        raise SeriesTooShort("resampling needs at least two records")
    step = series.spacing if series.is_uniform() else _modal_spacing(np.diff(series.timestamps))
    breaks = np.flatnonzero(np.diff(series.timestamps) > (max_gap_steps + 1) * step)
    segments = []
    start = 0
    for b in list(breaks) + [len(series) - 1]:
        seg = series.slice(start, b + 1)
        if len(seg) >= 2:
            segments.append(resample_uniform(seg, max_gap_steps))
        start = b + 1
    return segments


def expanding_folds(series: TimeSeries, k: int = 5) -> list[FoldSplit]:
    """Expanding-window k-fold split.

    The index range is cut into ``k + 1`` equal blocks (remainder going to
    the last); fold ``i`` trains on blocks ``0..i`` and tests on block
    ``i + 1``. Labelled anomalies are dropped from the training indices; the
    test block is left untouched.
    """
    n = len(series)
    if k < 2:
        raise SeriesTooShort("k must be at least 2")
    if n < k + 1:
        raise SeriesTooShort(f"series of length {n} cannot form {k} folds")
    block = n // (k + 1)
    folds = []
    for i in range(k):
        train_end = (i + 1) * block
        test_end = (i + 2) * block if i < k - 1 else n
        idx = np.arange(0, train_end)
        if series.labels is not None:
            idx = idx[~series.labels[:train_end]]
        folds.append(FoldSplit(i, (0, train_end), (train_end, test_end), idx))
    return folds


def training_view(series: TimeSeries, fold: FoldSplit) -> TimeSeries:
    """The fold's training stream with anomalous records removed (the
    remainder is concatenated, not zero-filled)."""
    return series.take(fold.train_indices)
