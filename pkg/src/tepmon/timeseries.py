"""Ingestion of recorded process data and normal-operation statistics.

Canonical on-disk format is a headered CSV with the 52 columns
``xmeas_1..xmeas_41, xmv_1..xmv_11`` in raw engineering units.  Files
from other distributions of the benchmark data must be reshaped to this
layout first (one row per time step, measured columns before manipulated
ones).
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from . import catalog
from .errors import EmptySeries, InsufficientData, MalformedRow, MissingFile


@dataclass(frozen=True)
class SampleVector:
    t: int
    values: np.ndarray  # 52 raw engineering-unit values

    def __post_init__(self):
        if self.values.shape != (catalog.N_VARIABLES,):
            raise MalformedRow(self.t, f"expected 52 values, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise MalformedRow(self.t, "non-finite value")


@dataclass(frozen=True)
class TimeSeries:
    fault_id: int
    data: np.ndarray  # (length, 52)

    @property
    def length(self) -> int:
        return self.data.shape[0]

    def sample(self, t: int) -> SampleVector:
        return SampleVector(t, self.data[t])

    def samples(self):
        for t in range(self.length):
            yield SampleVector(t, self.data[t])


@dataclass(frozen=True)
class NormalStats:
    mean: np.ndarray
    std: np.ndarray
    n: int


def load_timeseries(path: str | os.PathLike, fault_id: int) -> TimeSeries:
    """Load a 52-column CSV into a TimeSeries, rejecting malformed rows.

    A header row is optional; when present it must match the canonical
    column names.  NaN/Inf values are rejected outright.
    """
    if not os.path.exists(path):
        raise MissingFile(str(path))
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row:
                continue
            if lineno == 1 and not _is_numeric_row(row):
                _validate_header(row, lineno)
                continue
            if len(row) != catalog.N_VARIABLES:
                raise MalformedRow(
                    lineno, f"expected {catalog.N_VARIABLES} columns, got {len(row)}"
                )
            try:
                values = [float(v) for v in row]
            except ValueError as exc:
                raise MalformedRow(lineno, str(exc)) from exc
            if not all(np.isfinite(values)):
                raise MalformedRow(lineno, "non-finite value")
            rows.append(values)
    if not rows:
        raise EmptySeries(str(path))
    return TimeSeries(fault_id=fault_id, data=np.asarray(rows, dtype=np.float64))


def save_timeseries(ts: TimeSeries, path: str | os.PathLike) -> None:
    """Write a TimeSeries in the canonical headered-CSV layout."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(catalog.CSV_COLUMNS)
        for row in ts.data:
            writer.writerow([repr(float(v)) for v in row])


def compute_normal_stats(ts: TimeSeries) -> NormalStats:
    """Column means and sample standard deviations (n-1 divisor)."""
    n = ts.length
    if n < 2:
        raise InsufficientData(f"need at least 2 samples, got {n}")
    mean = ts.data.mean(axis=0)
    std = ts.data.std(axis=0, ddof=1)
    return NormalStats(mean=mean, std=std, n=n)


def _is_numeric_row(row: list[str]) -> bool:
    try:
        float(row[0])
        return True
    except ValueError:
        return False


def _validate_header(row: list[str], lineno: int) -> None:
    if len(row) != catalog.N_VARIABLES:
        extras = [c for c in row if c not in catalog.CSV_COLUMNS]
        detail = f"; unexpected columns: {extras}" if extras else ""
        raise MalformedRow(
            lineno,
            f"header has {len(row)} columns, expected {catalog.N_VARIABLES}{detail}",
        )
    if row != catalog.CSV_COLUMNS:
        raise MalformedRow(lineno, "header does not match canonical column names")
