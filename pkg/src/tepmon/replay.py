"""Replay of recorded series as a stand-in for a live simulator.

One sample is emitted per tick from the active series; switching the
active fault splices at the current time index so the emitted stream
stays continuous in t, the way a fault would begin "now" on a running
plant.
"""

from __future__ import annotations

import os
import pathlib
import threading
import time
from dataclasses import dataclass

from .errors import MissingDataset, UnknownFault
from .synth import N_FAULTS
from .timeseries import SampleVector, TimeSeries, load_timeseries


@dataclass(frozen=True)
class ReplayConfig:
    data_dir: str | os.PathLike
    tick_interval: float = 1.0  # seconds
    start_fault: int = 0
    loop_at_end: bool = False

    def __post_init__(self):
        if self.tick_interval <= 0:
            raise ValueError("tick_interval must be positive")


class EndOfSeries:
    """Sentinel emitted once when the active series is exhausted."""

    def __init__(self, t: int):
        self.t = t


class Replayer:
    """Single-producer sample source with mid-stream fault injection.

    ``next_sample`` is called by the owning monitoring loop;
    ``inject_fault`` may be called from other threads.
    """

    def __init__(self, config: ReplayConfig):
        self.config = config
        self._series_cache: dict[int, TimeSeries] = {}
        self._lock = threading.Lock()
        self._active_fault = config.start_fault
        self._t = 0
        self._emitted = 0
        self._load(config.start_fault)  # fail fast if the dataset is absent

    @property
    def active_fault(self) -> int:
        with self._lock:
            return self._active_fault

    @property
    def emitted(self) -> int:
        with self._lock:
            return self._emitted

    def _load(self, fault_id: int) -> TimeSeries:
        if fault_id not in self._series_cache:
            path = pathlib.Path(self.config.data_dir) / f"fault_{fault_id}.csv"
            if not path.exists():
                raise MissingDataset(fault_id)
            self._series_cache[fault_id] = load_timeseries(path, fault_id)
        return self._series_cache[fault_id]

    def inject_fault(self, fault_id: int) -> None:
        """Switch the source series; the cursor keeps its position."""
        if not 0 <= fault_id <= N_FAULTS:
            raise UnknownFault(f"fault_id must be in 0..{N_FAULTS}, got {fault_id}")
        with self._lock:
            if fault_id == self._active_fault:
                return
            self._load(fault_id)
            self._active_fault = fault_id

    def next_sample(self) -> SampleVector | EndOfSeries:
        """Emit the next sample (monotone t), or the end sentinel."""
        with self._lock:
            series = self._load(self._active_fault)
            cursor = self._t
            if cursor >= series.length:
                if self.config.loop_at_end:
                    cursor = cursor % series.length
                else:
                    return EndOfSeries(self._t)
            sample = SampleVector(self._t, series.data[min(cursor, series.length - 1)])
            self._t += 1
            self._emitted += 1
            return sample

    def stream(self):
        """Generator pacing emission at the configured tick interval."""
        while True:
            item = self.next_sample()
            yield item
            if isinstance(item, EndOfSeries):
                return
            time.sleep(self.config.tick_interval)
