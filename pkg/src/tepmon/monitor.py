"""Per-sample Hotelling monitoring: statistic, contribution decomposition,
top-k deviation reports, and the consecutive-exceedance alarm machine."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import _kernels, catalog
from .catalog import VariableDescriptor
from .errors import NonFiniteInput, OutOfOrderSample
from .pca import PcaModel
from .timeseries import SampleVector

CONSECUTIVE_REQUIRED = 6
PERCENT_CHANGE_MEAN_FLOOR = 1e-9


@dataclass(frozen=True)
class T2Point:
    t: int
    t2: float
    threshold: float
    exceeds: bool
    alarm: bool


@dataclass(frozen=True)
class ContributionVector:
    cont: np.ndarray  # per retained variable
    column_map: np.ndarray  # retained index -> original variable id

    def by_variable_id(self) -> dict[int, float]:
        return {int(v): float(c) for v, c in zip(self.column_map, self.cont)}


@dataclass(frozen=True)
class FeatureDeviation:
    variable: VariableDescriptor
    current_value: float
    normal_mean: float
    percent_change: float | None  # None when the normal mean is ~0
    contribution: float


class AlarmStatus(str, Enum):
    NORMAL = "normal"
    PENDING = "pending"
    ALARMED = "alarmed"


@dataclass(frozen=True)
class AlarmState:
    consecutive: int = 0
    status: AlarmStatus = AlarmStatus.NORMAL
    alarm_t: int | None = None
    last_t: int | None = None
    required: int = CONSECUTIVE_REQUIRED


def t2_statistic(model: PcaModel, sample: SampleVector) -> float:
    x = model.standardize_sample(sample.values)
    value = float(_kernels.t2_batch(x[None, :], model.P, model.lambda_a)[0])
    return value


def t2_series(model: PcaModel, data: np.ndarray) -> np.ndarray:
    """Hotelling statistic for every row of a raw (n, 52) matrix."""
    if not np.all(np.isfinite(data)):
        raise NonFiniteInput("series contains non-finite values")
    X = (data[:, model.column_map] - model.mean) / model.std
    return _kernels.t2_batch(X, model.P, model.lambda_a)


def contributions(model: PcaModel, sample: SampleVector) -> ContributionVector:
    x = model.standardize_sample(sample.values)
    cont = _kernels.contributions(x, model.P, model.lambda_a)
    return ContributionVector(cont=cont, column_map=model.column_map)


def top_k_deviations(
    model: PcaModel,
    sample: SampleVector,
    cont: ContributionVector,
    k: int,
    rank_by_abs: bool = False,
) -> list[FeatureDeviation]:
    """The k largest-contribution variables with raw-unit deviations.

    Ranked by signed contribution by default (set ``rank_by_abs`` to rank
    by magnitude); ties broken by ascending variable id.
    """
    if not 1 <= k <= cont.cont.shape[0]:
        raise ValueError(f"k must be in 1..{cont.cont.shape[0]}, got {k}")
    key = np.abs(cont.cont) if rank_by_abs else cont.cont
    order = sorted(range(len(key)), key=lambda i: (-key[i], cont.column_map[i]))
    out = []
    for i in order[:k]:
        var_id = int(cont.column_map[i])
        current = float(sample.values[var_id])
        mean = float(model.mean[i])
        if abs(mean) > PERCENT_CHANGE_MEAN_FLOOR:
            pct = 100.0 * (current - mean) / abs(mean)
        else:
            pct = None
        out.append(
            FeatureDeviation(
                variable=catalog.descriptor(var_id),
                current_value=current,
                normal_mean=mean,
                percent_change=pct,
                contribution=float(cont.cont[i]),
            )
        )
    return out


def make_point(model: PcaModel, t: int, t2: float, state: AlarmState) -> T2Point:
    """Assemble the T2Point for this step, alarm flag per updated state."""
    exceeds = t2 > model.t2_threshold
    return T2Point(
        t=t,
        t2=t2,
        threshold=model.t2_threshold,
        exceeds=exceeds,
        alarm=state.status is AlarmStatus.ALARMED,
    )


def alarm_update(state: AlarmState, t: int, exceeds: bool) -> AlarmState:
    """Advance the consecutive-exceedance state machine by one sample.

    Alarmed is absorbing; before that, any non-exceedance resets the
    count.  ``alarm_t`` is the time of the confirming exceedance.
    """
    if state.last_t is not None and t <= state.last_t:
        raise OutOfOrderSample(f"t={t} after t={state.last_t}")
    if state.status is AlarmStatus.ALARMED:
        return replace(state, last_t=t)
    if not exceeds:
        return replace(state, consecutive=0, status=AlarmStatus.NORMAL, last_t=t)
    consecutive = state.consecutive + 1
    if consecutive >= state.required:
        return AlarmState(
            consecutive=consecutive,
            status=AlarmStatus.ALARMED,
            alarm_t=t,
            last_t=t,
            required=state.required,
        )
    return replace(
        state, consecutive=consecutive, status=AlarmStatus.PENDING, last_t=t
    )


@dataclass
class MonitorRun:
    """Result of running the monitor across a full series."""

    points: list[T2Point] = field(default_factory=list)
    alarm_t: int | None = None

    @property
    def alarmed(self) -> bool:
        return self.alarm_t is not None


def run_series(model: PcaModel, data: np.ndarray, required: int = CONSECUTIVE_REQUIRED) -> MonitorRun:
    """Run detection over a raw (n, 52) matrix in time order."""
    t2 = t2_series(model, data)
    state = AlarmState(required=required)
    run = MonitorRun()
    for t, value in enumerate(t2):
        exceeds = value > model.t2_threshold
        state = alarm_update(state, t, exceeds)
        run.points.append(make_point(model, t, float(value), state))
        if run.alarm_t is None and state.alarm_t is not None:
            run.alarm_t = state.alarm_t
    return run
