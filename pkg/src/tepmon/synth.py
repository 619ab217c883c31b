"""Deterministic stand-in dataset for the Tennessee Eastman benchmark.

The original recorded series are not redistributable with this package,
so a calibrated surrogate is generated instead: correlated
normal-operation noise around realistic base-case operating points, plus
per-fault mean-shift patterns whose final-step percent deviations match
the published contribution reports for the documented faults.  Fault
shift directions are embedded in the normal-operation covariance so a
variance-targeted PCA model retains them, as it would for the real
closed-loop process where faults excite correlated process modes.

Everything is a pure function of the seed: regenerating the data
directory yields byte-identical files.
"""

from __future__ import annotations

import os
import pathlib

import numpy as np

from . import catalog
from .timeseries import TimeSeries, save_timeseries

DEFAULT_SEED = 20240117
SERIES_LENGTH = 500
FAULT_ONSET = 160
N_FAULTS = 15

# Base-case operating point, one value per catalog entry (raw units).
BASE_MEANS = np.array(
    [
        # XMEAS 1..41
        0.2505, 3664.0, 4509.3, 9.347, 26.902, 42.339, 2705.0, 75.0, 120.40,
        0.3371, 80.109, 50.0, 2633.7, 25.160, 50.0, 3102.2, 22.949, 65.731,
        230.31, 341.43, 94.599, 77.297, 32.188, 8.893, 26.383, 6.882, 18.776,
        1.657, 32.958, 13.823, 23.978, 1.2565, 18.579, 2.2633, 4.8436, 2.2986,
        0.01787, 0.8357, 0.09858, 53.724, 43.828,
        # XMV 1..11
        63.053, 53.980, 24.644, 61.302, 22.210, 40.064, 38.100, 46.534,
        47.446, 41.106, 18.114,
    ]
)

# Variables quoted with exact percent deviations in the reference
# contribution reports get tight relative noise so the deviations are
# reproducible; everything else gets ordinary sensor-scale noise.
_TIGHT_IDS = {0, 2, 3, 6, 9, 12, 15, 17, 18, 19, 23, 25, 29, 31, 33,
              42, 43, 44, 46, 49}
_TIGHT_FRAC = 0.0015
_LOOSE_FRAC = 0.01

# Fault signatures: variable id -> percent change of the shifted mean.
# Faults 3, 4, 9, and 15 have no signature: their disturbances do not
# move the monitored means and stay invisible to the detector.
FAULT_SHIFTS: dict[int, dict[int, float]] = {
    1: {0: 25.0, 43: 30.0, 22: 10.0, 24: -5.0},
    2: {29: 5.63, 9: 20.96, 46: 20.86, 23: 4.17, 42: 1.67, 43: 30.74},
    5: {21: 4.0, 51: 15.0, 10: 3.0},
    6: {0: -60.0, 43: 50.0, 22: -15.0},
    7: {15: -3.00, 3: -8.90, 6: -3.49, 12: -3.69, 44: 13.12, 19: -3.58},
    8: {22: 8.0, 24: -6.0, 29: 6.0, 4: 4.0},
    10: {17: 2.45, 43: 43.90, 0: 43.63, 2: -2.38, 49: 14.59, 18: 9.93},
    11: {8: 2.0, 20: 3.0, 50: 20.0},
    12: {10: 4.0, 21: 5.0, 51: 18.0},
    13: {15: 1.58, 6: 1.84, 12: 1.92, 31: -17.85, 25: -3.31, 33: -2.17},
    14: {50: 25.0, 20: 4.0, 8: 1.5},
}

# Faults whose signature ramps in linearly (drift) instead of stepping.
RAMP_FAULTS = {13}

_FAULT_DIRECTION_ORDER = [1, 2, 5, 6, 7, 8, 10, 11, 12, 13, 14]
_FAULT_DIR_VARIANCES = np.linspace(6.0, 2.5, len(_FAULT_DIRECTION_ORDER))
_BACKGROUND_VARIANCES = np.array([0.9, 0.7, 0.55, 0.45, 0.4, 0.35, 0.3])
_IDIOSYNCRATIC_STD = 0.25


def noise_scales() -> np.ndarray:
    """Per-variable noise std in raw units."""
    frac = np.full(catalog.N_VARIABLES, _LOOSE_FRAC)
    frac[list(_TIGHT_IDS)] = _TIGHT_FRAC
    return frac * np.abs(BASE_MEANS)


def shift_vector(fault_id: int) -> np.ndarray:
    """Raw-unit mean shift of a fault signature (zeros when none)."""
    shift = np.zeros(catalog.N_VARIABLES)
    for var_id, pct in FAULT_SHIFTS.get(fault_id, {}).items():
        shift[var_id] = BASE_MEANS[var_id] * pct / 100.0
    return shift


def _factor_directions() -> np.ndarray:
    """Orthonormal factor directions: fault signatures first, then
    seeded random background modes."""
    sigma = noise_scales()
    columns = []
    for fault_id in _FAULT_DIRECTION_ORDER:
        columns.append(shift_vector(fault_id) / sigma)
    rng = np.random.default_rng([DEFAULT_SEED, 7919])
    for _ in range(len(_BACKGROUND_VARIANCES)):
        columns.append(rng.standard_normal(catalog.N_VARIABLES))
    basis = []
    for col in columns:
        v = col.astype(np.float64)
        for b in basis:
            v = v - (b @ v) * b
        v = v / np.linalg.norm(v)
        basis.append(v)
    return np.column_stack(basis)


def generate_series(fault_id: int, length: int = SERIES_LENGTH,
                    seed: int = DEFAULT_SEED, onset: int = FAULT_ONSET) -> TimeSeries:
    """One surrogate series; fault 0 is normal operation end to end."""
    if not 0 <= fault_id <= N_FAULTS:
        raise ValueError(f"fault_id must be in 0..{N_FAULTS}, got {fault_id}")
    sigma = noise_scales()
    G = _factor_directions()
    gamma = np.concatenate([_FAULT_DIR_VARIANCES, _BACKGROUND_VARIANCES])
    rng = np.random.default_rng([seed, fault_id])
    factors = rng.standard_normal((length, G.shape[1])) * np.sqrt(gamma)
    idio = rng.standard_normal((length, catalog.N_VARIABLES)) * _IDIOSYNCRATIC_STD
    z = factors @ G.T + idio
    data = BASE_MEANS + sigma * z
    if fault_id > 0:
        shift = shift_vector(fault_id)
        if np.any(shift != 0.0):
            weight = np.zeros(length)
            if fault_id in RAMP_FAULTS:
                steps = np.arange(onset, length)
                weight[onset:] = (steps - onset + 1) / (length - onset)
            else:
                weight[onset:] = 1.0
            data = data + weight[:, None] * shift[None, :]
    return TimeSeries(fault_id=fault_id, data=data)


def write_dataset(data_dir: str | os.PathLike, length: int = SERIES_LENGTH,
                  seed: int = DEFAULT_SEED) -> list[pathlib.Path]:
    """Write data/fault_0.csv .. data/fault_15.csv."""
    out_dir = pathlib.Path(data_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for fault_id in range(N_FAULTS + 1):
        ts = generate_series(fault_id, length=length, seed=seed)
        path = out_dir / f"fault_{fault_id}.csv"
        save_timeseries(ts, path)
        paths.append(path)
    return paths
