"""PCA model: standardization, symmetric eigendecomposition, component
selection to a variance target, and JSON persistence."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from . import _kernels, fdist
from .errors import (
    AllColumnsDegenerate,
    ConvergenceFailure,
    CorruptDocument,
    DegenerateSpectrum,
    InsufficientSamples,
    NonFiniteInput,
    SchemaMismatch,
)
from .timeseries import NormalStats, TimeSeries

MODEL_SCHEMA_VERSION = 1

# std at or below this (relative to the mean magnitude) marks a constant column
ZERO_VARIANCE_TOL = 1e-12

EIG_CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class StandardizedMatrix:
    data: np.ndarray  # (n, m) standardized values
    column_map: np.ndarray  # retained column -> original variable id

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # orthonormal columns, matching order


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray  # raw-unit means of retained columns
    std: np.ndarray  # raw-unit sample stds of retained columns
    column_map: np.ndarray
    P: np.ndarray  # (m, a) loading matrix
    lambda_a: np.ndarray  # a retained eigenvalues
    eigenvalues: np.ndarray  # full spectrum, descending
    a: int
    n: int
    variance_captured: float
    t2_threshold: float
    alpha: float
    variance_target: float

    @property
    def m(self) -> int:
        return self.P.shape[0]

    def standardize_sample(self, values: np.ndarray) -> np.ndarray:
        """Scale one raw 52-value sample to the model's retained columns."""
        if not np.all(np.isfinite(values)):
            raise NonFiniteInput("sample contains non-finite values")
        return (np.asarray(values, dtype=np.float64)[self.column_map] - self.mean) / self.std


def zero_variance_columns(stats: NormalStats) -> np.ndarray:
    """Boolean mask of columns whose std marks them as constant."""
    tol = ZERO_VARIANCE_TOL * np.maximum(np.abs(stats.mean), 1.0)
    return stats.std <= tol


def standardize(ts: TimeSeries, stats: NormalStats) -> StandardizedMatrix:
    """Center and scale, dropping zero-variance columns."""
    if ts.data.shape[1] != stats.mean.shape[0]:
        raise ValueError("dimension mismatch between series and stats")
    drop = zero_variance_columns(stats)
    keep = np.flatnonzero(~drop)
    if keep.size == 0:
        raise AllColumnsDegenerate("every column is constant")
    data = (ts.data[:, keep] - stats.mean[keep]) / stats.std[keep]
    return StandardizedMatrix(data=data, column_map=keep)


def eig_sym(S: np.ndarray) -> EigenDecomposition:
    """Deterministic symmetric eigendecomposition.

    Eigenvalues descending (ties broken by original index); each
    eigenvector's largest-magnitude entry is made positive so results
    are reproducible across platforms.
    """
    S = np.asarray(S, dtype=np.float64)
    if not np.all(np.isfinite(S)):
        raise NonFiniteInput("matrix contains non-finite values")
    if S.shape[0] != S.shape[1] or np.max(np.abs(S - S.T)) > 1e-10:
        raise ValueError("matrix is not symmetric")
    result = _kernels.jacobi_eigh(S)
    if result is None:
        raise ConvergenceFailure("Jacobi sweeps did not converge")
    w, V = result
    w = np.where((w < 0) & (w > -EIG_CLAMP_TOL), 0.0, w)
    order = sorted(range(len(w)), key=lambda i: (-w[i], i))
    w = w[order]
    V = V[:, order]
    for i in range(V.shape[1]):
        col = V[:, i]
        if col[np.argmax(np.abs(col))] < 0:
            V[:, i] = -col
    return EigenDecomposition(eigenvalues=w, eigenvectors=V)


def fit_pca(
    X: StandardizedMatrix,
    stats: NormalStats,
    variance_target: float = 0.90,
    alpha: float = 0.01,
) -> PcaModel:
    """Fit the monitoring model on standardized normal-operation data.

    Covariance S = X'X/(n-1); the smallest component count whose
    cumulative eigenvalue share reaches ``variance_target`` is retained.
    """
    if not 0.0 < variance_target <= 1.0:
        raise ValueError(f"variance_target must be in (0, 1], got {variance_target}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    n, m = X.n, X.m
    S = (X.data.T @ X.data) / (n - 1)
    eig = eig_sym(S)
    total = float(np.sum(eig.eigenvalues))
    cumulative = np.cumsum(eig.eigenvalues)
    a = int(np.searchsorted(cumulative / total, variance_target) + 1)
    a = min(a, m)
    lambda_a = eig.eigenvalues[:a]
    if np.any(lambda_a <= 0.0):
        raise DegenerateSpectrum("retained eigenvalue is not strictly positive")
    if n <= a:
        raise InsufficientSamples(f"need n > a, got n={n}, a={a}")
    return PcaModel(
        mean=stats.mean[X.column_map].copy(),
        std=stats.std[X.column_map].copy(),
        column_map=X.column_map.copy(),
        P=eig.eigenvectors[:, :a].copy(),
        lambda_a=lambda_a.copy(),
        eigenvalues=eig.eigenvalues.copy(),
        a=a,
        n=n,
        variance_captured=float(cumulative[a - 1] / total),
        t2_threshold=fdist.t2_threshold(a, n, alpha),
        alpha=alpha,
        variance_target=variance_target,
    )


def fit_from_timeseries(
    ts: TimeSeries, variance_target: float = 0.90, alpha: float = 0.01
) -> PcaModel:
    from .timeseries import compute_normal_stats

    stats = compute_normal_stats(ts)
    return fit_pca(standardize(ts, stats), stats, variance_target, alpha)


def model_to_document(model: PcaModel) -> dict:
    return {
        "version": MODEL_SCHEMA_VERSION,
        "alpha": model.alpha,
        "variance_target": model.variance_target,
        "a": model.a,
        "n": model.n,
        "variance_captured": model.variance_captured,
        "t2_threshold": model.t2_threshold,
        "column_map": model.column_map.tolist(),
        "mean": model.mean.tolist(),
        "std": model.std.tolist(),
        "eigenvalues": model.eigenvalues.tolist(),
        "P": model.P.tolist(),
    }


def model_from_document(doc: dict) -> PcaModel:
    if not isinstance(doc, dict):
        raise CorruptDocument("model document is not an object")
    if doc.get("version") != MODEL_SCHEMA_VERSION:
        raise SchemaMismatch(f"unsupported model schema version {doc.get('version')!r}")
    try:
        eigenvalues = np.asarray(doc["eigenvalues"], dtype=np.float64)
        a = int(doc["a"])
        return PcaModel(
            mean=np.asarray(doc["mean"], dtype=np.float64),
            std=np.asarray(doc["std"], dtype=np.float64),
            column_map=np.asarray(doc["column_map"], dtype=np.intp),
            P=np.asarray(doc["P"], dtype=np.float64),
            lambda_a=eigenvalues[:a],
            eigenvalues=eigenvalues,
            a=a,
            n=int(doc["n"]),
            variance_captured=float(doc["variance_captured"]),
            t2_threshold=float(doc["t2_threshold"]),
            alpha=float(doc["alpha"]),
            variance_target=float(doc["variance_target"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptDocument(str(exc)) from exc


def save_model(model: PcaModel, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_document(model), fh)


def load_model(path: str | os.PathLike) -> PcaModel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CorruptDocument(str(exc)) from exc
    return model_from_document(doc)
