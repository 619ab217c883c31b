"""Pure-Python reference implementation of the hot kernels.

Mirrors the compiled extension operation-for-operation so both backends
produce the same results; selected at import time when the extension is
unavailable (see package __init__).
"""

from __future__ import annotations

import math

import numpy as np


def jacobi_eigh(S: np.ndarray, max_sweeps: int = 100, tol: float = 1e-12):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (eigenvalues, eigenvectors) in the raw post-convergence
    order (unsorted, unnormalized sign).  Returns None on failure to
    converge within ``max_sweeps`` sweeps.
    """
    m = S.shape[0]
    A = [[float(S[i, j]) for j in range(m)] for i in range(m)]
    V = [[1.0 if i == j else 0.0 for j in range(m)] for i in range(m)]
    scale = max(1.0, max(abs(A[i][j]) for i in range(m) for j in range(m)))
    threshold = tol * scale

    converged = False
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(m - 1):
            row = A[p]
            for q in range(p + 1, m):
                a = abs(row[q])
                if a > off:
                    off = a
        if off <= threshold:
            converged = True
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p][q]
                if apq == 0.0:
                    continue
                theta = (A[q][q] - A[p][p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                app = A[p][p]
                aqq = A[q][q]
                A[p][p] = app - t * apq
                A[q][q] = aqq + t * apq
                A[p][q] = 0.0
                A[q][p] = 0.0
                for r in range(m):
                    if r == p or r == q:
                        continue
                    g = A[r][p]
                    h = A[r][q]
                    A[r][p] = g - s * (h + g * tau)
                    A[p][r] = A[r][p]
                    A[r][q] = h + s * (g - h * tau)
                    A[q][r] = A[r][q]
                for r in range(m):
                    g = V[r][p]
                    h = V[r][q]
                    V[r][p] = g - s * (h + g * tau)
                    V[r][q] = h + s * (g - h * tau)
    if not converged:
        # final check: the last sweep may have finished the job
        off = max(
            abs(A[p][q]) for p in range(m - 1) for q in range(p + 1, m)
        ) if m > 1 else 0.0
        if off > threshold:
            return None
    w = np.array([A[i][i] for i in range(m)], dtype=np.float64)
    Vm = np.array(V, dtype=np.float64)
    return w, Vm


def t2_batch(X: np.ndarray, P: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Hotelling statistic for each standardized row of X."""
    T = X @ P
    return np.einsum("ni,ni->n", T, T / lam)


def contributions(x: np.ndarray, P: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Per-variable additive decomposition of the Hotelling statistic."""
    t = P.T @ x
    return x * (P @ (t / lam))
