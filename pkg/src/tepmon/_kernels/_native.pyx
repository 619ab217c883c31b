# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure-Python kernels (see pure.py)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


def jacobi_eigh(S, int max_sweeps=100, double tol=1e-12):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A = np.array(S, dtype=np.float64, order="C")
    cdef int m = A.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] V = np.eye(m, dtype=np.float64)
    cdef double scale = 1.0
    cdef int i, j, p, q, r, sweep
    cdef double off, a, apq, theta, t, c, s, tau, app, aqq, g, h

    for i in range(m):
        for j in range(m):
            a = fabs(A[i, j])
            if a > scale:
                scale = a
    cdef double threshold = tol * scale

    cdef bint converged = False
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(m - 1):
            for q in range(p + 1, m):
                a = fabs(A[p, q])
                if a > off:
                    off = a
        if off <= threshold:
            converged = True
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                app = A[p, p]
                aqq = A[q, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for r in range(m):
                    if r == p or r == q:
                        continue
                    g = A[r, p]
                    h = A[r, q]
                    A[r, p] = g - s * (h + g * tau)
                    A[p, r] = A[r, p]
                    A[r, q] = h + s * (g - h * tau)
                    A[q, r] = A[r, q]
                for r in range(m):
                    g = V[r, p]
                    h = V[r, q]
                    V[r, p] = g - s * (h + g * tau)
                    V[r, q] = h + s * (g - h * tau)
    if not converged:
        off = 0.0
        for p in range(m - 1):
            for q in range(p + 1, m):
                a = fabs(A[p, q])
                if a > off:
                    off = a
        if off > threshold:
            return None
    w = np.empty(m, dtype=np.float64)
    for i in range(m):
        w[i] = A[i, i]
    return w, np.asarray(V)


def t2_batch(X, P, lam):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Xc = np.ascontiguousarray(X, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Pc = np.ascontiguousarray(P, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lamc = np.ascontiguousarray(lam, dtype=np.float64)
    cdef int n = Xc.shape[0]
    cdef int m = Xc.shape[1]
    cdef int na = Pc.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n, dtype=np.float64)
    cdef int i, j, k
    cdef double ti, acc
    for i in range(n):
        acc = 0.0
        for k in range(na):
            ti = 0.0
            for j in range(m):
                ti += Xc[i, j] * Pc[j, k]
            acc += ti * ti / lamc[k]
        out[i] = acc
    return out


def contributions(x, P, lam):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xc = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Pc = np.ascontiguousarray(P, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lamc = np.ascontiguousarray(lam, dtype=np.float64)
    cdef int m = Pc.shape[0]
    cdef int na = Pc.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t = np.zeros(na, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(m, dtype=np.float64)
    cdef int j, k
    cdef double acc
    for k in range(na):
        acc = 0.0
        for j in range(m):
            acc += Pc[j, k] * xc[j]
        t[k] = acc / lamc[k]
    for j in range(m):
        acc = 0.0
        for k in range(na):
            acc += Pc[j, k] * t[k]
        out[j] = xc[j] * acc
    return out
