"""F-distribution quantiles and the Hotelling alarm threshold.

The quantile is computed dependency-free: the F CDF is expressed through
the regularized incomplete beta function (evaluated with a Lentz
continued fraction) and inverted by bracketed bisection.
"""

from __future__ import annotations

import math

from .errors import DomainError

_CF_MAX_ITER = 300
_CF_EPS = 1e-16
_INV_MAX_ITER = 200
_INV_TOL = 1e-12


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise DomainError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(ln_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(ln_front) * _betacf(b, a, 1.0 - x) / b


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz continued fraction for the incomplete beta
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < 1e-300:
        d = 1e-300
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < 1e-300:
            d = 1e-300
        c = 1.0 + aa / c
        if abs(c) < 1e-300:
            c = 1e-300
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < 1e-300:
            d = 1e-300
        c = 1.0 + aa / c
        if abs(c) < 1e-300:
            c = 1e-300
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            break
    return h


def f_cdf(q: float, d1: int, d2: int) -> float:
    if q <= 0.0:
        return 0.0
    z = d1 * q / (d1 * q + d2)
    return betainc_reg(d1 / 2.0, d2 / 2.0, z)


def f_quantile(p: float, d1: int, d2: int) -> float:
    """Quantile q with F-CDF(q; d1, d2) = p, by bracketed bisection."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must be in (0, 1), got {p}")
    if d1 < 1 or d2 < 1:
        raise DomainError("degrees of freedom must be >= 1")
    lo = 0.0
    hi = 1.0
    while f_cdf(hi, d1, d2) < p:
        hi *= 2.0
        if hi > 1e300:
            raise DomainError("quantile bracket overflow")
    for _ in range(_INV_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if f_cdf(mid, d1, d2) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _INV_TOL * max(1.0, mid):
            break
    return 0.5 * (lo + hi)


def t2_threshold(a: int, n: int, alpha: float) -> float:
    """Alarm limit a(n-1)(n+1)/(n(n-a)) * F-quantile(1-alpha; a, n-a).

    alpha is the per-sample false-alarm probability, so the upper-tail
    quantile of the F distribution is used.
    """
    if n <= a:
        raise DomainError(f"need n > a, got n={n}, a={a}")
    if a < 1:
        raise DomainError("a must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    prefactor = a * (n - 1) * (n + 1) / (n * (n - a))
    return prefactor * f_quantile(1.0 - alpha, a, n - a)
