"""Mittag-Leffler function ``E_alpha(-x)`` for ``0 < alpha <= 1``, ``x >= 0``.

Serves as the closed-form oracle for single-atom measures, where the
relaxation function is ``E_alpha(-lam t**alpha)``.  It deliberately shares no
code with the spectral solver: small arguments use the power series in
arbitrary precision (mpmath), large ones the integral

    E_alpha(-x) = sin(pi a)/(pi a) * int_0^inf x exp(-w**(1/a)) / (w**2 + 2 w x cos(pi a) + x**2) dw

evaluated with QUADPACK.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import gamma

from .errors import DomainError

X_SWITCH = 5.0
#: series is only used while its largest term stays below exp(SERIES_MAX_LOG)
SERIES_MAX_LOG = 700.0


def _check(alpha, x):
    if not (0 < alpha <= 1):
        raise DomainError(f"order alpha={alpha!r} must lie in (0, 1]")
    if not (x >= 0) or math.isinf(x):
        raise DomainError(f"argument x={x!r} must be finite and >= 0")


def ml_series(alpha, x, rtol=1e-16):
    """Power series ``sum (-x)**k / Gamma(alpha k + 1)`` in extended precision."""
    _check(alpha, x)
    if x == 0:
        return 1.0
    # largest term ~ exp(x**(1/alpha)); carry enough digits to absorb the cancellation
    digits = int(x ** (1.0 / alpha) / math.log(10)) + 30
    with mpmath.workdps(digits):
        a = mpmath.mpf(alpha)
        z = -mpmath.mpf(x)
        total = mpmath.mpf(0)
        k = 0
        while True:
            term = z ** k / mpmath.gamma(a * k + 1)
            total += term
            if k > x ** (1.0 / alpha) + 5 and abs(term) < rtol * 1e-4 * abs(total):
                break
            k += 1
        return float(total)


def ml_integral(alpha, x):
    """Integral representation; accurate for every ``x > 0`` when ``alpha < 1``."""
    _check(alpha, x)
    if alpha == 1:
        return math.exp(-x)
    if x == 0:
        return 1.0
    c = math.cos(math.pi * alpha)
    pref = math.sin(math.pi * alpha) / (math.pi * alpha)
    inv = 1.0 / alpha

    def f(w):
        return x * math.exp(-w ** inv) / (w * w + 2.0 * w * x * c + x * x)

    # exp(-w**(1/alpha)) < 1e-300 beyond this point
    wmax = 700.0 ** alpha
    pts = [p for p in (-x * c, 1.0) if 0 < p < wmax]
    head, _ = integrate.quad(f, 0.0, wmax, epsabs=0.0, epsrel=1e-13, limit=500,
                             points=pts or None)
    return pref * head


def mittag_leffler_neg(alpha, x):
    """``E_alpha(-x)``; vectorised over ``x``."""
    x_arr = np.asarray(x, dtype=float)
    out = np.empty(x_arr.shape)
    for idx, xv in np.ndenumerate(x_arr):
        xv = float(xv)
        _check(alpha, xv)
        if alpha == 1:
            out[idx] = math.exp(-xv)
        elif xv == 0:
            out[idx] = 1.0
        elif xv <= X_SWITCH and xv ** (1.0 / alpha) <= SERIES_MAX_LOG:
            out[idx] = ml_series(alpha, xv)
        else:
            out[idx] = ml_integral(alpha, xv)
    return out if x_arr.ndim else float(out)


def relaxation_single_order(alpha, lam, t):
    """``E_alpha(-lam t**alpha)``: relaxation for the measure ``delta_alpha``."""
    t = np.asarray(t, dtype=float)
    return mittag_leffler_neg(alpha, lam * t ** alpha)


def ml_power_tail(alpha, lam, t):
    """Leading long-time term ``t**-alpha / (lam Gamma(1 - alpha))``."""
    if not (0 < alpha < 1):
        raise DomainError("power tail needs 0 < alpha < 1 (alpha = 1 decays exponentially)")
    if not lam > 0:
        raise DomainError("lambda must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("power tail needs t > 0")
    return t ** -alpha / (lam * gamma(1.0 - alpha))
