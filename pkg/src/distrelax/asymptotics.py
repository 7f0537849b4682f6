"""Long-time decay envelopes and ratio diagnostics.

Each envelope is a callable ``env(t)`` valid above ``env.threshold``.  The
diagnostics turn asymptotic statements into numbers: :func:`ratio_drift`
measures how far ``u/env`` is from constant over a window (for ``~``
claims), :func:`check_bound` checks that ``u/env`` stays bounded (for
``O(.)`` claims), and :func:`drift_trend` reports how the drift evolves as
the window moves right.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from .errors import DomainError, EmptyWindow


@dataclass(frozen=True)
class PowerTail:
    """``C t**-alpha``."""

    alpha: float
    C: float = 1.0
    threshold = 0.0

    def __call__(self, t):
        return self.C * np.asarray(t, dtype=float) ** -self.alpha


@dataclass(frozen=True)
class LogPower:
    """``C (log t)**-exponent``."""

    exponent: float
    C: float = 1.0
    threshold = math.e

    def __call__(self, t):
        return self.C * np.log(np.asarray(t, dtype=float)) ** -self.exponent


@dataclass(frozen=True)
class StretchedLog:
    """``C (log t)**(-gamma/2 - 3/4) exp(-2 sqrt(beta log t))``."""

    gamma: float
    beta: float
    C: float = 1.0
    threshold = math.e

    def __call__(self, t):
        lt = np.log(np.asarray(t, dtype=float))
        return self.C * lt ** (-self.gamma / 2 - 0.75) * np.exp(-2.0 * np.sqrt(self.beta * lt))

    def laplace_profile(self, s):
        """Same profile as a function of ``s = 1/p`` (slowly varying factor of ``p K(p)``)."""
        return self(s) / self.C


@dataclass(frozen=True)
class AtomSeries:
    """``C sum_n w_n x**-a_n / Gamma(2 - a_n)`` over atoms ``(a_n, w_n)``."""

    locations: tuple
    weights: tuple
    C: float = 1.0
    threshold = 0.0

    @classmethod
    def from_measure(cls, m, C=1.0):
        return cls(tuple(m.locations), tuple(m.weights), C)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        loc = np.asarray(self.locations)
        coef = np.asarray(self.weights) / gamma(2.0 - loc)
        flat = np.atleast_1d(x).ravel()
        with np.errstate(under="ignore"):
            val = np.exp(-np.multiply.outer(np.log(flat), loc)) @ coef
        return self.C * (val.reshape(x.shape) if x.ndim else val[0])


@dataclass(frozen=True)
class IterLogBound:
    """``(log log x)**-b``."""

    b: float
    C: float = 1.0
    threshold = math.exp(math.e)

    def __call__(self, x):
        return self.C * np.log(np.log(np.asarray(x, dtype=float))) ** -self.b


@dataclass(frozen=True)
class LogBound:
    """``(log x)**-b``."""

    b: float
    C: float = 1.0
    threshold = math.e

    def __call__(self, x):
        return self.C * np.log(np.asarray(x, dtype=float)) ** -self.b


FAMILIES = {
    "power_tail": PowerTail,
    "log_power": LogPower,
    "stretched_log": StretchedLog,
    "atom_series": AtomSeries,
    "iter_log_bound": IterLogBound,
    "log_bound": LogBound,
}


def envelope_from_dict(d, measure=None):
    """Build an envelope from ``{"family": name, **params}``.

    ``atom_series`` without explicit atoms takes them from ``measure``.
    """
    d = dict(d)
    family = d.pop("family")
    if family not in FAMILIES:
        raise DomainError(f"unknown envelope family {family!r}")
    if family == "atom_series" and "locations" not in d:
        if measure is None or not measure.has_atoms:
            raise DomainError("atom_series envelope needs atoms")
        return AtomSeries.from_measure(measure, d.get("C", 1.0))
    if family == "atom_series":
        d["locations"], d["weights"] = tuple(d["locations"]), tuple(d["weights"])
    return FAMILIES[family](**d)


def envelope_eval(env, t):
    """Evaluate ``env`` at ``t``; every ``t`` must exceed the family threshold."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > env.threshold)):
        raise DomainError(f"{type(env).__name__} is only defined for t > {env.threshold:g}")
    val = env(t_arr)
    return val if t_arr.ndim else float(val)


def _window(series, window):
    idx = np.arange(series.t.size)
    if window is None:
        sel = idx
    elif isinstance(window, slice):
        sel = idx[window]
    elif isinstance(window, tuple) and len(window) == 2:
        sel = idx[window[0]:window[1]]
    else:
        mask = np.asarray(window)
        sel = idx[mask] if mask.dtype == bool else mask.astype(int)
    if sel.size == 0:
        raise EmptyWindow("window selects no points")
    return sel


def window_between(series, t_lo, t_hi):
    """Boolean mask of grid points with ``t_lo <= t <= t_hi``."""
    return (series.t >= t_lo * (1 - 1e-12)) & (series.t <= t_hi * (1 + 1e-12))


@dataclass
class DriftResult:
    mean_ratio: float
    drift: float
    ratios: np.ndarray


def ratio_drift(series, env, window=None):
    """Mean of ``u/env`` over ``window`` and its spread ``max/min - 1``."""
    sel = _window(series, window)
    ratio = series.u[sel] / envelope_eval(env, series.t[sel])
    return DriftResult(float(ratio.mean()), float(ratio.max() / ratio.min() - 1.0), ratio)


def drift_trend(series, env, window=None, pieces=3):
    """Drift in successive sub-windows plus the slope of ``log(u/env)`` vs ``log log t``.

    For a ``~`` relation both should tend to zero as the window moves right.
    """
    sel = _window(series, window)
    parts = [p for p in np.array_split(sel, pieces) if p.size]
    drifts = [ratio_drift(series, env, p).drift for p in parts]
    t = series.t[sel]
    ratio = series.u[sel] / envelope_eval(env, t)
    slope = float(np.polyfit(np.log(np.log(t)), np.log(ratio), 1)[0]) if sel.size > 1 else 0.0
    return {"drifts": drifts, "slope": slope}


@dataclass
class BoundResult:
    bounded: bool
    sup_ratio: float
    sub_sups: list


def check_bound(series, env, window=None, pieces=4, rtol=1e-9):
    """Sup of ``u/env`` over ``window``; bounded if the sup does not grow to the right.

    The window is cut into ``pieces`` consecutive sub-windows; the verdict is
    positive when each sub-window's sup is at most the previous one (up to
    ``rtol``).
    """
    sel = _window(series, window)
    ratio = series.u[sel] / envelope_eval(env, series.t[sel])
    parts = [p for p in np.array_split(np.arange(sel.size), min(pieces, sel.size)) if p.size]
    sups = [float(ratio[p].max()) for p in parts]
    ok = all(b <= a * (1 + rtol) for a, b in zip(sups, sups[1:]))
    return BoundResult(bool(ok and np.all(np.isfinite(ratio))), float(ratio.max()), sups)
