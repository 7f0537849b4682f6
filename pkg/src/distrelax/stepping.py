"""Time-stepping oracle: product integration of the Volterra form.

With ``u'`` taken piecewise constant on a uniform grid ``t_j = j h``,

    int_0^{t_n} k(t_n - s) u'(s) ds = -lam u(t_n)

becomes ``u_n (a_nn + lam) = a_nn u_{n-1} - sum_{j<n} (u_j - u_{j-1}) a_nj``
with ``a_nj = [kappa(t_n - t_{j-1}) - kappa(t_n - t_j)] / h``.  The weights
depend only on ``n - j``, so a single table of ``kappa(m h)`` suffices and
the weak singularity of ``k`` at 0 is integrated exactly.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, GridMismatch, NonMonotoneOutput
from .kernel import KernelAccessor
from .spectral import SolutionSeries


def convolution_weights(measure, h, n_steps):
    """``c[m] = (kappa((m+1) h) - kappa(m h)) / h`` for ``m = 0..n_steps-1``.

    ``a_nj = c[n - j]``; in particular ``a_nn = c[0] = kappa(h)/h``.
    Returns ``(c, kappa_table)`` where ``kappa_table[m] = kappa(m h)``.
    """
    kap = KernelAccessor(measure).kappa(h * np.arange(n_steps + 1))
    return np.diff(kap) / h, kap


def solve_stepping(m, lam, h, T, check=True):
    """Relaxation function on ``0, h, 2h, ..., T`` (``T`` rounded to a multiple of ``h``).

    Raises
    ------
    DomainError
        for ``lam <= 0``, ``h <= 0`` or ``T < h``.
    NonMonotoneOutput
        when the discrete solution fails to decrease strictly or leaves
        ``(0, 1]``; halving ``h`` usually cures it.
    """
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError(f"lambda must be positive, got {lam!r}")
    if not (h > 0 and math.isfinite(h)):
        raise DomainError(f"step h must be positive, got {h!r}")
    if not T >= h:
        raise DomainError(f"horizon T={T!r} must be at least h={h!r}")
    n_steps = int(round(T / h))
    c, _ = convolution_weights(m, h, n_steps)
    u = np.empty(n_steps + 1)
    du = np.zeros(n_steps + 1)
    u[0] = 1.0
    c0 = c[0]
    rev = c[::-1]  # rev[-m-1] == c[m]
    for n in range(1, n_steps + 1):
        # sum_{j=1}^{n-1} du_j c_{n-j}
        hist = du[1:n] @ rev[n_steps - n:n_steps - 1] if n > 1 else 0.0
        u[n] = (c0 * u[n - 1] - hist) / (c0 + lam)
        du[n] = u[n] - u[n - 1]
    t = h * np.arange(n_steps + 1)
    if check and (np.any(du[1:] >= 0) or np.any(u <= 0)):
        bad = int(np.flatnonzero((du[1:] >= 0) | (u[1:] <= 0))[0]) + 1
        raise NonMonotoneOutput(f"stepping output not strictly decreasing/positive at t={t[bad]:g}; halve h")
    return SolutionSeries(t, u, "stepping", float(lam), np.full(t.shape, np.nan),
                          meta={"h": float(h), "steps": n_steps})


def richardson_refine(coarse, fine, order=None):
    """Extrapolate a coarse/fine pair of stepping runs onto the coarse grid.

    ``fine`` must sample every coarse time (step halved), or be identical to
    ``coarse``.  ``order`` is the assumed convergence order (default 1); the
    error estimate is ``|fine - coarse|``.
    """
    if coarse.lam != fine.lam:
        raise GridMismatch("series were computed with different lambda")
    if fine.t.size == coarse.t.size and np.array_equal(fine.t, coarse.t):
        uf = fine.u
        ratio = 1
    elif fine.t.size == 2 * coarse.t.size - 1 and np.allclose(fine.t[::2], coarse.t, rtol=1e-12, atol=0):
        uf = fine.u[::2]
        ratio = 2
    else:
        raise GridMismatch("fine grid must be the coarse grid with the step halved")
    diff = uf - coarse.u
    if ratio == 1:
        return SolutionSeries(coarse.t, uf.copy(), fine.method, fine.lam, np.zeros_like(uf),
                              meta=dict(fine.meta, richardson_order=None))
    p = 1.0 if order is None else float(order)
    ext = uf + diff / (2.0 ** p - 1.0)
    return SolutionSeries(coarse.t, ext, fine.method + "+richardson", fine.lam, np.abs(diff),
                          meta=dict(fine.meta, richardson_order=p))
