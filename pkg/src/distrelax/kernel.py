"""Kernel of the distributed-order derivative and its transforms.

For a validated measure ``rho`` the accessor evaluates

* ``k(s)     = int s**-a / Gamma(1 - a) drho(a)``   (convolution kernel)
* ``kappa(x) = int x**(1 - a) / Gamma(2 - a) drho(a)``   (antiderivative of k)
* ``K(p)     = int p**(a - 1) drho(a)``   (Laplace transform of k)
* ``A(r), B(r)``: real and imaginary part of ``p K(p)`` at ``p = r e^{i pi}``
  approached from the upper half plane.

Atoms are summed exactly; densities go through the shared
:class:`~distrelax.quadrature.AlphaQuadrature`, always in terms of
``exp(x * a)`` with ``x`` a logarithm, so arguments may span hundreds of
decades.
"""
from __future__ import annotations

import numpy as np
from scipy.special import rgamma

from .errors import DomainError
from .measure import ValidatedMeasure, moment_gf


def _rgamma1(alpha):
    return rgamma(1.0 - alpha)


def _rgamma2(alpha):
    return rgamma(2.0 - alpha)


def _cos(alpha):
    return np.cos(np.pi * alpha)


def _sin(alpha):
    return np.sin(np.pi * alpha)


def _one(alpha):
    return 1.0


def _shape(value, like):
    like = np.asarray(like)
    return value.reshape(like.shape) if like.ndim else value.reshape(()).item()


class KernelAccessor:
    """Evaluators for ``k``, ``kappa``, ``K`` and the spectral components.

    All methods accept scalars or arrays and return the same shape.
    """

    def __init__(self, measure: ValidatedMeasure):
        self.measure = measure
        self._loc = measure.locations
        self._w = measure.weights
        self._quad = measure.quad

    # -- helpers ---------------------------------------------------------
    def _atoms(self, x, factor):
        """``sum_n w_n exp(x a_n) factor(a_n)`` for a 1-d array ``x``."""
        if not self.measure.has_atoms:
            return np.zeros(x.shape, dtype=np.result_type(x, float))
        with np.errstate(under="ignore"):
            e = np.exp(np.multiply.outer(x, self._loc))
        return e @ (self._w * factor(self._loc))

    def _density(self, x, factor, shift=None):
        if self.measure.density is None:
            return 0.0
        return self._quad.integrate(x, factor, shift)[0]

    # -- public evaluators -------------------------------------------------
    def k(self, s):
        """Convolution kernel ``k(s)`` for ``s > 0``."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float)).ravel()
        if np.any(~(s_arr > 0)):
            raise DomainError("k(s) requires s > 0")
        x = -np.log(s_arr)
        val = self._atoms(x, _rgamma1) + self._density(x, _rgamma1)
        return _shape(val, s)

    def kappa(self, x):
        """``kappa(x) = int_0^x k``; ``kappa(0) = 0``."""
        x_arr = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        if np.any(~(x_arr >= 0)):
            raise DomainError("kappa(x) requires x >= 0")
        out = np.zeros(x_arr.shape)
        pos = x_arr > 0
        if pos.any():
            xp = x_arr[pos]
            lx = -np.log(xp)
            out[pos] = xp * (self._atoms(lx, _rgamma2) + self._density(lx, _rgamma2))
        return _shape(out, x)

    def laplace_symbol(self, p):
        """``K(p)`` on the principal branch; ``p`` must avoid ``(-inf, 0]``."""
        p_arr = np.atleast_1d(np.asarray(p, dtype=complex)).ravel()
        on_cut = (p_arr.imag == 0) & (p_arr.real <= 0)
        if np.any(on_cut) or np.any(~np.isfinite(p_arr)):
            raise DomainError("K(p) is not defined on the cut (-inf, 0]")
        logp = np.log(p_arr)
        val = (self._atoms(logp, _one) + self._density(logp, _one)) / p_arr
        if not np.iscomplexobj(np.asarray(p)):
            val = val.real
        return _shape(val, p)

    def laplace_symbol_mgf(self, p):
        """``p**-1 M(log p)`` for real ``p > 0``; the same quantity via moments."""
        p_arr = np.asarray(p, dtype=float)
        if np.any(~(p_arr > 0)):
            raise DomainError("the moment identity needs real p > 0")
        return moment_gf(self.measure, np.log(p_arr)) / p_arr

    def spectral_components(self, r):
        """``(A(r), B(r))`` with ``A + iB = p K(p)`` at ``p = r e^{i pi}``."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(~(r_arr > 0)):
            raise DomainError("spectral components need r > 0")
        a, b, shift = self.spectral_components_log(np.log(np.atleast_1d(r_arr).ravel()))
        scale = np.exp(shift)
        return _shape(a * scale, r), _shape(b * scale, r)

    def spectral_components_log(self, logr):
        """Scaled components ``(A e^{-m}, B e^{-m}, m)`` at ``r = exp(logr)``.

        ``m`` is zero for ``logr <= 0`` and ``logr * max(order)`` otherwise,
        which keeps every quantity finite however large ``r`` is.
        """
        x = np.atleast_1d(np.asarray(logr, dtype=float)).ravel()
        shift = np.where(x > 0, x * self.measure.support_max, 0.0)
        a = np.zeros(x.shape)
        b = np.zeros(x.shape)
        if self.measure.has_atoms:
            with np.errstate(under="ignore"):
                e = np.exp(np.multiply.outer(x, self._loc) - shift[:, None])
            a += e @ (self._w * _cos(self._loc))
            b += e @ (self._w * _sin(self._loc))
        if self.measure.density is not None:
            # separate integrals: B carries its own error control near its zeros
            a += self._quad.integrate(x, _cos, shift)[0]
            b += self._quad.integrate(x, _sin, shift)[0]
        return a, np.maximum(b, 0.0), shift
