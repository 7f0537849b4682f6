"""Composite Gauss-Kronrod (7/15) quadrature shared by every evaluator.

Two users live here:

* ``integrate_panels`` integrates sampled values over arbitrary panel edges
  (used for the r-integral of the spectral solver and for Laplace checks).
* ``AlphaQuadrature`` integrates ``exp(x*alpha) * g(alpha) * mu(alpha)`` over
  ``alpha in [0, 1]`` for a whole batch of exponents ``x`` at once.  The panel
  layout of every row is graded geometrically toward the anchors of the
  density at the length scale ``1/|x|``, so the same rule stays accurate from
  ``|x| ~ 1`` up to ``|x| ~ 1e250``.
"""
from __future__ import annotations

import numpy as np

from .errors import QuadratureFailure

# QUADPACK qk15 abscissae and weights (positive half, centre last).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

#: reference nodes on [-1, 1], Kronrod weights, embedded Gauss weights
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
G_WEIGHTS = np.zeros(15)
G_WEIGHTS[[1, 3, 5, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[:-1][::-1]])
G_WEIGHTS[7] = _WG[-1]

_EPS = np.finfo(float).eps


def panel_nodes(edges):
    """Map the 15 reference nodes into every panel.

    Parameters
    ----------
    edges : ndarray, shape (..., m + 1)
        Sorted panel edges.  Zero-width panels are allowed and contribute 0.

    Returns
    -------
    nodes : ndarray, shape (..., m, 15)
    half : ndarray, shape (..., m, 1)
        Half widths, i.e. the Jacobian of the affine map.
    """
    edges = np.asarray(edges, dtype=float)
    a = edges[..., :-1, None]
    b = edges[..., 1:, None]
    half = 0.5 * (b - a)
    centre = 0.5 * (b + a)
    return centre + half * GK_NODES, half


def panel_estimates(values, half):
    """Kronrod result, error estimate and absolute integral per panel.

    ``values`` has shape (..., m, 15); real or complex.  The error estimate is
    QUADPACK's ``resasc * min(1, (200 |K - G| / resasc)**1.5)``.
    """
    k = np.sum(values * GK_WEIGHTS, axis=-1) * half[..., 0]
    g = np.sum(values * G_WEIGHTS, axis=-1) * half[..., 0]
    absval = np.abs(values)
    resabs = np.sum(absval * GK_WEIGHTS, axis=-1) * np.abs(half[..., 0])
    mean = k / np.where(half[..., 0] == 0, 1.0, 2 * half[..., 0])
    resasc = np.sum(np.abs(values - mean[..., None]) * GK_WEIGHTS, axis=-1) * np.abs(half[..., 0])
    diff = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200 * diff / resasc) ** 1.5), diff)
    floor = 50 * _EPS * resabs
    err = np.maximum(scaled, floor)
    return k, err, resabs


def integrate_panels(values, half):
    """Sum panel estimates along the panel axis; see :func:`panel_estimates`."""
    k, err, resabs = panel_estimates(values, half)
    return k.sum(axis=-1), err.sum(axis=-1), resabs.sum(axis=-1)


def bisect_edges(edges):
    """Insert the midpoint of every panel (last axis)."""
    edges = np.asarray(edges, dtype=float)
    mid = 0.5 * (edges[..., :-1] + edges[..., 1:])
    out = np.empty(edges.shape[:-1] + (2 * edges.shape[-1] - 1,))
    out[..., 0::2] = edges
    out[..., 1::2] = mid
    return out


class AlphaQuadrature:
    """Batched integration of ``exp(x*alpha) g(alpha) mu(alpha)`` over [0, 1].

    Parameters
    ----------
    density : object
        Needs ``pdf(alpha)`` (vectorised, non-negative), ``cdf(alpha)`` (mass
        of ``[0, alpha]``), ``anchors`` (sorted
        points in [0, 1] where the density has kinks or support edges) and
        ``peaks(x)`` returning ``(centre, log_width)`` arrays or ``None``.
    rtol : float
        Target error relative to the integral of the absolute integrand.
    grading : int
        Panels reach down to ``2**-grading`` times the row scale ``1/|x|``.
    reach : int
        Multiples of the row scale covered by unit steps; beyond them
        ``exp(x*alpha)`` has decayed by ``exp(-reach)``.
    max_refine : int
        Rows that miss ``rtol`` are re-integrated with every panel bisected,
        at most this many times, before :class:`QuadratureFailure` is raised.
    """

    def __init__(self, density, rtol=1e-10, grading=100, reach=40, max_refine=3,
                 chunk_nodes=4_000_000):
        self.density = density
        self.rtol = rtol
        self.grading = grading
        self.reach = reach
        self.max_refine = max_refine
        self.chunk_nodes = chunk_nodes
        # unit steps above the row scale (one e-fold per panel), ratio-2
        # grading just below it, ratio-4 further down
        self._powers = np.concatenate([np.arange(2.0, reach + 1),
                                       2.0 ** np.arange(-20, 1),
                                       4.0 ** -np.arange(11, grading // 2 + 1)])

    def edges(self, x):
        """Panel edges for every exponent in ``x``; shape (len(x), m + 1)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        scale = 1.0 / np.maximum(np.abs(x), 1.0)
        steps = scale[:, None] * self._powers
        pts = [np.broadcast_to(np.linspace(0.0, 1.0, 9), (x.size, 9))]
        for a in self.density.anchors:
            if a > 0:
                pts.append(a - steps)
            if a < 1:
                pts.append(a + steps)
        peaks = self.density.peaks(x)
        if peaks is not None:
            centre, width = peaks
            offsets = np.arange(-16, 17) * 0.5
            pts.append(centre[:, None] * np.exp(width[:, None] * offsets))
        e = np.clip(np.concatenate(pts, axis=1), 0.0, 1.0)
        return np.sort(e, axis=1)

    def integrate(self, x, g, shift=None):
        """Return ``(value, error, absolute integral)`` per row.

        ``g(alpha)`` receives node arrays of shape (rows, nodes) and returns
        a broadcastable real or complex factor.  ``x`` may be complex; its
        real part sets the panel scale.  When ``shift`` is given, the
        integrand is multiplied by ``exp(-shift)`` (row-wise) to keep
        ``exp(x*alpha)`` finite for large positive ``x``.
        """
        x = np.atleast_1d(np.asarray(x))
        shift = np.zeros(x.shape) if shift is None else np.broadcast_to(shift, x.shape)
        edges = self.edges(np.real(x))
        value, err, resabs = self._run(x, shift, edges, g)
        rows = np.arange(x.size)
        for _ in range(self.max_refine):
            bad = ~(err[rows] <= self.rtol * resabs[rows])
            if not bad.any():
                break
            rows, edges = rows[bad], bisect_edges(edges[bad])
            value[rows], err[rows], resabs[rows] = self._run(x[rows], shift[rows], edges, g)
        bad = ~(err <= self.rtol * resabs)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise QuadratureFailure(
                f"alpha-integral did not reach rtol={self.rtol:g} at x={x[i]!r} "
                f"(error estimate {err[i]:.3g}, |integral| {resabs[i]:.3g})")
        return value, err, resabs

    def _run(self, x, shift, edges, g):
        rows = x.size
        per_row = 15 * (edges.shape[1] - 1)
        step = max(1, self.chunk_nodes // max(per_row, 1))
        out_v = np.empty(rows, dtype=complex if np.iscomplexobj(x) else float)
        out_e = np.empty(rows)
        out_r = np.empty(rows)
        for start in range(0, rows, step):
            sl = slice(start, start + step)
            nodes, half = panel_nodes(edges[sl])
            xs = x[sl][:, None, None]
            with np.errstate(under="ignore", over="ignore", invalid="ignore"):
                vals = np.exp(xs * nodes - shift[sl][:, None, None]) * self.density.pdf(nodes) * g(nodes)
            vals = np.where(half > 0, vals, 0.0)
            k, e, r = panel_estimates(vals, half)
            # panels starting at 0: the density may be singular there, so use
            # its exact mass times the smooth factor at the panel midpoint
            first = (edges[sl][:, :-1] == 0) & (half[..., 0] > 0)
            if first.any():
                b = edges[sl][:, 1:][first]
                xf = np.broadcast_to(xs[..., 0], first.shape)[first]
                sf = np.broadcast_to(shift[sl][:, None], first.shape)[first]
                mass = self.density.cdf(b)
                smooth = np.exp(xf * 0.5 * b - sf) * g(0.5 * b)
                k[first] = smooth * mass
                r[first] = np.abs(k[first])
                e[first] = r[first] * (np.abs(xf) + 4.0) * b
            v, e, r = k.sum(axis=-1), e.sum(axis=-1), r.sum(axis=-1)
            if out_v.dtype == float and np.iscomplexobj(v):
                out_v = out_v.astype(complex)
            out_v[sl], out_e[sl], out_r[sl] = v, e, r
        return out_v, out_e, out_r
