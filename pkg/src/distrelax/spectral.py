"""Relaxation function from its real-axis spectral representation.

The solution of ``D_rho u = -lam u``, ``u(0) = 1`` is the Laplace transform

    u(t) = int_0^inf exp(-t r) phi(r) dr,
    phi(r) = (lam / pi) r**-1 B(r) / ((A(r) + lam)**2 + B(r)**2),

of a non-negative density, where ``A + iB`` is ``p K(p)`` on the negative
real axis.  Integration runs in ``x = log r``: the integrand
``psi(x) = r phi(r)`` is tabulated once per (measure, lam) on composite
Gauss-Kronrod panels (unit-half-width core, logarithmically stretched
tails) and reused for every time point.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, QuadratureFailure
from .kernel import KernelAccessor
from .quadrature import GK_WEIGHTS, bisect_edges, panel_estimates, panel_nodes

CORE_LEFT = -120.0
CORE_RIGHT = 60.0
CORE_STEP = 0.5
#: the uniform core always covers x = -log t +- CORE_MARGIN for requested t
CORE_MARGIN = 20.0
TAIL_CHUNK = 4
MAX_LOG_EXTENT = 1e250
TAIL_RTOL = 1e-14
REFINE_RTOL = 1e-13
MAX_REFINE = 6
#: tails starting far out can be extremely steep in the stretched variable
MAX_REFINE_TAIL = 16


@dataclass
class SolutionSeries:
    """Relaxation values on a time grid.

    ``error`` holds a per-point error estimate (same length as ``t``).
    """

    t: np.ndarray
    u: np.ndarray
    method: str
    lam: float
    error: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        self.error = np.broadcast_to(np.asarray(self.error, dtype=float), self.t.shape).copy()

    def __len__(self):
        return self.t.size


def check_grid(t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.ndim != 1 or t.size == 0:
        raise DomainError("time grid must be a non-empty 1-d array")
    if np.any(~np.isfinite(t)) or np.any(t < 0):
        raise DomainError("time grid must contain finite t >= 0")
    if np.any(np.diff(t) <= 0):
        raise DomainError("time grid must be strictly increasing")
    return t


class SpectralDensity:
    """Non-negative spectral density ``phi`` of ``u_lam`` and its Laplace transform.

    Parameters
    ----------
    measure : ValidatedMeasure
    lam : float
        Relaxation rate, must be positive.
    """

    def __init__(self, measure, lam):
        if not (isinstance(lam, (int, float, np.floating)) and lam > 0 and math.isfinite(lam)):
            raise DomainError(f"lambda must be a positive finite number, got {lam!r}")
        self.measure = measure
        self.lam = float(lam)
        self.kernel = KernelAccessor(measure)
        self._table = None
        self._left, self._right = CORE_LEFT, CORE_RIGHT

    # -- pointwise ---------------------------------------------------------
    def psi(self, x):
        """``r phi(r)`` at ``r = exp(x)``; finite for every real ``x``."""
        a, b, m = self.kernel.spectral_components_log(x)
        with np.errstate(under="ignore", over="ignore"):
            damp = np.exp(-m)
            return (self.lam / np.pi) * damp * b / ((a + self.lam * damp) ** 2 + b * b)

    def __call__(self, r):
        """``phi(r)`` for ``r > 0``."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(~(r_arr > 0)):
            raise DomainError("phi(r) requires r > 0")
        flat = np.atleast_1d(r_arr).ravel()
        val = self.psi(np.log(flat)) / flat
        return val.reshape(r_arr.shape) if r_arr.ndim else float(val[0])

    # -- tabulation in x = log r ---------------------------------------------
    def _panel_values(self, edges, kind):
        """Nodes, Jacobian-weighted psi values and half widths for ``kind`` panels."""
        y, half = panel_nodes(edges)
        if kind == "core":
            x, jac = y, np.ones_like(y)
        elif kind == "left":
            x = self._left * np.exp(y)
            jac = -x
        else:
            x = self._right * np.exp(y)
            jac = x
        vals = self.psi(x.ravel()).reshape(x.shape) * jac
        return x, vals, half

    def _tail(self, kind):
        """Extend a stretched tail chunk by chunk until its mass is negligible."""
        ymax = math.log(MAX_LOG_EXTENT / abs(self._left if kind == "left" else self._right))
        edges, chunks = [], []
        y0, total, prev = 0.0, 0.0, None
        bound = 0.0
        while True:
            e = y0 + np.arange(TAIL_CHUNK + 1, dtype=float)
            e = e[e <= ymax + 1]
            x, vals, half = self._panel_values(e, kind)
            part = float(np.abs(panel_estimates(vals, half)[0]).sum())
            edges.append(e)
            chunks.append(part)
            total += part
            y0 = e[-1]
            if part <= TAIL_RTOL * max(total, 1e-300) and (prev is None or part <= prev):
                bound = part
                break
            if y0 >= ymax:
                # geometric extrapolation of the last two chunks
                q = part / prev if prev else 1.0
                bound = part * q / (1 - q) if q < 1 else math.inf
                break
            prev = part
        return np.unique(np.concatenate(edges)), bound

    def _build(self):
        core = np.arange(self._left, self._right + CORE_STEP / 2, CORE_STEP)
        left, lb = self._tail("left")
        right, rb = self._tail("right")
        pieces = []
        for kind, edges in (("core", core), ("left", left), ("right", right)):
            panels = np.stack([edges[:-1], edges[1:]], axis=1)
            for _ in range((MAX_REFINE if kind == "core" else MAX_REFINE_TAIL) + 1):
                x, vals, half = self._panel_values(panels, kind)
                k, err, _ = panel_estimates(vals[:, 0, :], half[:, 0, :])
                pieces.append((kind, panels, x[:, 0, :], vals[:, 0, :], half[:, 0, :], k, err))
                scale = max(abs(k).sum(), 1e-300)
                bad = err > REFINE_RTOL * scale
                if not bad.any():
                    break
                pieces.pop()
                keep = ~bad
                pieces.append((kind, panels[keep], x[keep, 0, :], vals[keep, 0, :],
                               half[keep, 0, :], k[keep], err[keep]))
                split = bisect_edges(panels[bad])
                panels = np.concatenate([split[:, 0:2], split[:, 1:3]])
            else:
                raise QuadratureFailure(f"spectral integrand on {kind} panels did not converge")
        x = np.concatenate([p[2] for p in pieces])
        vals = np.concatenate([p[3] for p in pieces])
        half = np.concatenate([p[4] for p in pieces])
        self._table = dict(x=x, vals=vals, half=half, tail_bound=lb + rb)
        if np.any(vals < -1e-300) or not np.all(np.isfinite(vals)):
            raise QuadratureFailure("spectral integrand is negative or not finite")
        return self._table

    @property
    def table(self):
        return self._table if self._table is not None else self._build()

    def cover(self, t):
        """Widen the uniform core so that it resolves the cutoff ``exp(-t r)`` for all ``t``.

        Outside the core the stretched tail panels are far wider than the
        transition of ``exp(-t e^x)`` near ``x = -log t``.
        """
        pos = np.asarray(t, dtype=float)
        pos = pos[pos > 0]
        if pos.size == 0:
            return
        # round outward to multiples of 2 * CORE_MARGIN so nearby requests reuse the table
        width = 2 * CORE_MARGIN
        left = min(self._left, width * math.floor((-math.log(pos.max()) - CORE_MARGIN) / width))
        right = max(self._right, width * math.ceil((-math.log(pos.min()) + CORE_MARGIN) / width))
        if (left, right) != (self._left, self._right):
            self._left, self._right = left, right
            self._table = None

    def laplace(self, t, threads=None):
        """``(u(t), error estimate)`` for an array of times ``t >= 0``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        self.cover(t)
        tab = self.table
        x = tab["x"]
        chunk = max(1, 4_000_000 // x.size)

        def run(ts):
            with np.errstate(under="ignore", over="ignore", divide="ignore"):
                logt = np.log(ts)[:, None, None]
                decay = np.where(np.isneginf(logt), 1.0, np.exp(-np.exp(np.minimum(x + logt, 700.0))))
                f = decay * tab["vals"]
            k, err, _ = panel_estimates(f, np.broadcast_to(tab["half"], f.shape[:2] + (1,)))
            return k.sum(axis=1), err.sum(axis=1) + tab["tail_bound"]

        parts = [t[i:i + chunk] for i in range(0, t.size, chunk)]
        if threads and threads > 1 and len(parts) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                res = list(pool.map(run, parts))
        else:
            res = [run(p) for p in parts]
        return np.concatenate([a for a, _ in res]), np.concatenate([b for _, b in res])

    def normalization(self):
        """``int_0^inf phi(r) dr``, which must equal ``u(0) = 1``."""
        return float(self.laplace(np.zeros(1))[0][0])


def spectral_density_eval(m, lam, r):
    """``phi(r)`` for the measure ``m`` and rate ``lam``."""
    return SpectralDensity(m, lam)(r)


def solve_spectral(m, lam, grid, threads=None, density=None):
    """Relaxation function on ``grid`` via the spectral representation.

    Pass a prebuilt :class:`SpectralDensity` as ``density`` to reuse its
    tabulation across calls.
    """
    t = check_grid(grid)
    dens = density if density is not None else SpectralDensity(m, lam)
    u, err = dens.laplace(t, threads=threads)
    return SolutionSeries(t, u, "spectral", dens.lam, err,
                          meta={"tail_bound": dens.table["tail_bound"],
                                "nodes": int(dens.table["x"].size)})


# ---------------------------------------------------------------------------
# complete monotonicity
# ---------------------------------------------------------------------------

@dataclass
class CMReport:
    passed: bool
    tol: float
    max_violation: dict
    phi_min: Optional[float]
    phi_points: int
    failures: list

    def as_record(self):
        return {"passed": self.passed, "tol": self.tol,
                "max_violation": {str(k): v for k, v in self.max_violation.items()},
                "phi_min": self.phi_min, "phi_points": self.phi_points,
                "failures": self.failures}


def divided_difference_signs(t, u, order):
    """Scaled divided differences ``(-1)^j j! f[t_i..t_{i+j}] h_i^j``.

    ``h_i`` is the mean spacing of the stencil, so the result is comparable
    to a forward difference on a uniform grid.  For a completely monotone
    function every entry is non-negative.
    """
    t = np.asarray(t, dtype=float)
    d = np.asarray(u, dtype=float).copy()
    for j in range(1, order + 1):
        d = (d[1:] - d[:-1]) / (t[j:] - t[:-j])
    h = (t[order:] - t[:-order]) / order
    return (-1) ** order * math.factorial(order) * d * h ** order


def check_complete_monotonicity(producer: Callable, grid, max_order=4, density=None,
                                r_grid=None, tol=None):
    """Finite-difference and spectral certificates of complete monotonicity.

    Parameters
    ----------
    producer : callable
        ``producer(grid) -> SolutionSeries``.
    grid : array_like
        Log-spaced time grid.
    max_order : int
        Highest difference order checked, at most 6.
    density : callable, optional
        ``phi(r)``; when given it is checked for non-negativity on ``r_grid``
        (default: 1e4 log-spaced points in [1e-8, 1e8]).
    tol : float, optional
        Allowed negative excursion; default ``1e-8 * u(t_0)``.
    """
    if not 1 <= max_order <= 6:
        raise DomainError("max_order must lie in 1..6")
    series = producer(np.asarray(grid, dtype=float))
    if tol is None:
        tol = 1e-8 * abs(series.u[0])
    failures = []
    worst = {}
    for j in range(0, max_order + 1):
        vals = series.u if j == 0 else divided_difference_signs(series.t, series.u, j)
        worst[j] = float(max(0.0, -vals.min()))
        if worst[j] > tol:
            failures.append(f"order {j}: violation {worst[j]:.3e} > tol {tol:.3e}")
    phi_min, n_phi = None, 0
    if density is not None:
        r = np.logspace(-8, 8, 10_000) if r_grid is None else np.asarray(r_grid, dtype=float)
        phi = np.asarray(density(r))
        phi_min, n_phi = float(phi.min()), int(r.size)
        if not (phi_min >= 0):
            failures.append(f"phi negative: min {phi_min:.3e}")
    return CMReport(not failures, float(tol), worst, phi_min, n_phi, failures)


def numerical_laplace(producer, p, t_floor=1e-14, decay=60.0, step=0.25):
    """``int_0^inf exp(-p t) u(t) dt`` from sampled values of ``u``.

    ``producer(t)`` returns ``u`` on an increasing grid.  The integral runs in
    ``s = log t`` over ``[log t_floor, log(decay / min(p))]`` with
    Gauss-Kronrod panels of width ``step``; ``[0, t_floor]`` is taken as
    ``t_floor * u(t_floor)``.
    """
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any(~(p > 0)):
        raise DomainError("numerical Laplace transform needs p > 0")
    s_hi = math.log(decay / p.min())
    edges = np.arange(math.log(t_floor), s_hi + step, step)
    s, half = panel_nodes(edges)
    t = np.exp(s.ravel())
    u = np.asarray(producer(np.concatenate([[t_floor], t]))).ravel()
    head = t_floor * u[0]
    vals = (u[1:] * t).reshape(s.shape)
    kern = np.exp(-np.multiply.outer(p, np.exp(s)))
    total = np.sum(kern * vals * GK_WEIGHTS * half, axis=(-1, -2))
    return total + head
