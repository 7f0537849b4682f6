"""Positive finite measures on the order interval [0, 1].

A measure is the sum of point masses (atoms) and an optional density.
Specifications are plain dataclasses that round-trip through JSON-style
dicts; :func:`validate` turns one into an immutable :class:`ValidatedMeasure`
with every atom materialised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (AtomOutOfRange, EmptyMeasure, InfiniteMass, MassAtZeroOnly,
                     MeasureError, NonPositiveWeight)
from .quadrature import AlphaQuadrature

DEFAULT_TAIL_TOL = 1e-12
DEFAULT_RTOL = 1e-10


# --------------------------------------------------------------------------
# atoms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AtomSpec:
    """Point mass ``weight`` at order ``location``."""

    location: float
    weight: float

    def to_dict(self):
        return {"location": self.location, "weight": self.weight}


@dataclass(frozen=True)
class GeometricAtoms:
    """Infinite atom sequence truncated once the discarded mass is below ``tail_tol``.

    Atom ``n`` (for ``n = start, start + 1, ...``) sits at ``base * ratio**n``
    (``direction="toward0"``) or ``1 - (1 - base) * ratio**n``
    (``direction="toward1"``) and carries ``weight * weight_ratio**n``.
    """

    base: float
    ratio: float
    weight: float
    weight_ratio: float
    direction: str = "toward0"
    tail_tol: float = DEFAULT_TAIL_TOL
    start: int = 0

    def to_dict(self):
        return {"kind": "geometric", "direction": self.direction, "base": self.base,
                "ratio": self.ratio, "weight": self.weight,
                "weight_ratio": self.weight_ratio, "tail_tol": self.tail_tol,
                "start": self.start}

    def location(self, n):
        if self.direction == "toward0":
            return self.base * self.ratio ** n
        return 1.0 - (1.0 - self.base) * self.ratio ** n

    def materialize(self):
        """Return ``(locations, weights, tail_bound)``."""
        if self.direction not in ("toward0", "toward1"):
            raise MeasureError(f"unknown direction {self.direction!r}")
        if not 0 < self.base < 1:
            raise AtomOutOfRange(f"geometric base {self.base} not in (0, 1)")
        if not 0 < self.ratio < 1:
            raise AtomOutOfRange(f"location ratio {self.ratio} not in (0, 1)")
        if not self.weight > 0:
            raise NonPositiveWeight(f"geometric weight {self.weight} must be positive")
        if not 0 < self.weight_ratio < 1:
            if self.weight_ratio >= 1:
                raise InfiniteMass(f"weight ratio {self.weight_ratio} >= 1 is not summable")
            raise NonPositiveWeight(f"weight ratio {self.weight_ratio} must be positive")
        if not self.tail_tol > 0:
            raise MeasureError("tail_tol must be positive")
        s, w0 = self.weight_ratio, self.weight
        # smallest n_last with  w0 s^(n_last+1) / (1 - s) < tail_tol
        n_last = self.start
        while w0 * s ** (n_last + 1) / (1 - s) >= self.tail_tol:
            n_last += 1
        locs, wts = [], []
        for n in range(self.start, n_last + 1):
            loc = self.location(n)
            if not 0 < loc < 1:
                # location rounded onto an endpoint: fold the rest into the tail
                n_last = n - 1
                break
            locs.append(loc)
            wts.append(w0 * s ** n)
        tail = w0 * s ** (n_last + 1) / (1 - s)
        return np.array(locs), np.array(wts), tail


AtomItem = Union[AtomSpec, GeometricAtoms]


# --------------------------------------------------------------------------
# densities
# --------------------------------------------------------------------------

class _Density:
    anchors: tuple = (0.0, 1.0)

    def peaks(self, x):
        return None

    def exact_mass(self):
        """Closed-form total mass, or ``None`` when only quadrature is available."""
        return None


@dataclass(frozen=True)
class Constant(_Density):
    c: float

    def pdf(self, alpha):
        return np.full(np.shape(alpha), float(self.c))

    def exact_mass(self):
        return float(self.c)

    def cdf(self, alpha):
        return self.c * np.asarray(alpha, dtype=float)

    def check(self):
        if not self.c > 0:
            raise NonPositiveWeight(f"constant density {self.c} must be positive")

    def to_dict(self):
        return {"kind": "constant", "c": self.c}


@dataclass(frozen=True)
class PowerLaw(_Density):
    """``mu(alpha) = a * alpha**exponent``."""

    a: float
    exponent: float

    def pdf(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        with np.errstate(divide="ignore"):
            return self.a * alpha ** self.exponent

    def exact_mass(self):
        return self.a / (self.exponent + 1)

    def cdf(self, alpha):
        return self.a * np.asarray(alpha, dtype=float) ** (self.exponent + 1) / (self.exponent + 1)

    def check(self):
        if not self.a > 0:
            raise NonPositiveWeight(f"power-law amplitude {self.a} must be positive")
        if not self.exponent > -1:
            raise InfiniteMass(f"power-law exponent {self.exponent} <= -1 is not integrable")

    def to_dict(self):
        return {"kind": "power_law", "a": self.a, "exponent": self.exponent}


@dataclass(frozen=True)
class PowerExponential(_Density):
    """``mu(alpha) = a * alpha**gamma * exp(-beta/alpha)``."""

    a: float
    gamma: float
    beta: float

    @property
    def anchors(self):
        split = self.beta / math.log(1 / np.finfo(float).eps)
        return (0.0, split, 1.0) if split < 1 else (0.0, 1.0)

    def pdf(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        pos = alpha > 0
        safe = np.where(pos, alpha, 1.0)
        with np.errstate(under="ignore"):
            val = self.a * np.exp(self.gamma * np.log(safe) - self.beta / safe)
        return np.where(pos, val, 0.0)

    def cdf(self, alpha):
        # only used on tiny intervals at 0, where alpha**(gamma+2)/beta bounds the mass
        alpha = np.asarray(alpha, dtype=float)
        return alpha * alpha * self.pdf(alpha) / self.beta

    def peaks(self, x):
        # stationary point of gamma*log(a) - beta/a + x*a
        x = np.asarray(x, dtype=float)
        g, b = self.gamma, self.beta
        neg = np.minimum(x, -1e-300)
        centre = (g + np.sqrt(g * g + 4 * b * np.abs(neg))) / (2 * np.abs(neg))
        fallback = self.beta / 36.0
        centre = np.where(x < 0, centre, fallback)
        curv = b / centre + np.abs(x) * centre
        width = 1.0 / np.sqrt(np.maximum(curv, 1.0))
        return np.clip(centre, 1e-300, 1.0), width

    def check(self):
        if not self.a > 0:
            raise NonPositiveWeight(f"amplitude {self.a} must be positive")
        if not self.gamma > -1:
            raise InfiniteMass(f"gamma {self.gamma} must exceed -1")
        if not self.beta > 0:
            raise MeasureError(f"beta {self.beta} must be positive")

    def to_dict(self):
        return {"kind": "power_exponential", "a": self.a, "gamma": self.gamma, "beta": self.beta}


@dataclass(frozen=True)
class Tabulated(_Density):
    """Piecewise-linear density through ``(alpha, value)`` knots, zero outside."""

    alpha: tuple
    values: tuple

    @property
    def anchors(self):
        return tuple(sorted({0.0, 1.0, *map(float, self.alpha)}))

    def pdf(self, alpha):
        return np.interp(alpha, self.alpha, self.values, left=0.0, right=0.0)

    def exact_mass(self):
        return float(np.trapezoid(self.values, self.alpha))

    def cdf(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        a = np.asarray(self.alpha)
        v = np.asarray(self.values)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(a))])
        i = np.clip(np.searchsorted(a, alpha, side="right") - 1, 0, a.size - 1)
        left = np.clip(alpha, a[0], a[-1])
        seg = left - a[i]
        val_i = v[i]
        slope = np.where(i < a.size - 1, (v[np.minimum(i + 1, a.size - 1)] - v[i])
                         / np.where(i < a.size - 1, a[np.minimum(i + 1, a.size - 1)] - a[i], 1.0), 0.0)
        return cum[i] + seg * (val_i + 0.5 * slope * seg)

    def check(self):
        a, v = np.asarray(self.alpha, float), np.asarray(self.values, float)
        if a.ndim != 1 or a.shape != v.shape or a.size < 2:
            raise MeasureError("tabulated density needs two equal-length lists of >= 2 knots")
        if np.any(np.diff(a) <= 0) or a[0] < 0 or a[-1] > 1:
            raise MeasureError("tabulated knots must be strictly increasing inside [0, 1]")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise NonPositiveWeight("tabulated density values must be finite and >= 0")

    def to_dict(self):
        return {"kind": "tabulated", "alpha": list(self.alpha), "values": list(self.values)}


Density = Union[Constant, PowerLaw, PowerExponential, Tabulated]


def density_from_dict(d):
    kind = d.get("kind")
    if kind == "constant":
        return Constant(float(d["c"]))
    if kind == "power_law":
        return PowerLaw(float(d["a"]), float(d["exponent"]))
    if kind == "power_exponential":
        return PowerExponential(float(d["a"]), float(d["gamma"]), float(d["beta"]))
    if kind == "tabulated":
        return Tabulated(tuple(map(float, d["alpha"])), tuple(map(float, d["values"])))
    raise MeasureError(f"unknown density kind {kind!r}")


# --------------------------------------------------------------------------
# specification and validated measure
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureSpec:
    atoms: Sequence[AtomItem] = ()
    density: Optional[Density] = None

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise MeasureError("measure must be a JSON object")
        items = []
        for item in d.get("atoms", []):
            if item.get("kind", "atom") == "atom":
                items.append(AtomSpec(float(item["location"]), float(item["weight"])))
            elif item["kind"] == "geometric":
                items.append(GeometricAtoms(
                    base=float(item["base"]), ratio=float(item["ratio"]),
                    weight=float(item["weight"]), weight_ratio=float(item["weight_ratio"]),
                    direction=item.get("direction", "toward0"),
                    tail_tol=float(item.get("tail_tol", DEFAULT_TAIL_TOL)),
                    start=int(item.get("start", 0))))
            else:
                raise MeasureError(f"unknown atom kind {item['kind']!r}")
        dens = d.get("density")
        return cls(tuple(items), density_from_dict(dens) if dens else None)

    def to_dict(self):
        out = {"atoms": [a.to_dict() for a in self.atoms]}
        if self.density is not None:
            out["density"] = self.density.to_dict()
        return out


@dataclass(frozen=True, eq=False)
class ValidatedMeasure:
    """Immutable measure with materialised atoms.

    ``locations``/``weights`` are read-only arrays sorted by location;
    ``tail_bound`` bounds the mass discarded by truncating generators.
    """

    spec: MeasureSpec
    locations: np.ndarray
    weights: np.ndarray
    density: Optional[Density]
    tail_bound: float
    rtol: float = DEFAULT_RTOL
    quad: Optional[AlphaQuadrature] = field(default=None, repr=False)

    @property
    def has_atoms(self):
        return self.locations.size > 0

    @property
    def support_min(self):
        """Smallest order carrying mass (0 when a density is present)."""
        if self.density is not None:
            return 0.0
        return float(self.locations[0])

    @property
    def support_max(self):
        if self.density is not None:
            return 1.0
        return float(self.locations[-1])

    def atom_mass(self):
        return math.fsum(self.weights)

    def density_mass(self):
        if self.density is None:
            return 0.0
        return float(self.quad.integrate(0.0, _one)[0][0])

    def __eq__(self, other):
        if not isinstance(other, ValidatedMeasure):
            return NotImplemented
        return (np.array_equal(self.locations, other.locations)
                and np.array_equal(self.weights, other.weights)
                and self.density == other.density and self.tail_bound == other.tail_bound)

    __hash__ = None


def _one(alpha):
    return 1.0


def validate(spec, rtol=DEFAULT_RTOL):
    """Check ``spec`` and materialise it.

    Raises
    ------
    NonPositiveWeight, AtomOutOfRange, MassAtZeroOnly, InfiniteMass, EmptyMeasure
    """
    if isinstance(spec, dict):
        spec = MeasureSpec.from_dict(spec)
    locs, wts, tail = [], [], 0.0
    at_zero = False
    for item in spec.atoms:
        if isinstance(item, AtomSpec):
            if not math.isfinite(item.weight):
                raise InfiniteMass(f"atom weight {item.weight} is not finite")
            if not item.weight > 0:
                raise NonPositiveWeight(f"atom weight {item.weight} must be positive")
            if item.location == 0:
                at_zero = True
                continue
            if not 0 < item.location < 1:
                raise AtomOutOfRange(f"atom location {item.location} not in (0, 1)")
            locs.append(item.location)
            wts.append(item.weight)
        else:
            l, w, t = item.materialize()
            locs.extend(l)
            wts.extend(w)
            tail += t
    if spec.density is not None:
        spec.density.check()
    if at_zero:
        if locs or spec.density is not None:
            raise AtomOutOfRange("atoms at alpha = 0 are not supported")
        raise MassAtZeroOnly("measure is concentrated at alpha = 0")
    if not locs and spec.density is None:
        raise EmptyMeasure("measure has neither atoms nor a density")

    locs = np.asarray(locs, dtype=float)
    wts = np.asarray(wts, dtype=float)
    order = np.argsort(locs, kind="stable")
    locs, wts = locs[order], wts[order]
    # merge coincident atoms
    if locs.size:
        uniq, inv = np.unique(locs, return_inverse=True)
        if uniq.size < locs.size:
            wts = np.bincount(inv, weights=wts)
            locs = uniq
    if not math.isfinite(float(np.sum(wts))):
        raise InfiniteMass("atom weights sum to infinity")
    locs.flags.writeable = False
    wts.flags.writeable = False

    quad = AlphaQuadrature(spec.density, rtol=rtol) if spec.density is not None else None
    m = ValidatedMeasure(spec, locs, wts, spec.density, tail, rtol, quad)
    if spec.density is not None:
        dm = m.density_mass()
        if not math.isfinite(dm):
            raise InfiniteMass("density integral is not finite")
        if dm <= 0 and not locs.size:
            raise EmptyMeasure("density integrates to zero")
    return m


def total_mass(m):
    """Atom mass plus density integral."""
    return m.atom_mass() + m.density_mass()


def moment_gf(m, z):
    """Moment generating function ``M(z) = int exp(z*alpha) drho(alpha)``.

    ``z`` may be a scalar or an array of reals.
    """
    z = np.asarray(z, dtype=float)
    flat = np.atleast_1d(z).ravel()
    out = np.zeros(flat.shape)
    if m.has_atoms:
        out += np.exp(np.multiply.outer(flat, m.locations)) @ m.weights
    if m.density is not None:
        out += m.quad.integrate(flat, _one)[0]
    return out.reshape(z.shape) if z.ndim else float(out[0])


__all__ = [
    "AtomSpec", "GeometricAtoms", "Constant", "PowerLaw", "PowerExponential", "Tabulated",
    "MeasureSpec", "ValidatedMeasure", "validate", "total_mass", "moment_gf",
    "density_from_dict",
]
