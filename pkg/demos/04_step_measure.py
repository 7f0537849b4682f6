"""Countably many orders accumulating at 0 and at 1.

Atoms at beta_n = 0.3 * 2^-n and nu_n = 1 - 0.7 * 2^-n with geometrically
decaying weights.  The relaxation is comparable to the series
sum_n w_n x^-beta_n / Gamma(2 - beta_n) from above and below: the ratio
stays in a fixed band while both sides fall by orders of magnitude.
"""
import numpy as np

from distrelax import (AtomSeries, GeometricAtoms, IterLogBound, LogBound, MeasureSpec,
                       check_bound, solve_spectral, validate)

spec = MeasureSpec(atoms=(GeometricAtoms(0.3, 0.5, 0.5, 0.5),
                          GeometricAtoms(0.3, 0.5, 0.5, 0.5, direction="toward1", start=1)))
m = validate(spec)
print(f"{m.locations.size} atoms after truncation, discarded mass <= {m.tail_bound:.1e}")

x = np.logspace(2, 10, 9)
s = solve_spectral(m, 1.0, x)
env = AtomSeries.from_measure(m)(x)
for xi, ui, ei in zip(x, s.u, env):
    print(f"x={xi:7.0e}  u={ui:.4e}  series={ei:.4e}  ratio={ui / ei:.3f}")

# summability of the weights against 1/beta_n powers controls the decay class
wide = solve_spectral(m, 1.0, np.logspace(2, 60, 100))
for env in (IterLogBound(1.0), LogBound(0.5), LogBound(1.0)):
    res = check_bound(wide, env)
    print(f"{type(env).__name__}({getattr(env, 'b')}): bounded={res.bounded}, sup ratio {res.sup_ratio:.3f}")
