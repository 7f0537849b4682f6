"""Two independent routes to the same curve.

The spectral solver writes u as a Laplace transform of a non-negative
density phi(r) on the negative real axis.  The stepping solver discretises
the Volterra equation directly.  For a uniform distribution of orders the
two must agree; Richardson extrapolation of the stepper tightens the match.
"""
import time

import numpy as np

from distrelax import Constant, MeasureSpec, richardson_refine, solve_spectral, solve_stepping, validate

m = validate(MeasureSpec(density=Constant(1.0)))
h, T = 0.005, 5.0

start = time.perf_counter()
coarse = solve_stepping(m, 1.0, 2 * h, T)
fine = solve_stepping(m, 1.0, h, T)
extrap = richardson_refine(coarse, fine)
print(f"stepping (two runs): {time.perf_counter() - start:.1f}s")

start = time.perf_counter()
spec = solve_spectral(m, 1.0, extrap.t)
print(f"spectral: {time.perf_counter() - start:.1f}s")

plain = np.abs(fine.u[::2] / spec.u - 1)
rich = np.abs(extrap.u / spec.u - 1)
sel = extrap.t >= 0.05
print(f"max rel diff on [0.05, {T}]: fine grid {plain[sel].max():.1e}, extrapolated {rich[sel].max():.1e}")
for tt in (0.1, 1.0, 5.0):
    i = int(np.argmin(np.abs(extrap.t - tt)))
    print(f"t={extrap.t[i]:4.1f}  spectral {spec.u[i]:.8f}  stepping+richardson {extrap.u[i]:.8f}")
