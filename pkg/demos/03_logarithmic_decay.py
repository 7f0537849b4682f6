"""Ultraslow relaxation when the order distribution reaches alpha = 0.

With mass near alpha = 0 the decay is logarithmic rather than a power law.
A uniform density gives u ~ C / log t; a density vanishing like alpha^nu
gives (log t)^-(1+nu).  We track u times the predicted law over six decades
of t and report how much that ratio drifts.
"""
import numpy as np

from distrelax import (Constant, LogPower, MeasureSpec, PowerLaw, SpectralDensity, drift_trend,
                       ratio_drift, solve_spectral, validate)

cases = [("uniform", Constant(1.0), 1.0),
         ("alpha^1", PowerLaw(1.0, 1.0), 2.0),
         ("alpha^-1/2", PowerLaw(1.0, -0.5), 0.5)]
t = np.logspace(8, 14, 25)
for label, dens, exponent in cases:
    m = validate(MeasureSpec(density=dens))
    d = SpectralDensity(m, 1.0)
    s = solve_spectral(m, 1.0, t, density=d)
    res = ratio_drift(s, LogPower(exponent))
    print(f"{label:11s} u (log t)^{exponent:<4g} mean {res.mean_ratio:.4f}, drift {res.drift:.3f}")

# the drift keeps shrinking further out: the law is asymptotic, not exact
m = validate(MeasureSpec(density=Constant(1.0)))
far = solve_spectral(m, 1.0, np.logspace(4, 100, 97))
print("uniform, sub-window drifts from 1e4 to 1e100:",
      ["%.3f" % d for d in drift_trend(far, LogPower(1.0), pieces=4)["drifts"]])
