"""Density exp(-beta/alpha): decay between power laws and logarithms.

In the Laplace domain the symbol K(p) of mu(alpha) = exp(-1/alpha) follows
p^-1 (log 1/p)^-3/4 exp(-2 sqrt(log 1/p)) up to a constant as p -> 0.  The
ratio settles quickly there, while the matching time-domain law converges
so slowly in log t that only its trend is visible at reachable t.
"""
import numpy as np

from distrelax import (KernelAccessor, MeasureSpec, PowerExponential, StretchedLog, drift_trend,
                       solve_spectral, validate)

m = validate(MeasureSpec(density=PowerExponential(1.0, 0.0, 1.0)))
K = KernelAccessor(m)
env = StretchedLog(0.0, 1.0)
for exp10 in (-5, -10, -20, -30, -40):
    p = 10.0 ** exp10
    print(f"p=1e{exp10:<4d} K(p) / (p^-1 L(1/p)) = {K.laplace_symbol(p) * p / env.laplace_profile(1 / p):.5f}")

s = solve_spectral(m, 1.0, np.logspace(8, 200, 97))
trend = drift_trend(s, env, pieces=4)
print("time domain, sub-window drifts:", ["%.3f" % d for d in trend["drifts"]],
      "slope of log ratio vs log log t: %.3f" % trend["slope"])
