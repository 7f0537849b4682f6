"""A single fractional order: the relaxation is a Mittag-Leffler function.

For rho = delta_alpha the equation reduces to the Caputo relaxation
D^alpha u = -lam u whose solution is E_alpha(-lam t^alpha).  We solve it
with the spectral route and compare against the independent Mittag-Leffler
evaluator, then watch the t^-alpha power tail take over.
"""
import numpy as np

from distrelax import AtomSpec, MeasureSpec, PowerTail, ratio_drift, solve_spectral, validate
from distrelax.mlf import ml_power_tail, relaxation_single_order

t = np.logspace(-2, 2, 9)
print("alpha   max |u_spectral / E_alpha - 1| on [1e-2, 1e2]")
for alpha in (0.25, 0.5, 0.75):
    m = validate(MeasureSpec(atoms=(AtomSpec(alpha, 1.0),)))
    u = solve_spectral(m, 1.0, t).u
    print(f"{alpha:5.2f}   {np.max(np.abs(u / relaxation_single_order(alpha, 1.0, t) - 1)):.1e}")

# far out, E_alpha(-t^alpha) behaves like t^-alpha / Gamma(1 - alpha)
m = validate(MeasureSpec(atoms=(AtomSpec(0.5, 1.0),)))
late = np.logspace(6, 10, 5)
s = solve_spectral(m, 1.0, late)
print("\nt        u(t)         u / power tail")
for ti, ui in zip(late, s.u):
    print(f"{ti:8.0e} {ui:.6e} {ui / ml_power_tail(0.5, 1.0, ti):.8f}")
print("drift against the tail:", ratio_drift(s, PowerTail(0.5, 1 / np.sqrt(np.pi))).drift)
