"""Every relaxation curve here is completely monotone.

That follows from u being the Laplace transform of phi >= 0.  We check the
certificate (phi on 1e4 points) and the finite-difference signs through
order 4 for a smooth density with an essential zero at alpha = 0.
"""
import numpy as np

from distrelax import (MeasureSpec, PowerExponential, SpectralDensity, check_complete_monotonicity,
                       solve_spectral, validate)

m = validate(MeasureSpec(density=PowerExponential(1.0, 0.0, 1.0)))
d = SpectralDensity(m, 1.0)
rep = check_complete_monotonicity(lambda g: solve_spectral(m, 1.0, g, density=d),
                                  np.logspace(-2, 3, 80), max_order=4, density=d)
print("passed:", rep.passed)
print("phi min over", rep.phi_points, "points:", rep.phi_min)
for order, v in rep.max_violation.items():
    print(f"order {order}: worst sign violation {v:.1e} (tol {rep.tol:.1e})")
print("normalisation  int phi dr =", d.normalization())
