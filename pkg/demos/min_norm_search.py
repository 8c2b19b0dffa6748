"""
Bisecting on the radius
=======================

Any radius that admits an approximate solution is an upper bound on the
norm needed; a witness at a smaller radius is a lower bound. Bisecting
between the two pins down the smallest-norm approximate solution.
"""

import numpy as np

from triangle_linsolve import SolverConfig, min_norm_refine

d = np.array([2.0, 1.0, 0.5])
b = np.array([1.0, -0.5, 0.25])
print("closed-form minimum norm:", np.linalg.norm(b / d))

res = min_norm_refine(np.diag(d), b, SolverConfig(epsilon=1e-4), r_feasible=4.0, width=1e-3)
print("bracket [%.5f, %.5f] after %d probes" % (res.r_low, res.r_high, res.probes))
print("x =", res.x, "residual %.1e" % res.residual)
