"""
Reference computations
======================

Slow but direct answers used to check the iterative code: a one-sided Jacobi
SVD, the minimum-norm least-squares solution, and the exact distance from b
to the image of a ball.
"""

import numpy as np

from triangle_linsolve import InstanceSpec, generate
from triangle_linsolve.oracles import (
    jacobi_svd,
    least_squares_direct,
    numerical_rank,
    project_to_ellipsoid,
    smallest_positive_singular_value,
)

inst = generate(InstanceSpec("IllConditioned", 60, 60, seed=3))
U, s, V = jacobi_svd(inst.A)
print("largest / smallest singular values: %.3f / %.3g" % (s[0], s[-1]))
print("reconstruction error %.1e" % np.abs((U * s) @ V.T - inst.A).max())
print("numerical rank", numerical_rank(s), "sigma_* =", smallest_positive_singular_value(inst.A))

x_star, delta = least_squares_direct(inst.A, inst.b)
print("||x_*|| = %.3f, residual %.1e" % (np.linalg.norm(x_star), delta))
print("bound ||b|| / sigma_* = %.1f" % (np.linalg.norm(inst.b) / s[-1]))

# distance from b to {Ax : ||x|| <= r} as r grows
for r in (1.0, 5.0, 20.0, np.linalg.norm(x_star)):
    proj = project_to_ellipsoid(inst.A, inst.b, r)
    print("r = %7.3f  delta_r = %.4f  multiplier %.3g" % (r, proj.delta_r, proj.lam))
