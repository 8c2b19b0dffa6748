"""
Solving, and proving there is nothing to solve
==============================================

The driver grows the radius whenever it meets a witness. On a consistent
system it returns an approximate solution; on an inconsistent one it stops
at the radius cap with either an unsolvability certificate or an approximate
solution of the normal equations.
"""

import math

import numpy as np

from triangle_linsolve import InstanceSpec, SolverConfig, generate, solve
from triangle_linsolve.oracles import least_squares_direct

# a consistent low-rank system: half of the singular values are zero
inst = generate(InstanceSpec("LowRank", 200, 200, seed=1))
out = solve(inst.A, inst.b, SolverConfig(epsilon=1e-3))
print(out.tag.value, "residual %.2e" % out.residual, "iterations", out.iterations)
print("radii visited", ["%.3g" % r for r in out.radius_history])

# the returned x is not far from the minimum-norm solution in size
x_star, _ = least_squares_direct(inst.A, inst.b)
print("||x|| = %.4f, ||x_*|| = %.4f" % (np.linalg.norm(out.x), np.linalg.norm(x_star)))

# push b off the range of A by a unit vector: no solution exists
bad = generate(InstanceSpec("LowRank", 200, 200, seed=1, consistent=False))
out = solve(bad.A, bad.b, SolverConfig(epsilon=1e-2))
_, delta = least_squares_direct(bad.A, bad.b)
print(out.tag.value, "min ||Ax - b|| >= %.4f (true value %.4f)" % (out.delta_lower_bound, delta))

# with the certificate switched off the same run reports a normal-equation solution
out = solve(bad.A, bad.b, SolverConfig(epsilon=1e-2, unsolvable_margin=math.inf))
print(out.tag.value, "||A^T(Ax - b)|| = %.2e" % out.normal_residual)
print(out.to_json(indent=2))
