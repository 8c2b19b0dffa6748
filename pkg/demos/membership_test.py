"""
Is b inside the image of a ball?
================================

Runs the fixed-radius iteration on a small system twice: once with a radius
large enough to contain a solution and once with one that is too small. The
second run ends at a witness, whose gap brackets the true distance from b to
the ellipsoid within a factor of two.
"""

import numpy as np

from triangle_linsolve import run_membership
from triangle_linsolve.oracles import project_to_ellipsoid

A = np.array([[2.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
x_true = np.array([0.6, -0.3])
b = A @ x_true
print("||x_true|| =", np.linalg.norm(x_true))

# radius 1 contains x_true, so a near point exists
res = run_membership(A, b, r=1.0, epsilon=1e-6)
print(res.tag.value, "after", res.state.iterations, "steps, residual", np.linalg.norm(A @ res.state.x_prime - b))

# radius 0.3 does not: the run stops at a witness
res = run_membership(A, b, r=0.3, epsilon=1e-6)
cert = res.certificate
print(res.tag.value, "gap", cert.gap)
print("distance bracket [%.4f, %.4f]" % (cert.delta_lower, cert.delta_upper))
print("no solution with ||x|| below", cert.radius_lower_bound)

# compare with the exact distance from the projection oracle
print("exact distance   %.4f" % project_to_ellipsoid(A, b, 0.3).delta_r)

# a trace records every step; here it is just printed
res = run_membership(A, b, r=1.0, epsilon=1e-3, trace=lambda rec: print("  ", rec))
