"""
A small benchmark grid
======================

Times the Triangle Algorithm against BiCGSTAB (plain and Jacobi
preconditioned) and steepest descent on the normal equations, writes the
rows to CSV and prints per-cell medians. The same grid is available as
``triangle-linsolve bench``.
"""

import sys

from triangle_linsolve.bench import emit_csv, run_grid, summarize

out = sys.argv[1] if len(sys.argv) > 1 else "grid.csv"
rows = run_grid(
    kinds=["GeneralUniform", "LowRank", "IllConditioned"],
    dims=[50, 100],
    epsilons=[1e-2],
    seeds=[1, 2, 3],
    methods=["TA", "BiCGSTAB", "BiCGSTAB-Jacobi", "SteepestDescent"],
    on_row=lambda r: print(f"{r.method:<16}{r.kind:<16}n={r.n:<4} seed={r.seed} "
                           f"{r.outcome_tag:<14}{r.wall_time_ms:8.1f} ms  residual {r.residual:.2e}"),
)
emit_csv(rows, out)
print("wrote", out)

for cell in summarize(rows):
    print(f"{cell['method']:<16}{cell['kind']:<16}n={cell['n']:<4} median {cell['median_wall_time_ms']:.1f} ms, "
          f"{cell['median_iterations']:g} iterations, outcomes {cell['outcomes']}")
