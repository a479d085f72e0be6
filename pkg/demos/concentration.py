"""
How concentrated can the function get?
======================================

The SCV measures concentration: an exponential has SCV 1 and the best
phase-type distribution of size N reaches 1/N.  Exponential cosine-square
functions do much better.  This script runs the full search and the
three-parameter heuristic for a few orders and compares them with 2/N^2.
"""

import time

from cme import OptConfig, Strategy, optimize_full, optimize_heuristic

###############################################################################
# Full search over omega and all n phases with CMA-ES.  A small budget
# keeps the demo short; the acceptance suite uses 10^5 evaluations.

print(f"{'n':>3} {'N':>3} {'full':>10} {'heuristic':>10} {'2/N^2':>10} {'sec':>6}")
for n in (1, 2, 4, 8):
    start = time.perf_counter()
    full = optimize_full(n, OptConfig(strategy=Strategy.CMA_ES, max_evals=4000, seed=0, restarts=1))
    heur = optimize_heuristic(n, OptConfig(max_evals=1500, seed=0))
    N = 2 * n + 1
    print(f"{n:3d} {N:3d} {full.best_scv:10.5f} {heur.best_scv:10.5f} {2 / N**2:10.5f} "
          f"{time.perf_counter() - start:6.1f}")

###############################################################################
# The heuristic only searches (omega, p, w), so its cost per evaluation grows
# with n but its search space does not.  The layout it found for n = 8:

print(heur.layout)
