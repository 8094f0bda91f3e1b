"""
Sparse recovery from half the measurements
==========================================

A 5-sparse signal of length 128 is measured with 64 rows of an orthonormal
DCT, and the augmented-Lagrangian solver recovers it from the measurements
alone. The residual weight ``mu`` is set small relative to the data, so the
solve behaves like an equality-constrained l1 problem and the recovered
support matches the true one exactly.
"""

import sys

import numpy as np

from palmcs import (
    default_params,
    kkt_report,
    make_partial_dct,
    matvec,
    solve,
)

rng = np.random.Generator(np.random.PCG64(2024))

n, m, k = 128, 64, 5
A = make_partial_dct(m, n, seed=1)

x_true = np.zeros(n)
support = rng.choice(n, size=k, replace=False)
x_true[support] = rng.choice([-1.0, 1.0], size=k)
b = matvec(A, x_true)

print(f"operator: {m}x{n} partial DCT, rows orthonormal = {A.rows_orthonormal}")
print(f"true support: {sorted(int(i) for i in support)}")

# Solve with scale-aware defaults and a small residual weight. The trace
# sink prints iteration / objective / constraint violation as it runs.
params = default_params(A, b, mu_scale=1e-6)
print("\nfirst iterations (iteration, objective, feasibility):")


class EveryTenth:
    def __init__(self, sink, period=10):
        self.sink, self.period, self.count = sink, period, 0

    def write(self, record):
        if self.count % self.period == 0:
            self.sink.write(record)
        self.count += 1


result = solve(A, b, params, trace=EveryTenth(sys.stdout))

rel_err = np.linalg.norm(result.x - x_true) / np.linalg.norm(x_true)
found = sorted(int(i) for i in np.nonzero(np.abs(result.x) > 1e-3)[0])
print(f"\nconverged = {result.converged} after {result.iterations} iterations")
print(f"relative l2 error: {rel_err:.2e}")
print(f"recovered support: {found}")

# First-order optimality: all four violations should be tiny at convergence.
report = kkt_report(A, b, result, params.mu)
print("\noptimality report:")
print(f"  dual feasibility        {report.dual_feasibility:.3e}")
print(f"  complementarity         {report.complementarity:.3e}")
print(f"  primal feasibility      {report.primal_feasibility:.3e}")
print(f"  multiplier consistency  {report.multiplier_consistency:.3e}")

# The feasibility history decays by orders of magnitude over the run.
hist = result.feasibility_history
marks = [0, len(hist) // 4, len(hist) // 2, len(hist) - 1]
print("\nfeasibility trajectory:")
for i in marks:
    print(f"  iteration {i + 1:4d}: {hist[i]:.3e}")
