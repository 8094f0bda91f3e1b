"""
Measurement operators, mutual coherence, and the step-size bound
================================================================

The number of measurements a sparse-recovery problem needs scales with the
mutual coherence between the measurement basis and the sparsity basis:
``sqrt(N) * max |<phi_i, psi_j>|``, which lies in [1, sqrt(N)] for
orthonormal bases. Spike/Hadamard pairs sit at the ideal value 1; a basis
paired with itself sits at the useless maximum sqrt(N).

The largest singular value of an operator bounds the solver's proximal
step: ``tau <= 1 / sigma_max(A)^2``. Operators built here have orthonormal
rows, so sigma_max = 1 and the default step is always safe.
"""

import numpy as np

from palmcs import (
    BasisPair,
    SensingOperator,
    dct_matrix,
    make_gaussian_orthonormal,
    make_partial_dct,
    mutual_coherence,
    operator_from_bytes,
    operator_to_bytes,
    spectral_norm_estimate,
)

n = 16


def hadamard(size):
    h = np.array([[1.0]])
    while h.shape[0] < size:
        h = np.block([[h, h], [h, -h]])
    return h / np.sqrt(size)


pairs = {
    "spike / spike": BasisPair(np.eye(n), np.eye(n)),
    "spike / Hadamard": BasisPair(np.eye(n), hadamard(n)),
    "spike / DCT": BasisPair(np.eye(n), dct_matrix(n).T),
    "DCT / DCT": BasisPair(dct_matrix(n).T, dct_matrix(n).T),
}
print(f"mutual coherence (N = {n}, range [1, {np.sqrt(n):.0f}]):")
for label, pair in pairs.items():
    print(f"  {label:18s} {mutual_coherence(pair):.4f}")

# Orthonormal-row constructions: the Gram matrix is the identity to
# round-off regardless of seed, and identical seeds rebuild identical
# operators.
print("\nrow-orthonormality of constructed operators (max |A A^T - I|):")
for label, op in (
    ("partial DCT 8x16", make_partial_dct(8, 16, seed=3)),
    ("gaussian     8x16", make_gaussian_orthonormal(8, 16, seed=3)),
):
    err = np.max(np.abs(op.matrix @ op.matrix.T - np.eye(op.rows)))
    print(f"  {label}: {err:.2e}")

same = operator_to_bytes(make_partial_dct(8, 16, seed=3)) == operator_to_bytes(
    make_partial_dct(8, 16, seed=3)
)
print(f"  same seed, same bytes: {same}")

# Spectral-norm estimates rise monotonically toward the true value and
# never overshoot it.
rng = np.random.Generator(np.random.PCG64(5))
general = SensingOperator(rng.normal(size=(6, 12)))
true_sigma = np.linalg.norm(np.asarray(general.matrix), 2)
print(f"\npower-iteration estimates vs true sigma_max = {true_sigma:.6f}:")
for iterations in (1, 2, 5, 20, 100):
    estimate = spectral_norm_estimate(general, iterations)
    print(f"  {iterations:4d} iterations: {estimate:.6f}")
print(f"safe proximal step for this operator: tau <= {1 / true_sigma**2:.4f}")

# Operators round-trip through a little-endian binary container, so an
# experiment can pin the exact matrix it used.
blob = operator_to_bytes(general)
restored = operator_from_bytes(blob)
print(f"\nserialized {len(blob)} bytes; restored equals original: "
      f"{np.array_equal(restored.matrix, general.matrix)}")
