"""Construction of measurement operators and incoherence diagnostics.

All randomness here goes through numpy's PCG64 generator seeded with the
caller's integer seed, so identical ``(m, N, seed)`` always produce
bit-identical operators regardless of platform or thread count. Row
subsets are drawn with an explicit Fisher-Yates shuffle on row indices so
the selection scheme is reproducible from this description alone.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .linops import SensingOperator, as_matrix

# Column-orthonormality tolerance for basis pairs.
BASIS_TOL = 1e-10

# Binary operator container: magic, then little-endian u32 m, N, flags,
# then m*N little-endian float64 in row-major order. Flag bit 0 marks
# orthonormal rows.
OPERATOR_MAGIC = b"PALMSOP1"
_HEADER = struct.Struct("<8sIII")
_FLAG_ROWS_ORTHONORMAL = 1


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal type-II DCT matrix of size n x n.

    Row k holds the frequency-k cosine atom
    ``c_k * cos(pi * (2j + 1) * k / (2n))`` with ``c_0 = sqrt(1/n)`` and
    ``c_k = sqrt(2/n)`` otherwise, so both the rows and the columns are
    orthonormal.
    """
    if n < 1:
        raise ValueError(f"DCT size must be >= 1, got {n}")
    j = np.arange(n)
    k = np.arange(n).reshape(-1, 1)
    mat = np.cos(np.pi * (2 * j + 1) * k / (2 * n))
    mat[0] *= np.sqrt(1.0 / n)
    mat[1:] *= np.sqrt(2.0 / n)
    return mat


def _fisher_yates(n: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded Fisher-Yates permutation of ``range(n)``."""
    idx = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        idx[i], idx[j] = idx[j], idx[i]
    return idx


def make_partial_dct(m: int, N: int, seed: int) -> SensingOperator:
    """m distinct rows of the N x N orthonormal DCT, chosen by seed.

    The row subset is the first m entries of a Fisher-Yates shuffle of the
    row indices (sorted afterwards, which does not change the subset), so
    the same ``(m, N, seed)`` always gives the same operator. With m == N
    this is the complete DCT matrix.
    """
    if not 1 <= m <= N:
        raise ValueError(f"need 1 <= m <= N, got m={m}, N={N}")
    rng = np.random.Generator(np.random.PCG64(seed))
    chosen = np.sort(_fisher_yates(N, rng)[:m])
    return SensingOperator(dct_matrix(N)[chosen], rows_orthonormal=True)


def make_gaussian_orthonormal(m: int, N: int, seed: int) -> SensingOperator:
    """Seeded standard-normal m x N draw with rows orthonormalized.

    Uses Gram-Schmidt with a second re-orthogonalization pass, which keeps
    ``|A A^T - I|`` at round-off level for the sizes this package targets.
    """
    if not 1 <= m <= N:
        raise ValueError(f"need 1 <= m <= N, got m={m}, N={N}")
    rng = np.random.Generator(np.random.PCG64(seed))
    raw = rng.standard_normal((m, N))
    q = np.empty_like(raw)
    for i in range(m):
        v = raw[i].copy()
        for _ in range(2):
            for j in range(i):
                v -= (q[j] @ v) * q[j]
        norm = np.linalg.norm(v)
        if norm < 1e-8:
            raise ValueError(
                f"draw for seed {seed} is numerically rank-deficient at row {i}; "
                "retry with a different seed"
            )
        q[i] = v / norm
    return SensingOperator(q, rows_orthonormal=True)


@dataclass(frozen=True)
class BasisPair:
    """Two N x N bases with orthonormal columns, for coherence checks."""

    phi: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        phi = as_matrix(self.phi, "phi")
        psi = as_matrix(self.psi, "psi")
        if phi.shape != psi.shape or phi.shape[0] != phi.shape[1]:
            raise ValueError(
                f"bases must be square and same-sized, got {phi.shape} and {psi.shape}"
            )
        n = phi.shape[0]
        for name, mat in (("phi", phi), ("psi", psi)):
            err = np.max(np.abs(mat.T @ mat - np.eye(n)))
            if err > BASIS_TOL:
                raise ValueError(
                    f"{name} columns are not orthonormal: max |B^T B - I| = {err:.3e}"
                )
        phi = phi.copy()
        psi = psi.copy()
        phi.setflags(write=False)
        psi.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "psi", psi)

    @property
    def size(self) -> int:
        return self.phi.shape[0]


def mutual_coherence(pair: BasisPair) -> float:
    """sqrt(N) times the largest |<phi_i, psi_j>| over all column pairs.

    Lies in [1, sqrt(N)] for orthonormal bases: 1 for maximally spread
    pairs (e.g. spike/Hadamard), sqrt(N) when the bases share a column.
    """
    inner = pair.phi.T @ pair.psi
    return float(np.sqrt(pair.size) * np.max(np.abs(inner)))


def spectral_norm_estimate(A: SensingOperator, iterations: int) -> float:
    """Power-iteration lower estimate of the largest singular value.

    Iterates on the small Gram matrix ``A A^T`` from a fixed seeded start
    vector and returns the square root of the Rayleigh quotient, which is
    nondecreasing in the iteration count and never exceeds the true value
    beyond round-off.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    gram = A.matrix @ A.matrix.T
    rng = np.random.Generator(np.random.PCG64(0x5EED))
    v = rng.standard_normal(A.rows)
    v /= np.linalg.norm(v)
    for _ in range(iterations):
        w = gram @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
    return float(np.sqrt(v @ (gram @ v)))


def operator_to_bytes(A: SensingOperator) -> bytes:
    """Serialize an operator to the binary container format."""
    flags = _FLAG_ROWS_ORTHONORMAL if A.rows_orthonormal else 0
    header = _HEADER.pack(OPERATOR_MAGIC, A.rows, A.cols, flags)
    return header + A.matrix.astype("<f8").tobytes(order="C")


def operator_from_bytes(data: bytes) -> SensingOperator:
    """Parse an operator from the binary container format."""
    if len(data) < _HEADER.size:
        raise ValueError(
            f"operator container truncated: {len(data)} bytes, need at least "
            f"{_HEADER.size} for the header"
        )
    magic, m, n, flags = _HEADER.unpack_from(data)
    if magic != OPERATOR_MAGIC:
        raise ValueError(f"bad operator magic {magic!r}, expected {OPERATOR_MAGIC!r}")
    expected = _HEADER.size + 8 * m * n
    if len(data) != expected:
        raise ValueError(
            f"operator container for {m}x{n} must be {expected} bytes, got {len(data)}"
        )
    mat = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(m, n)
    return SensingOperator(
        np.ascontiguousarray(mat),
        rows_orthonormal=bool(flags & _FLAG_ROWS_ORTHONORMAL),
    )
