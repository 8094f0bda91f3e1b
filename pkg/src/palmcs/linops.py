"""Dense vectors, matrices, and the sensing-operator wrapper.

Everything downstream (solver, sensing, experiments) works with plain
float64 numpy arrays: vectors are 1-D, matrices 2-D row-major. The only
structure carried around is :class:`SensingOperator`, a frozen wrapper for
an underdetermined measurement matrix that remembers whether its rows are
orthonormal (which makes a unit proximal step size safe).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Aliases for readability in signatures; both are float64 ndarrays.
Vec = np.ndarray
Mat = np.ndarray

# max |A A^T - I| allowed when an operator claims orthonormal rows
ORTHONORMAL_ROW_TOL = 1e-10


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Validate and return ``v`` as a non-empty, finite 1-D float64 array."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a finite 2-D float64 array."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class SensingOperator:
    """An m-by-N measurement matrix with m <= N.

    Parameters
    ----------
    matrix : ndarray
        Dense (m, N) array, finite, with m <= N.
    rows_orthonormal : bool
        Declare that ``matrix @ matrix.T == I`` (checked to 1e-10 at
        construction). Operators built by :mod:`palmcs.sensing` set this;
        the solver uses it to skip the step-size safety estimate.

    The wrapped array is copied and marked read-only, so operators are
    immutable and safe to share between threads.
    """

    matrix: np.ndarray
    rows_orthonormal: bool = False

    def __post_init__(self):
        mat = as_matrix(self.matrix, "operator matrix").copy()
        m, n = mat.shape
        if m > n:
            raise ValueError(
                f"operator must have at most as many rows as columns, got {m}x{n}"
            )
        if self.rows_orthonormal:
            gram_err = np.max(np.abs(mat @ mat.T - np.eye(m)))
            if gram_err > ORTHONORMAL_ROW_TOL:
                raise ValueError(
                    "rows_orthonormal is set but max |A A^T - I| = "
                    f"{gram_err:.3e} exceeds {ORTHONORMAL_ROW_TOL:.0e}"
                )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def matvec(A: SensingOperator, v: Vec) -> Vec:
    """Apply the operator: ``(A v)_i = sum_j A_ij v_j``."""
    vv = as_vector(v, "input vector")
    if vv.shape[0] != A.cols:
        raise ValueError(
            f"matvec dimension mismatch: operator is {A.rows}x{A.cols}, "
            f"vector has length {vv.shape[0]}"
        )
    return A.matrix @ vv


def adjoint_matvec(A: SensingOperator, w: Vec) -> Vec:
    """Apply the transpose: ``(A^T w)_j = sum_i A_ij w_i``."""
    ww = as_vector(w, "input vector")
    if ww.shape[0] != A.rows:
        raise ValueError(
            f"adjoint_matvec dimension mismatch: operator is {A.rows}x{A.cols}, "
            f"vector has length {ww.shape[0]}"
        )
    return A.matrix.T @ ww


def norm1(v: Vec) -> float:
    """Sum of absolute values."""
    return float(np.sum(np.abs(as_vector(v))))


def norm2(v: Vec) -> float:
    """Euclidean norm (the root, not its square)."""
    return float(np.linalg.norm(as_vector(v)))


def norm_inf(v: Vec) -> float:
    """Largest absolute entry."""
    return float(np.max(np.abs(as_vector(v))))


def dot(a: Vec, b: Vec) -> float:
    """Inner product of two equal-length vectors."""
    aa = as_vector(a, "first vector")
    bb = as_vector(b, "second vector")
    if aa.shape[0] != bb.shape[0]:
        raise ValueError(
            f"dot dimension mismatch: lengths {aa.shape[0]} and {bb.shape[0]}"
        )
    return float(aa @ bb)
