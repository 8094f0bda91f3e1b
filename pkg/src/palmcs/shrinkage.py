"""Soft-thresholding, the proximal operator of the l1 norm.

``shrink(z, alpha)`` is the unique minimizer of

    alpha * |t| + 0.5 * (t - z_i)^2

applied elementwise: each entry is pulled toward zero by ``alpha`` and
entries inside the dead zone ``|z_i| <= alpha`` are set to exactly 0.0,
so downstream sparsity counts are exact.
"""

from __future__ import annotations

import numpy as np

from .linops import Vec, as_vector


def shrink(z: Vec, alpha: float) -> Vec:
    """Elementwise soft threshold: ``sign(z) * max(|z| - alpha, 0)``."""
    zz = as_vector(z, "shrink input")
    if not np.isfinite(alpha) or alpha < 0:
        raise ValueError(f"shrink threshold must be finite and >= 0, got {alpha}")
    return np.sign(zz) * np.maximum(np.abs(zz) - alpha, 0.0)
