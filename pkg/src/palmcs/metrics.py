"""Reconstruction quality metrics: RMSE, PSNR, and wall-clock timing.

PSNR uses the 8-bit peak 255 throughout: ``psnr = 20 log10(255 / rmse)``.
RMSE is computed in floating point before any quantization, so scoring a
float-valued reconstruction and saving its rounded image are independent.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .pgm import GrayImage


@dataclass(frozen=True)
class QualityReport:
    """PSNR (dB), RMSE (8-bit pixel units), and elapsed solver seconds."""

    psnr_db: float
    rmse: float
    elapsed_seconds: float


def _as_float(image_or_array, name: str) -> np.ndarray:
    if isinstance(image_or_array, GrayImage):
        return image_or_array.to_float()
    arr = np.asarray(image_or_array, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 2-D array, got {arr.shape}")
    return arr


def rmse(reference, candidate) -> float:
    """Root-mean-square pixel error between two same-shaped images."""
    ref = _as_float(reference, "reference")
    cand = _as_float(candidate, "candidate")
    if ref.shape != cand.shape:
        raise ValueError(
            f"image dimensions differ: reference {ref.shape}, candidate {cand.shape}"
        )
    diff = ref - cand
    return float(np.sqrt(np.mean(diff * diff)))


def psnr_from_rmse(value: float) -> float:
    """20 log10(255 / rmse); rmse = 0 maps to the +inf sentinel."""
    if value < 0 or not np.isfinite(value):
        raise ValueError(f"rmse must be finite and >= 0, got {value}")
    if value == 0:
        return math.inf
    return 20.0 * math.log10(255.0 / value)


def quality(reference, candidate, elapsed_seconds: float = 0.0) -> QualityReport:
    """Score a candidate against a reference and bundle the timing."""
    err = rmse(reference, candidate)
    return QualityReport(
        psnr_db=psnr_from_rmse(err), rmse=err, elapsed_seconds=elapsed_seconds
    )


def time_block(work: Callable[[], object]) -> float:
    """Run ``work()`` and return its monotonic wall-clock duration in seconds."""
    start = time.perf_counter()
    work()
    return time.perf_counter() - start
