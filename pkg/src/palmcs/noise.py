"""Pixel-domain corruption models for the reconstruction experiments.

The ``level`` argument is a fraction in (0, 1] (a table's "percent of
error" divided by 100). Its meaning per model follows the prevailing
image-toolkit conventions, and absolute PSNR numbers depend directly on
this interpretation:

* gaussian    - additive zero-mean noise with std = level * 255;
* salt_pepper - exactly ``round(level * pixel_count)`` distinct pixels
  forced to 0 or 255 with equal probability;
* speckle     - multiplicative ``pixel * (1 + n)`` with n zero-mean
  Gaussian of variance = level.

All outputs are rounded to integers and clamped to [0, 255]. Randomness
uses PCG64 seeded per call, so identical (image, spec) inputs give
identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .pgm import GrayImage


class NoiseKind(str, Enum):
    GAUSSIAN = "gaussian"
    SALT_PEPPER = "salt_pepper"
    SPECKLE = "speckle"


@dataclass(frozen=True)
class NoiseSpec:
    """One corruption cell: model, intensity fraction, seed."""

    kind: NoiseKind
    level: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not 0 < self.level <= 1:
            raise ValueError(f"noise level must lie in (0, 1], got {self.level}")

    @property
    def level_percent(self) -> float:
        return 100.0 * self.level


def _finish(values: np.ndarray) -> GrayImage:
    return GrayImage(np.clip(np.rint(values), 0, 255).astype(np.uint8))


def add_gaussian(img: GrayImage, level: float, seed: int) -> GrayImage:
    """Additive Gaussian noise with standard deviation level * 255."""
    if level < 0:
        raise ValueError(f"level must be >= 0, got {level}")
    if level == 0:
        return img
    rng = np.random.Generator(np.random.PCG64(seed))
    noise = rng.normal(0.0, level * 255.0, size=img.pixels.shape)
    return _finish(img.to_float() + noise)


def add_salt_pepper(img: GrayImage, level: float, seed: int) -> GrayImage:
    """Force round(level * pixels) seeded distinct pixels to 0 or 255."""
    if not 0 <= level <= 1:
        raise ValueError(f"level must lie in [0, 1], got {level}")
    count = int(round(level * img.width * img.height))
    if count == 0:
        return img
    rng = np.random.Generator(np.random.PCG64(seed))
    chosen = rng.permutation(img.width * img.height)[:count]
    values = rng.integers(0, 2, size=count) * 255
    flat = img.to_float().ravel(order="C")
    flat[chosen] = values
    return _finish(flat.reshape(img.pixels.shape))


def add_speckle(img: GrayImage, level: float, seed: int) -> GrayImage:
    """Multiplicative noise pixel * (1 + n), n Gaussian with variance level."""
    if level < 0:
        raise ValueError(f"level must be >= 0, got {level}")
    if level == 0:
        return img
    rng = np.random.Generator(np.random.PCG64(seed))
    noise = rng.normal(0.0, np.sqrt(level), size=img.pixels.shape)
    return _finish(img.to_float() * (1.0 + noise))


def apply_noise(img: GrayImage, spec: NoiseSpec) -> GrayImage:
    """Dispatch on the spec's kind."""
    if spec.kind is NoiseKind.GAUSSIAN:
        return add_gaussian(img, spec.level, spec.seed)
    if spec.kind is NoiseKind.SALT_PEPPER:
        return add_salt_pepper(img, spec.level, spec.seed)
    return add_speckle(img, spec.level, spec.seed)
