import numpy as np
import pytest

from palmcs import (
    GrayImage,
    NoiseKind,
    NoiseSpec,
    add_gaussian,
    add_salt_pepper,
    add_speckle,
    apply_noise,
)


def interior_image(seed, lo=64, hi=192, shape=(256, 256)):
    rng = np.random.Generator(np.random.PCG64(seed))
    return GrayImage(rng.integers(lo, hi + 1, size=shape, dtype=np.uint8))


def test_spec_validation():
    with pytest.raises(ValueError, match="level"):
        NoiseSpec(kind=NoiseKind.GAUSSIAN, level=0.0, seed=0)
    with pytest.raises(ValueError, match="level"):
        NoiseSpec(kind="speckle", level=1.5, seed=0)
    spec = NoiseSpec(kind="salt_pepper", level=0.2, seed=3)
    assert spec.kind is NoiseKind.SALT_PEPPER
    assert spec.level_percent == pytest.approx(20.0)


@pytest.mark.parametrize("fn", [add_gaussian, add_salt_pepper, add_speckle])
def test_zero_level_is_identity(fn):
    img = interior_image(0, shape=(12, 9))
    assert fn(img, 0.0, seed=5) == img


@pytest.mark.parametrize("fn", [add_gaussian, add_salt_pepper, add_speckle])
def test_determinism_and_bounds(fn):
    img = interior_image(1, lo=0, hi=255, shape=(32, 32))
    a = fn(img, 0.2, seed=9)
    b = fn(img, 0.2, seed=9)
    assert a == b
    assert a != fn(img, 0.2, seed=10) or fn is add_salt_pepper
    assert a.pixels.min() >= 0 and a.pixels.max() <= 255


def test_gaussian_standard_deviation_matches_model():
    img = interior_image(2)
    out = add_gaussian(img, 0.20, seed=0)
    delta = out.to_float() - img.to_float()
    measured = float(np.std(delta, ddof=1))
    assert measured == pytest.approx(51.0, rel=0.05)


def test_salt_pepper_exact_count_and_values():
    img = interior_image(3)  # interior pixels, so every hit is a change
    out = add_salt_pepper(img, 0.20, seed=1)
    changed = out.pixels != img.pixels
    assert int(changed.sum()) == round(0.20 * 256 * 256) == 13107
    assert set(np.unique(out.pixels[changed]).tolist()) <= {0, 255}
    assert np.array_equal(out.pixels[~changed], img.pixels[~changed])


def test_salt_pepper_full_corruption():
    img = interior_image(4, shape=(16, 16))
    out = add_salt_pepper(img, 1.0, seed=2)
    assert set(np.unique(out.pixels).tolist()) <= {0, 255}


def test_salt_pepper_rejects_bad_level():
    img = interior_image(5, shape=(4, 4))
    with pytest.raises(ValueError):
        add_salt_pepper(img, 1.2, seed=0)


def test_speckle_is_silent_on_black_image():
    img = GrayImage(np.zeros((20, 20), dtype=np.uint8))
    assert add_speckle(img, 0.5, seed=7) == img


def test_speckle_variance_matches_model():
    img = GrayImage(np.full((256, 256), 128, dtype=np.uint8))
    out = add_speckle(img, 0.05, seed=0)
    ratio = out.to_float() / 128.0 - 1.0
    assert float(np.var(ratio, ddof=1)) == pytest.approx(0.05, rel=0.10)


def test_apply_noise_dispatch():
    img = interior_image(6, shape=(10, 10))
    spec = NoiseSpec(kind=NoiseKind.SALT_PEPPER, level=0.5, seed=11)
    assert apply_noise(img, spec) == add_salt_pepper(img, 0.5, 11)
    spec = NoiseSpec(kind=NoiseKind.GAUSSIAN, level=0.1, seed=11)
    assert apply_noise(img, spec) == add_gaussian(img, 0.1, 11)
    spec = NoiseSpec(kind=NoiseKind.SPECKLE, level=0.1, seed=11)
    assert apply_noise(img, spec) == add_speckle(img, 0.1, 11)
