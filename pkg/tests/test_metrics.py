import math
import time

import numpy as np
import pytest

from palmcs import GrayImage, psnr_from_rmse, quality, rmse, time_block


def seeded_image(seed, h=32, w=32):
    rng = np.random.Generator(np.random.PCG64(seed))
    return GrayImage(rng.integers(0, 256, size=(h, w), dtype=np.uint8))


def test_identical_images_have_zero_error():
    img = seeded_image(0)
    assert rmse(img, img) == 0.0


def test_maximal_constant_error():
    black = GrayImage(np.zeros((8, 8), dtype=np.uint8))
    white = GrayImage(np.full((8, 8), 255, dtype=np.uint8))
    assert rmse(black, white) == 255.0


def test_matches_two_pass_accumulation_oracle():
    a = seeded_image(1)
    b = seeded_image(2)
    diffs = [
        float(a.pixels[i, j]) - float(b.pixels[i, j])
        for i in range(a.height)
        for j in range(a.width)
    ]
    total = 0.0
    for d in diffs:
        total += d * d
    oracle = math.sqrt(total / len(diffs))
    assert rmse(a, b) == pytest.approx(oracle, abs=1e-9)


def test_rmse_is_symmetric_and_detects_unit_shift():
    base = np.random.Generator(np.random.PCG64(3)).uniform(10, 200, size=(16, 16))
    shifted = base + 1.0  # float images, no clamping involved
    assert rmse(base, shifted) == pytest.approx(1.0, abs=1e-12)
    assert rmse(shifted, base) == rmse(base, shifted)


def test_rmse_rejects_mismatched_shapes():
    with pytest.raises(ValueError, match="dimensions differ"):
        rmse(seeded_image(0, 4, 4), seeded_image(0, 4, 5))


@pytest.mark.parametrize(
    "expected_psnr,given_rmse",
    [(17.8557, 32.6403), (15.721, 41.734), (11.2182, 70.0861)],
)
def test_psnr_reference_pairs(expected_psnr, given_rmse):
    assert psnr_from_rmse(given_rmse) == pytest.approx(expected_psnr, abs=1e-3)


def test_psnr_zero_rmse_gives_infinite_sentinel():
    assert psnr_from_rmse(0.0) == math.inf


def test_psnr_rejects_bad_input():
    with pytest.raises(ValueError):
        psnr_from_rmse(-1.0)
    with pytest.raises(ValueError):
        psnr_from_rmse(math.nan)


def test_psnr_strictly_decreasing_in_rmse():
    values = [psnr_from_rmse(r) for r in (0.5, 1.0, 10.0, 100.0, 255.0)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_quality_bundles_the_relationship():
    report = quality(seeded_image(4), seeded_image(5), elapsed_seconds=1.5)
    assert report.psnr_db == pytest.approx(psnr_from_rmse(report.rmse))
    assert report.elapsed_seconds == 1.5


def test_time_block_empty_work_is_fast():
    assert 0.0 <= time_block(lambda: None) < 0.01


def test_time_block_bounds_a_sleep():
    elapsed = time_block(lambda: time.sleep(0.1))
    assert 0.1 <= elapsed <= 0.5


def test_nested_timings_sum_within_outer():
    inner = []

    def work():
        inner.append(time_block(lambda: time.sleep(0.02)))
        inner.append(time_block(lambda: time.sleep(0.02)))

    outer = time_block(work)
    assert sum(inner) <= outer * 1.1
