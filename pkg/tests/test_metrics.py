import math

import numpy as np
import pytest
from skimage.metrics import structural_similarity

from nrsensor.metrics import contrast, mtf_sweep, psnr, ssim
from nrsensor.sensorsim import Layout


def test_psnr_examples():
    a = np.zeros((4, 4))
    assert psnr(a, a) == math.inf
    assert psnr(a, np.full((4, 4), 0.1)) == pytest.approx(20.0)
    assert psnr(a, np.full((4, 4), 0.5), peak=0.5) == pytest.approx(0.0)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        psnr(np.zeros((4, 4)), np.zeros((4, 5)))


def test_ssim_matches_skimage(rng):
    for _ in range(5):
        a = rng.random((40, 50))
        b = np.clip(a + 0.1 * rng.normal(size=a.shape), 0, 1)
        ref = structural_similarity(a, b, data_range=1.0, gaussian_weights=True, sigma=1.5,
                                    use_sample_covariance=False)
        assert ssim(a, b) == pytest.approx(ref, abs=1e-12)


def test_ssim_identity_and_symmetry(rng):
    a, b = rng.random((20, 20)), rng.random((20, 20))
    assert ssim(a, a) == 1.0
    assert ssim(a, b) == ssim(b, a)
    assert ssim(a, b) < 0.5
    with pytest.raises(ValueError):
        ssim(np.zeros((8, 8)), np.zeros((8, 8)))


def test_contrast_examples():
    c, imax, imin = contrast(np.array([[0.75, 0.25], [0.25, 0.75]]))
    assert (c, imax, imin) == (0.5, 0.75, 0.25)
    assert contrast(np.zeros((3, 3)))[0] == 0.0
    img = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert contrast(img)[0] == 1.0
    assert contrast(img, profile_axis=0)[0] == 0.0


def test_contrast_margin():
    img = np.full((6, 6), 0.5)
    img[0, 0] = 1.0
    assert contrast(img, margin=1)[0] == 0.0
    with pytest.raises(ValueError):
        contrast(img, margin=3)


def test_mtf_sweep_small():
    pts = mtf_sweep(Layout.LARGE_PIXEL, "pe", frequencies=(10, 98), dims=(64, 64))
    assert [p.rel_freq for p in pts] == [10.0, 98.0]
    assert pts[0].contrast > 0.9
    assert pts[1].contrast < 0.1
    with pytest.raises(ValueError):
        mtf_sweep(Layout.LARGE_PIXEL, "pe", frequencies=(120,), dims=(64, 64))
