import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from nrsensor.baselines import pixel_enlargement
from nrsensor.imagecore import KEPT, QuadrantPattern
from nrsensor.jsde import JsdeParams, jsde_model, make_context, reconstruct
from nrsensor.jsde import engine
from nrsensor.metrics import psnr
from nrsensor.sensorsim import Layout, acquire, generate_pattern

NONREG = Layout.THREE_QUARTER_NONREG


def sample(img, seed=0, layout=NONREG):
    Y, X = img.shape
    pat = generate_pattern(layout, X // 2, Y // 2, seed)
    return acquire(img, pat, layout), pat


def smooth_image(seed, shape=(64, 64)):
    img = gaussian_filter(np.random.default_rng(seed).random(shape), 1.2)
    return (img - img.min()) / (img.max() - img.min())


@pytest.mark.parametrize("value", [0.0, 0.37, 1.0])
@pytest.mark.parametrize("shape", [(40, 40), (30, 22)])
def test_constant_image_exact(value, shape):
    img = np.full(shape, value)
    s, pat = sample(img, seed=4)
    out = reconstruct(s, pat)
    assert out.shape == shape
    assert np.abs(out - value).max() <= 1e-6


@pytest.mark.parametrize("fx,fy", [(0.1, 0.0), (0.07, 0.05), (0.2, 0.0), (0.0, 0.22)])
def test_sub_nyquist_cosine(fx, fy):
    y, x = np.mgrid[0:96, 0:96]
    img = 0.5 + 0.3 * np.cos(2 * np.pi * (fx * x + fy * y) + 0.4)
    s, pat = sample(img, seed=3)
    assert psnr(img, reconstruct(s, pat)) >= 40.0


def test_single_block_equals_image_block():
    img = smooth_image(5, (64, 48))
    s, pat = sample(img, seed=3)
    p = JsdeParams(iterations=30)
    out = reconstruct(s, pat, p, clip=False)
    for bx, by in [(0, 0), (20, 28), (44, 60), (24, 0)]:
        ctx = make_context(s, pat.codes, bx, by, p)
        blk = jsde_model(ctx, p).image()[ctx.block_slice].real
        np.testing.assert_array_equal(blk, out[by:by + 4, bx:bx + 4])


def test_deterministic_across_workers_and_chunks(monkeypatch):
    img = smooth_image(2, (72, 56))
    s, pat = sample(img, seed=9)
    p = JsdeParams(iterations=20)
    ref = reconstruct(s, pat, p)
    assert np.array_equal(ref, reconstruct(s, pat, p))
    assert np.array_equal(ref, reconstruct(s, pat, p, workers=4))
    monkeypatch.setattr(engine, "CHUNK", 7)
    assert np.array_equal(ref, reconstruct(s, pat, p, workers=3))


def test_beats_pixel_enlargement_and_plain_pursuit():
    for seed in range(2):
        img = smooth_image(seed, (96, 96))
        s, pat = sample(img, seed=seed)
        jsde = psnr(img, reconstruct(s, pat))
        assert jsde > psnr(img, pixel_enlargement(s)) + 3.0
        assert jsde > psnr(img, reconstruct(s, pat, algo="mp"))


def test_zero_iterations_gives_zero_image():
    s, pat = sample(np.full((16, 16), 0.5))
    assert np.all(reconstruct(s, pat, JsdeParams(iterations=0)) == 0)


def test_output_clipped():
    img = np.zeros((32, 32))
    img[::2] = 1.0
    s, pat = sample(img, seed=2)
    out = reconstruct(s, pat, JsdeParams(iterations=40))
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_regular_layout_runs():
    img = smooth_image(1, (32, 32))
    s, pat = sample(img, layout=Layout.THREE_QUARTER_REG)
    assert psnr(img, reconstruct(s, pat)) > 20


def test_rejects_bad_inputs():
    s, pat = sample(np.full((16, 16), 0.5))
    with pytest.raises(ValueError):
        reconstruct(s, QuadrantPattern(pat.codes, KEPT))
    with pytest.raises(ValueError):
        reconstruct(s[:4], pat)
    with pytest.raises(ValueError):
        reconstruct(s, pat, algo="omp")


def test_block_layout_covers_image():
    p = JsdeParams()
    cover = np.zeros((30, 22), int)
    for bx, by, bw, bh, x0, x1, y0, y1 in engine.block_layout(22, 30, p):
        cover[by:by + bh, bx:bx + bw] += 1
        assert x0 <= bx and bx + bw <= x1 and y0 <= by and by + bh <= y1
        assert x0 % 2 == 0 and x1 % 2 == 0 and y0 % 2 == 0 and y1 % 2 == 0
    assert np.all(cover == 1)
