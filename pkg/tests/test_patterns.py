import numpy as np
import pytest

from nrsensor.patterns import constant, line_pattern, zoneplate


def test_line_pattern_nyquist_alternates():
    img = line_pattern(8, 4, 100)
    np.testing.assert_allclose(img[0], [1, 0, 1, 0, 1, 0, 1, 0], atol=1e-12)
    assert np.all(img == img[0])


def test_line_pattern_period():
    # 50 % of the low-res sampling frequency: one cycle every 4 fine pixels
    img = line_pattern(16, 2, 50)
    np.testing.assert_allclose(img[0, :5], [1, 0.5, 0, 0.5, 1], atol=1e-12)


@pytest.mark.parametrize("f", [0, -3, 101])
def test_line_pattern_bad_frequency(f):
    with pytest.raises(ValueError):
        line_pattern(8, 8, f)


def test_zoneplate_values():
    z = zoneplate(64, 32)
    assert z.shape == (32, 64)
    assert z[16, 32] == pytest.approx(1.0)
    assert z.min() >= 0 and z.max() <= 1
    # local frequency r/(2R) reaches 0.5 cycles/pixel at r = R = 32
    assert z[16, 0] == pytest.approx(0.5 + 0.5 * np.cos(np.pi * 32 ** 2 / 64))


@pytest.mark.parametrize("w,h", [(7, 8), (8, 0), (1, 1)])
def test_bad_dims(w, h):
    with pytest.raises(ValueError):
        zoneplate(w, h)


def test_constant():
    np.testing.assert_array_equal(constant(4, 2, 0.25), np.full((2, 4), 0.25))
    with pytest.raises(ValueError):
        constant(4, 4, 1.5)
