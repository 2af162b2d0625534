"""Image quality and resolution measurements."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .imagecore import as_image


def _same_shape(a, b):
    a, b = as_image(a), as_image(b)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(a, b, peak: float = 1.0) -> float:
    """PSNR in dB; identical images give ``math.inf``."""
    a, b = _same_shape(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2
    g = np.exp(-x ** 2 / (2 * sigma ** 2))
    return g / g.sum()


def ssim(a, b, data_range: float = 1.0, win_size: int = 11, sigma: float = 1.5,
         k1: float = 0.01, k2: float = 0.03) -> float:
    """Mean SSIM with a Gaussian window, averaged over the valid region only."""
    a, b = _same_shape(a, b)
    if min(a.shape) < win_size:
        raise ValueError(f"SSIM needs images of at least {win_size}x{win_size}")
    g = gaussian_window(win_size, sigma)
    pad = win_size // 2

    def blur(img):
        out = correlate1d(img, g, axis=0, mode="constant")
        out = correlate1d(out, g, axis=1, mode="constant")
        return out[pad:img.shape[0] - pad, pad:img.shape[1] - pad]

    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2
    mu_a, mu_b = blur(a), blur(b)
    # the products are blurred in the same order for both argument orders
    saa, sbb, sab = blur(a * a), blur(b * b), blur(a * b)
    va = saa - mu_a * mu_a
    vb = sbb - mu_b * mu_b
    cov = sab - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2)
    return float(np.mean(num / den))


@dataclass(frozen=True)
class MtfPoint:
    rel_freq: float
    contrast: float
    imax: float
    imin: float


def contrast(region, margin: int = 0, profile_axis: int | None = None) -> tuple[float, float, float]:
    """Michelson contrast (C, I_max, I_min) after dropping ``margin`` pixels per side.

    With ``profile_axis`` set, the region is first averaged along that axis
    and the extremes are taken over the resulting profile.
    """
    img = as_image(region)
    if img.size == 0:
        raise ValueError("empty region")
    if margin:
        img = img[margin:-margin, margin:-margin]
    if img.size == 0:
        raise ValueError("region is empty after removing the border margin")
    if profile_axis is not None:
        img = img.mean(axis=profile_axis)
    imax, imin = float(img.max()), float(img.min())
    total = imax + imin
    c = (imax - imin) / total if total > 0 else 0.0
    return c, imax, imin


DEFAULT_MTF_FREQUENCIES = (2, 10, 26, 42, 58, 74, 90, 98)


def mtf_sweep(layout, algo: str, frequencies=DEFAULT_MTF_FREQUENCIES, seed: int = 0,
              dims: tuple[int, int] = (512, 512), params=None, margin: int | None = None,
              workers: int = 1) -> list[MtfPoint]:
    """Contrast of reconstructed vertical line patterns over a frequency list.

    The evaluation region drops ``block_size + border`` pixels on every side
    unless ``margin`` is given.  Contrast is read from the column profile
    averaged along the lines, so isolated per-pixel outliers of a
    non-regular sampling do not count as modulation.
    """
    from .jsde import JsdeParams
    from .patterns import line_pattern
    from .pipeline import simulate
    from .sensorsim import generate_pattern

    params = JsdeParams() if params is None else params
    margin = params.block_size + params.border if margin is None else margin
    X, Y = dims
    pattern = generate_pattern(layout, X // 2, Y // 2, seed)
    points = []
    for f in frequencies:
        if not 0 < f <= 100:
            raise ValueError(f"relative frequency must be in (0, 100], got {f}")
        rec = simulate(line_pattern(X, Y, f), layout, algo, params=params,
                       pattern=pattern, workers=workers)
        c, imax, imin = contrast(rec, margin, profile_axis=0)
        points.append(MtfPoint(float(f), c, imax, imin))
    return points
