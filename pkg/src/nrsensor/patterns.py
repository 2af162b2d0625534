"""Synthetic test images for resolution experiments."""

import numpy as np


def _check_dims(width, height):
    if width < 2 or height < 2 or width % 2 or height % 2:
        raise ValueError(f"image dimensions must be even and >= 2, got {width}x{height}")


def line_pattern(width: int, height: int, rel_freq: float) -> np.ndarray:
    """Vertical sinusoidal lines, 0.5 + 0.5*cos(2*pi*f*x).

    ``rel_freq`` is given in percent of the low-resolution sampling frequency;
    100 % equals 0.5 cycles per fine-grid pixel.
    """
    if not 0 < rel_freq <= 100:
        raise ValueError(f"relative frequency must be in (0, 100], got {rel_freq}")
    _check_dims(width, height)
    f = rel_freq / 100.0 * 0.5
    row = 0.5 + 0.5 * np.cos(2 * np.pi * f * np.arange(width))
    return np.repeat(row[None, :], height, axis=0)


def zoneplate(width: int, height: int) -> np.ndarray:
    """Rotation-symmetric chirp reaching 0.5 cycles/pixel at radius max(X, Y)/2."""
    _check_dims(width, height)
    R = max(width, height) / 2
    # pixel (width/2, height/2) is the center so r = 0 lands on a sample
    y, x = np.mgrid[:height, :width]
    r2 = (x - width / 2) ** 2 + (y - height / 2) ** 2
    return 0.5 + 0.5 * np.cos(np.pi * r2 / (2 * R))


def constant(width: int, height: int, value: float) -> np.ndarray:
    if not 0.0 <= value <= 1.0:
        raise ValueError("value must lie in [0, 1]")
    return np.full((height, width), float(value))
