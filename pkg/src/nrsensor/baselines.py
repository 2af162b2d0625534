"""Reference reconstructions: pixel enlargement and bicubic upsampling."""

import numpy as np

from .imagecore import as_image


def pixel_enlargement(sensor) -> np.ndarray:
    """Copy every sensor value to its 2x2 group."""
    s = as_image(sensor)
    return np.repeat(np.repeat(s, 2, axis=0), 2, axis=1)


def cubic_kernel(t, a: float = -0.5) -> np.ndarray:
    t = np.abs(np.asarray(t, dtype=np.float64))
    t2, t3 = t * t, t * t * t
    near = (a + 2) * t3 - (a + 3) * t2 + 1
    far = a * t3 - 5 * a * t2 + 8 * a * t - 4 * a
    return np.where(t <= 1, near, np.where(t < 2, far, 0.0))


def _upsample_axis(s: np.ndarray, axis: int, a: float) -> np.ndarray:
    n = s.shape[axis]
    # fine-grid sample j sits at low-res coordinate (j - 0.5) / 2
    pos = (np.arange(2 * n) - 0.5) / 2.0
    base = np.floor(pos).astype(int)
    out = 0.0
    for tap in range(-1, 3):
        idx = base + tap
        wgt = cubic_kernel(pos - idx, a)
        vals = np.take(s, np.clip(idx, 0, n - 1), axis=axis)
        shape = [1] * s.ndim
        shape[axis] = 2 * n
        out = out + vals * wgt.reshape(shape)
    return out


def bicubic_x2(sensor, a: float = -0.5, clip: bool = True) -> np.ndarray:
    """Separable cubic-convolution upsampling by two with half-pixel phase.

    Each low-resolution sample is centered on its 2x2 group; borders replicate
    the edge samples.
    """
    s = as_image(sensor)
    out = _upsample_axis(_upsample_axis(s, 0, a), 1, a)
    return np.clip(out, 0.0, 1.0) if clip else out
