"""Acquisition -> reconstruction chains shared by the CLI and the experiments."""

from __future__ import annotations

import numpy as np

from .baselines import bicubic_x2, pixel_enlargement
from .imagecore import QuadrantPattern, as_image
from .jsde import JsdeParams, reconstruct
from .sensorsim import Layout, NoiseParams, acquire, apply_noise, generate_pattern

ALGORITHMS = ("jsde", "mp", "pe", "bicubic")


def reconstruct_any(sensor, algo: str, pattern: QuadrantPattern | None = None,
                    params: JsdeParams = JsdeParams(), workers: int = 1) -> np.ndarray:
    if algo == "pe":
        return pixel_enlargement(sensor)
    if algo == "bicubic":
        return bicubic_x2(sensor)
    if algo in ("jsde", "mp"):
        if pattern is None:
            raise ValueError(f"{algo} needs the sampling pattern")
        return reconstruct(sensor, pattern, params, algo=algo, workers=workers)
    raise ValueError(f"unknown algorithm {algo!r}")


def simulate(hires, layout: Layout, algo: str, seed: int = 0,
             params: JsdeParams = JsdeParams(), noise: NoiseParams | None = None,
             noise_seed: int = 0, pattern: QuadrantPattern | None = None,
             workers: int = 1) -> np.ndarray:
    """Sample ``hires`` with ``layout`` and reconstruct it with ``algo``."""
    img = as_image(hires)
    Y, X = img.shape
    if pattern is None:
        pattern = generate_pattern(layout, X // 2, Y // 2, seed)
    sensor = acquire(img, pattern, layout)
    if noise is not None and noise.enabled:
        sensor = apply_noise(sensor, layout, noise, noise_seed)
    return reconstruct_any(sensor, algo, pattern, params, workers)
