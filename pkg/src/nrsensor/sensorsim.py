"""Sensor layouts, pattern generation and acquisition with optional noise.

Non-regular patterns draw one quadrant per sensor pixel from PCG64 (O'Neill
2014, the numpy ``PCG64`` bit generator): each sensor pixel, in row-major
order, consumes one raw 64-bit output and uses its two most significant bits
as the code.  Raw PCG64 output is stable across numpy releases, so patterns
are reproducible; they can still be persisted as NSP1 files.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .imagecore import DISCARDED, KEPT, QUADRANT_OFFSETS, QuadrantPattern, as_image


class Layout(enum.Enum):
    LARGE_PIXEL = "large"
    QUARTER_NONREG = "1q-nonreg"
    THREE_QUARTER_REG = "3q-reg"
    THREE_QUARTER_NONREG = "3q-nonreg"

    @property
    def fill(self) -> float:
        """Light-sensitive fraction of the pixel area."""
        return {
            Layout.LARGE_PIXEL: 1.0,
            Layout.QUARTER_NONREG: 0.25,
            Layout.THREE_QUARTER_REG: 0.75,
            Layout.THREE_QUARTER_NONREG: 0.75,
        }[self]

    @classmethod
    def parse(cls, name: str) -> "Layout":
        aliases = {
            "lp": cls.LARGE_PIXEL,
            "large-pixel": cls.LARGE_PIXEL,
            "1/4-nonreg": cls.QUARTER_NONREG,
            "3/4-reg": cls.THREE_QUARTER_REG,
            "3/4-nonreg": cls.THREE_QUARTER_NONREG,
        }
        key = name.strip().lower()
        if key in aliases:
            return aliases[key]
        for layout in cls:
            if layout.value == key or layout.name.lower() == key:
                return layout
        raise ValueError(f"unknown layout {name!r}")


@dataclass(frozen=True)
class NoiseParams:
    full_well: float = 10000.0  # electrons
    readout_sigma: float = 25.0  # electrons
    enabled: bool = True

    def __post_init__(self):
        if not self.full_well > 0:
            raise ValueError("full_well must be positive")
        if self.readout_sigma < 0:
            raise ValueError("readout_sigma must be non-negative")


def pcg64_codes(width: int, height: int, seed: int) -> np.ndarray:
    """Uniform i.i.d. quadrant codes from the top two bits of raw PCG64 words."""
    bitgen = np.random.PCG64(seed)
    raw = bitgen.random_raw(width * height)
    return (raw >> np.uint64(62)).astype(np.uint8).reshape(height, width)


def generate_pattern(layout: Layout, width: int, height: int, seed: int = 0) -> QuadrantPattern:
    """Quadrant pattern for a sensor of ``width`` x ``height`` pixels."""
    if width < 1 or height < 1:
        raise ValueError(f"pattern dimensions must be positive, got {width}x{height}")
    if layout is Layout.LARGE_PIXEL:
        return QuadrantPattern(np.zeros((height, width), np.uint8), DISCARDED)
    if layout is Layout.THREE_QUARTER_REG:
        return QuadrantPattern(np.full((height, width), 3, np.uint8), DISCARDED)
    codes = pcg64_codes(width, height, seed)
    meaning = KEPT if layout is Layout.QUARTER_NONREG else DISCARDED
    return QuadrantPattern(codes, meaning)


def quadrant_stack(image: np.ndarray) -> np.ndarray:
    """Split a fine-grid image into its four quadrant planes, shape (4, Y/2, X/2)."""
    return np.stack([image[dy::2, dx::2] for dx, dy in QUADRANT_OFFSETS])


def acquire(hires, pattern: QuadrantPattern, layout: Layout) -> np.ndarray:
    """Noiseless sensor output: mean of the sensitive quadrants of every pixel."""
    img = as_image(hires)
    if img.shape != (2 * pattern.height, 2 * pattern.width):
        raise ValueError(
            f"image shape {img.shape} does not match pattern "
            f"{pattern.height}x{pattern.width} (expected twice the pattern size)")
    quads = quadrant_stack(img)
    if layout is Layout.LARGE_PIXEL:
        return quads.mean(axis=0)
    codes = pattern.codes
    picked = np.take_along_axis(quads, codes[None].astype(np.intp), axis=0)[0]
    if layout is Layout.QUARTER_NONREG:
        if pattern.meaning != KEPT:
            raise ValueError("quarter sampling needs a KEPT-meaning pattern")
        return picked.copy()
    if pattern.meaning != DISCARDED:
        raise ValueError("three-quarter sampling needs a DISCARDED-meaning pattern")
    # sum the three kept quadrants explicitly; (total - picked) would round differently
    keep = np.arange(4)[:, None, None] != codes[None]
    return np.where(keep, quads, 0.0).sum(axis=0) / 3.0


def apply_noise(sensor, layout: Layout, params: NoiseParams, seed: int = 0) -> np.ndarray:
    """Poisson shot noise plus Gaussian readout noise, renormalized and clamped.

    Electrons are counted against ``full_well * fill``, so a pixel with a
    smaller sensitive area sees proportionally more shot noise.
    """
    img = as_image(sensor)
    if not params.enabled:
        return img.copy()
    scale = params.full_well * layout.fill
    rng = np.random.Generator(np.random.PCG64(seed))
    lam = np.clip(img, 0.0, None) * scale
    electrons = rng.poisson(lam).astype(np.float64)
    if params.readout_sigma > 0:
        electrons += rng.normal(0.0, params.readout_sigma, size=img.shape)
    return np.clip(electrons / scale, 0.0, 1.0)
