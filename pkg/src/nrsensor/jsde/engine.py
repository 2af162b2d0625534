"""Block-wise reconstruction of a full image.

Blocks are visited in linescan order and grouped by the geometry of their
reconstruction area; each group is cut into fixed chunks of
:data:`CHUNK` blocks, in linescan order.  Chunks are independent, so running
them on several threads, or in any order, gives bitwise identical images.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..imagecore import DISCARDED, QUADRANT_OFFSETS, QuadrantPattern, as_image
from . import kernel
from .operators import JsdeParams, area_bounds, block_center, distance_map, prior_map

log = logging.getLogger(__name__)

CHUNK = 256
ALGORITHMS = ("jsde", "mp")


def block_layout(X: int, Y: int, params: JsdeParams):
    """Yield (bx, by, bw, bh, x0, x1, y0, y1) for every block in linescan order."""
    B = params.block_size
    for by in range(0, Y, B):
        bh = min(B, Y - by)
        y0, y1 = area_bounds(by, bh, params.border, Y)
        for bx in range(0, X, B):
            bw = min(B, X - bx)
            x0, x1 = area_bounds(bx, bw, params.border, X)
            yield bx, by, bw, bh, x0, x1, y0, y1


def _run_chunk(out, sensor, codes, blocks, base_w, prior, iterations, gamma):
    M = blocks[0][5] - blocks[0][4]
    N = blocks[0][7] - blocks[0][6]
    s = np.stack([sensor[y0 // 2:y1 // 2, x0 // 2:x1 // 2]
                  for _, _, _, _, x0, x1, y0, y1 in blocks])
    c = np.stack([codes[y0 // 2:y1 // 2, x0 // 2:x1 // 2]
                  for _, _, _, _, x0, x1, y0, y1 in blocks])
    w = np.where(sensitive_mask_batch(c), base_w, 0.0)
    res = kernel.pursue(s, c, w, prior, iterations, gamma)
    bx, by, bw, bh, x0, _, y0, _ = blocks[0]
    rows = slice(by - y0, by - y0 + bh)
    cols = slice(bx - x0, bx - x0 + bw)
    g = kernel.synthesize(res.indices, res.updates, M, N, rows, cols).real
    for i, (bx, by, bw, bh, *_rest) in enumerate(blocks):
        if res.fallback[i]:
            # pixel enlargement of the block's own sensor values
            sv = sensor[by // 2:(by + bh) // 2, bx // 2:(bx + bw) // 2]
            out[by:by + bh, bx:bx + bw] = np.repeat(np.repeat(sv, 2, 0), 2, 1)
        else:
            out[by:by + bh, bx:bx + bw] = g[i]


def sensitive_mask_batch(codes: np.ndarray) -> np.ndarray:
    nb, gn, gm = codes.shape
    out = np.empty((nb, 2 * gn, 2 * gm), dtype=bool)
    for code, (dx, dy) in enumerate(QUADRANT_OFFSETS):
        out[:, dy::2, dx::2] = codes != code
    return out


def reconstruct(sensor, pattern: QuadrantPattern, params: JsdeParams = JsdeParams(),
                algo: str = "jsde", workers: int = 1, clip: bool = True) -> np.ndarray:
    """Reconstruct the fine-grid image from three-quarter sensor output.

    ``algo="mp"`` runs plain matching pursuit on the same areas and atoms:
    0/1 weights, no frequency prior and full projection steps.
    """
    sensor = as_image(sensor)
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}")
    if pattern.meaning != DISCARDED:
        raise ValueError("reconstruction needs a three-quarter (DISCARDED) pattern")
    if sensor.shape != pattern.codes.shape:
        raise ValueError(f"sensor shape {sensor.shape} does not match pattern {pattern.codes.shape}")
    Yg, Xg = sensor.shape
    X, Y = 2 * Xg, 2 * Yg
    codes = pattern.codes
    out = np.zeros((Y, X))

    groups = defaultdict(list)
    for blk in block_layout(X, Y, params):
        bx, by, bw, bh, x0, x1, y0, y1 = blk
        groups[(x1 - x0, y1 - y0, bx - x0, by - y0, bw, bh)].append(blk)

    gamma = 1.0 if algo == "mp" else params.gamma
    tasks = []
    for (M, N, ox, oy, bw, bh), blocks in groups.items():
        if algo == "mp":
            base_w = np.ones((N, M))
            prior = np.ones((N, M))
        else:
            center = block_center((0, 0), (ox, oy), (bw, bh))
            base_w = params.rho ** distance_map(M, N, center)
            prior = prior_map(M, N)
        for i in range(0, len(blocks), CHUNK):
            tasks.append((blocks[i:i + CHUNK], base_w, prior))

    def run(task):
        blocks, base_w, prior = task
        _run_chunk(out, sensor, codes, blocks, base_w, prior, params.iterations, gamma)

    if params.iterations == 0:
        return out
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, tasks))
    else:
        for task in tasks:
            run(task)
    return np.clip(out, 0.0, 1.0) if clip else out
