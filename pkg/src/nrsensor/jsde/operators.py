"""Block geometry and the linear operators of the acquisition model.

Area arrays are indexed ``[n, m]`` (row = vertical coordinate), so a 2-D FFT
of an ``(N, M)`` array yields frequency ``(k2, k1)`` at flat position
``k = k1 + M * k2``.  Vectors of length ``M*N`` use the group scan order: 2x2
groups one after another, and inside each group the offsets
``(0,0), (1,0), (0,1), (1,1)`` in ``(m, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..imagecore import QUADRANT_OFFSETS


@dataclass(frozen=True)
class JsdeParams:
    block_size: int = 4
    border: int = 14
    iterations: int = 100
    rho: float = 0.7
    gamma: float = 0.5

    def __post_init__(self):
        if self.block_size < 2 or self.block_size % 2:
            raise ValueError("block_size must be even and >= 2")
        if self.border < 0 or self.border % 2:
            raise ValueError("border must be even and >= 0")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")


# -- scan order --------------------------------------------------------------

def scan_index(m: int, n: int, M: int, N: int) -> int:
    if not (0 <= m < M and 0 <= n < N):
        raise IndexError(f"({m}, {n}) outside {M}x{N} area")
    group = m // 2 + (M // 2) * (n // 2)
    return 4 * group + (m % 2) + 2 * (n % 2)


def scan_coords(index: int, M: int, N: int) -> tuple[int, int]:
    """Inverse of :func:`scan_index`."""
    if not 0 <= index < M * N:
        raise IndexError(f"index {index} outside {M}x{N} area")
    group, quad = divmod(index, 4)
    gm, gn = group % (M // 2), group // (M // 2)
    dx, dy = QUADRANT_OFFSETS[quad]
    return 2 * gm + dx, 2 * gn + dy


def to_scan(area: np.ndarray) -> np.ndarray:
    """(N, M) array -> length M*N vector in group scan order."""
    N, M = area.shape
    # axes: gn, dy, gm, dx -> gn, gm, dy, dx
    return area.reshape(N // 2, 2, M // 2, 2).transpose(0, 2, 1, 3).reshape(-1)


def from_scan(vec: np.ndarray, M: int, N: int) -> np.ndarray:
    return np.asarray(vec).reshape(N // 2, M // 2, 2, 2).transpose(0, 2, 1, 3).reshape(N, M)


# -- aggregation / distribution ----------------------------------------------

def keep_matrix(codes) -> np.ndarray:
    """Per group a length-4 row of ones with a zero at the discarded quadrant."""
    codes = np.asarray(codes, dtype=np.intp).reshape(-1)
    keep = np.ones((codes.size, 4))
    keep[np.arange(codes.size), codes] = 0.0
    return keep


def aggregate(values, codes) -> np.ndarray:
    """Apply A: average the three sensitive entries of every group.

    ``values`` is a scan-order vector, ``codes`` the discarded quadrant of each
    group in group order.
    """
    values = np.asarray(values)
    codes = np.asarray(codes).reshape(-1)
    if values.ndim != 1 or values.size != 4 * codes.size:
        raise ValueError(f"length mismatch: {values.size} values for {codes.size} groups")
    return (values.reshape(-1, 4) * keep_matrix(codes)).sum(axis=1) / 3.0


def distribute(values) -> np.ndarray:
    """Apply D: copy every group value to its four positions."""
    values = np.asarray(values)
    if values.ndim != 1:
        raise ValueError("distribute expects a vector")
    return np.repeat(values, 4)


def aggregation_matrix(codes) -> np.ndarray:
    """Dense A of shape (G, 4G); for oracles and small examples only."""
    keep = keep_matrix(codes)
    G = keep.shape[0]
    A = np.zeros((G, 4 * G))
    for g in range(G):
        A[g, 4 * g:4 * g + 4] = keep[g] / 3.0
    return A


def distribution_matrix(groups: int) -> np.ndarray:
    return np.kron(np.eye(groups), np.ones((4, 1)))


# -- basis and prior ---------------------------------------------------------

def basis_function(k: int, M: int, N: int) -> np.ndarray:
    """Fourier atom phi_k as a scan-order vector."""
    if not 0 <= k < M * N:
        raise IndexError(f"basis index {k} outside [0, {M * N})")
    k1, k2 = k % M, k // M
    m = np.arange(M)
    n = np.arange(N)
    ex = np.exp(2j * np.pi * ((k1 * m) % M) / M)
    ey = np.exp(2j * np.pi * ((k2 * n) % N) / N)
    return to_scan(ey[:, None] * ex[None, :])


def folded_frequencies(M: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Folded (k~1, k~2) for every k, each as an (N, M) array."""
    k1 = np.arange(M)[None, :]
    k2 = np.arange(N)[:, None]
    f1 = M / 2 - np.abs(k1 - M / 2)
    f2 = N / 2 - np.abs(k2 - N / 2)
    return np.broadcast_to(f1, (N, M)), np.broadcast_to(f2, (N, M))


def prior_map(M: int, N: int) -> np.ndarray:
    """OTF-like prior q_k as an (N, M) array (flat index k = k1 + M*k2).

    The vertical frequency is ``k // M``; for square areas this is the same
    as ``k // N``.
    """
    f1, f2 = folded_frequencies(M, N)
    return (1.0 - np.sqrt(2.0 * (f1 ** 2 / M ** 2 + f2 ** 2 / N ** 2))) ** 2


def frequency_prior(k: int, M: int, N: int) -> float:
    if not 0 <= k < M * N:
        raise IndexError(f"basis index {k} outside [0, {M * N})")
    return float(prior_map(M, N).reshape(-1)[k])


# -- block context -----------------------------------------------------------

@dataclass
class BlockContext:
    """One reconstruction area: a block plus its (clipped) border.

    ``sensor`` and ``codes`` are ``(N/2, M/2)`` arrays over the groups of the
    area; ``weights`` is the ``(N, M)`` weighting function, already zero on
    insensitive quadrants.
    """

    area_origin: tuple[int, int]
    block_origin: tuple[int, int]
    block_shape: tuple[int, int]  # (width, height)
    sensor: np.ndarray
    codes: np.ndarray
    weights: np.ndarray = field(repr=False)

    @property
    def M(self) -> int:
        return self.weights.shape[1]

    @property
    def N(self) -> int:
        return self.weights.shape[0]

    @property
    def sensitive(self) -> np.ndarray:
        return sensitive_mask(self.codes)

    @property
    def block_slice(self) -> tuple[slice, slice]:
        ox = self.block_origin[0] - self.area_origin[0]
        oy = self.block_origin[1] - self.area_origin[1]
        bw, bh = self.block_shape
        return slice(oy, oy + bh), slice(ox, ox + bw)

    def f_tilde(self) -> np.ndarray:
        """Sensor values in group order."""
        return self.sensor.reshape(-1)

    def w_vec(self) -> np.ndarray:
        return to_scan(self.weights)


def sensitive_mask(codes: np.ndarray) -> np.ndarray:
    """Fine-grid boolean set of sensitive positions for an (N/2, M/2) code array."""
    gn, gm = codes.shape
    out = np.ones((2 * gn, 2 * gm), dtype=bool)
    for code, (dx, dy) in enumerate(QUADRANT_OFFSETS):
        out[dy::2, dx::2] = codes != code
    return out


def distance_map(M: int, N: int, center: tuple[float, float] | None = None) -> np.ndarray:
    """Euclidean distance of each (n, m) position to ``center = (cm, cn)``."""
    cm, cn = ((M - 1) / 2, (N - 1) / 2) if center is None else center
    m = np.arange(M)[None, :]
    n = np.arange(N)[:, None]
    return np.sqrt((m - cm) ** 2 + (n - cn) ** 2)


def weight_function(codes: np.ndarray, rho: float, center=None) -> np.ndarray:
    """Isotropic decay rho**distance on sensitive positions, zero elsewhere.

    ``center`` defaults to the area center ((M-1)/2, (N-1)/2).
    """
    gn, gm = codes.shape
    w = rho ** distance_map(2 * gm, 2 * gn, center)
    return np.where(sensitive_mask(codes), w, 0.0)


def block_center(area_origin, block_origin, block_shape) -> tuple[float, float]:
    return (block_origin[0] - area_origin[0] + (block_shape[0] - 1) / 2,
            block_origin[1] - area_origin[1] + (block_shape[1] - 1) / 2)


def area_bounds(start: int, size: int, border: int, extent: int) -> tuple[int, int]:
    """Clip [start - border, start + size + border) to [0, extent), snapped to even."""
    lo = max(0, start - border)
    hi = min(extent, start + size + border)
    lo -= lo % 2
    hi += hi % 2
    return lo, min(hi, extent)


def make_context(sensor: np.ndarray, codes: np.ndarray, bx: int, by: int,
                 params: JsdeParams, weighting: str = "jsde") -> BlockContext:
    """Build the reconstruction area for the block whose top-left is (bx, by).

    ``sensor`` and ``codes`` cover the whole sensor (shape ``(Y/2, X/2)``).
    ``weighting="mp"`` gives plain 0/1 weights on the sensitive positions.
    """
    Yg, Xg = sensor.shape
    X, Y = 2 * Xg, 2 * Yg
    if bx % 2 or by % 2:
        raise ValueError("block origin must lie on the 2x2 group grid")
    bw = min(params.block_size, X - bx)
    bh = min(params.block_size, Y - by)
    x0, x1 = area_bounds(bx, bw, params.border, X)
    y0, y1 = area_bounds(by, bh, params.border, Y)
    gsl = (slice(y0 // 2, y1 // 2), slice(x0 // 2, x1 // 2))
    local_codes = np.asarray(codes[gsl])
    if weighting == "mp":
        w = sensitive_mask(local_codes).astype(np.float64)
    else:
        center = block_center((x0, y0), (bx, by), (bw, bh))
        w = weight_function(local_codes, params.rho, center)
    return BlockContext((x0, y0), (bx, by), (bw, bh),
                        np.asarray(sensor[gsl], dtype=np.float64), local_codes, w)


def context_from_area(sensor: np.ndarray, codes: np.ndarray, rho: float = 0.7,
                      weights: np.ndarray | None = None) -> BlockContext:
    """A free-standing context covering exactly the given groups (for tests and tools)."""
    codes = np.asarray(codes, dtype=np.uint8)
    gn, gm = codes.shape
    if weights is None:
        weights = weight_function(codes, rho)
    else:
        weights = np.where(sensitive_mask(codes), np.asarray(weights, dtype=np.float64), 0.0)
    return BlockContext((0, 0), (0, 0), (2 * gm, 2 * gn),
                        np.asarray(sensor, dtype=np.float64).reshape(gn, gm), codes, weights)
