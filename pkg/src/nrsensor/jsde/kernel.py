"""Frequency-domain evaluation of the greedy model generation.

The residual always lies in the range of D, so it is carried as one value per
2x2 group.  For a batch of same-shaped areas this module evaluates the
selection score of every atom at once:

* numerators ``(DA phi_k)^H W r`` are the 2-D DFT of an auxiliary array that
  holds a third of the weighted group sum of ``r`` on every sensitive position;
* denominators ``(DA phi_k)^H W DA phi_k`` expand into nine cosines over the
  within-group offsets ``{-1, 0, 1}^2`` and are computed once per area.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft

from ..imagecore import QUADRANT_OFFSETS

log = logging.getLogger(__name__)

# denominators below this fraction of the DC denominator are treated as zero
DEN_RTOL = 1e-12
TIE_RTOL = 1e-9

OFFSET_PAIRS = tuple(
    (a, b) for a in range(4) for b in range(4)
)


def group_sums(weights: np.ndarray) -> np.ndarray:
    """Sum of weights over each 2x2 group; ``(..., N, M) -> (..., N/2, M/2)``."""
    *lead, N, M = weights.shape
    w = weights.reshape(*lead, N // 2, 2, M // 2, 2)
    return (w[..., 0, :, 0] + w[..., 0, :, 1]) + (w[..., 1, :, 0] + w[..., 1, :, 1])


def keep_planes(codes: np.ndarray) -> np.ndarray:
    """``keep[c]`` is 1.0 where quadrant ``c`` is sensitive; shape (4, *codes.shape)."""
    return np.stack([(codes != c).astype(np.float64) for c in range(4)])


def exp_table(M: int) -> np.ndarray:
    """``T[k, m] = exp(2j*pi*k*m/M)`` with the phase reduced modulo M."""
    k = np.arange(M)
    return np.exp(2j * np.pi * (np.outer(k, k) % M) / M)


def denominators(weights: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """All atom energies ``(DA phi_k)^H W DA phi_k`` as ``(..., N, M)`` arrays."""
    *lead, N, M = weights.shape
    S = group_sums(weights)
    keep = keep_planes(codes)
    coef = {}
    for a, b in OFFSET_PAIRS:
        d = (QUADRANT_OFFSETS[a][0] - QUADRANT_OFFSETS[b][0],
             QUADRANT_OFFSETS[a][1] - QUADRANT_OFFSETS[b][1])
        term = (S * keep[a] * keep[b]).sum(axis=(-2, -1))
        coef[d] = coef[d] + term if d in coef else term
    k1 = np.arange(M)[None, :]
    k2 = np.arange(N)[:, None]
    den = np.zeros((*lead, N, M))
    for (dm, dn), c in sorted(coef.items()):
        phase = ((k1 * dm) % M) / M + ((k2 * dn) % N) / N
        den += np.asarray(c)[..., None, None] / 9.0 * np.cos(2 * np.pi * phase)
    return den


def discarded_positions(codes: np.ndarray) -> np.ndarray:
    """Flat indices (into a C-ordered ``(..., N, M)`` array) of insensitive positions."""
    *lead, gn, gm = codes.shape
    c = codes.astype(np.intp)
    dy, dx = c // 2, c % 2
    n = 2 * np.arange(gn)[:, None] + dy
    m = 2 * np.arange(gm)[None, :] + dx
    base = np.arange(int(np.prod(lead, dtype=np.intp))).reshape(*lead, 1, 1) * (4 * gn * gm)
    return (base + n * (2 * gm) + m).reshape(-1)


def auxiliary(resid: np.ndarray, S: np.ndarray, discarded: np.ndarray, out=None) -> np.ndarray:
    """Fine-grid array whose forward DFT gives all numerators.

    Every sensitive position holds a third of the weighted group sum of the
    residual; ``discarded`` comes from :func:`discarded_positions`.
    """
    *lead, gn, gm = resid.shape
    if out is None:
        out = np.empty((*lead, 2 * gn, 2 * gm), dtype=np.complex128)
    a = (S / 3.0) * resid
    out.reshape(*lead, gn, 2, gm, 2)[...] = a[..., :, None, :, None]
    out.reshape(-1)[discarded] = 0.0
    return out


def numerators(resid: np.ndarray, weights: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """All ``(DA phi_k)^H W r`` for group-domain residuals, as ``(..., N, M)``."""
    aux = auxiliary(np.asarray(resid, dtype=np.complex128), group_sums(weights),
                    discarded_positions(codes))
    return sp_fft.fft2(aux, axes=(-2, -1), overwrite_x=True)


def atom_groups(e1: np.ndarray, e2: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Group values of ``A phi`` for separable atoms ``phi[n, m] = e2[n] * e1[m]``.

    Per group this is the atom at the group origin times
    ``(1 + z1)(1 + z2) - z_discarded``, divided by three, where ``z1``, ``z2``
    are the one-pixel phase steps along m and n.
    """
    z1, z2 = e1[..., 1], e2[..., 1]
    zq = np.stack([np.ones_like(z1), z1, z2, z1 * z2], axis=-1)
    total = (1.0 + z1) * (1.0 + z2)
    factor = (total[..., None] - zq) / 3.0
    lead = codes.shape[:-2]
    flat = codes.reshape(*lead, -1).astype(np.intp)
    per_group = np.take_along_axis(factor, flat, axis=-1).reshape(codes.shape)
    origin = e2[..., ::2, None] * e1[..., None, ::2]
    return origin * per_group


@dataclass
class PursuitResult:
    """Per-area selections of one batch run.

    ``indices[b, i]`` is the atom chosen in iteration ``i`` and
    ``updates[b, i]`` the coefficient increment (gamma times the projection
    coefficient).  ``fallback[b]`` marks areas without any selectable atom.
    """

    indices: np.ndarray
    updates: np.ndarray
    residual: np.ndarray
    fallback: np.ndarray


def first_max(score: np.ndarray, rtol: float = TIE_RTOL) -> np.ndarray:
    """Smallest index whose score is within ``rtol`` of the row maximum.

    Conjugate-frequency atoms score equally in exact arithmetic; the relative
    slack keeps rounding noise from deciding which one wins.
    """
    best = score.max(axis=-1, keepdims=True)
    return np.argmax(best - score <= rtol * np.abs(best), axis=-1)


def pursue(sensor: np.ndarray, codes: np.ndarray, weights: np.ndarray, prior: np.ndarray,
           iterations: int, gamma: float) -> PursuitResult:
    """Run the greedy model generation on a batch of equally sized areas.

    ``sensor`` and ``codes`` have shape ``(B, N/2, M/2)``, ``weights`` has
    shape ``(B, N, M)`` and must already be zero on insensitive positions.
    ``prior`` is an ``(N, M)`` map shared by the whole batch.
    """
    nb, N, M = weights.shape
    S = group_sums(weights)
    discarded = discarded_positions(codes)
    den = denominators(weights, codes)
    dc = den[:, 0, 0].copy()
    valid = den > DEN_RTOL * dc[:, None, None]
    fallback = ~valid.reshape(nb, -1).any(axis=1)
    if fallback.any():
        log.warning("%d area(s) without selectable atoms; falling back to pixel enlargement",
                    int(fallback.sum()))
    # argmax of sqrt(q/den)*|F| equals argmax of q*|F|^2/den
    gain = np.zeros_like(den)
    np.divide(prior, den, out=gain, where=valid)
    np.sqrt(gain, out=gain)
    gain_flat = gain.reshape(nb, -1)
    invalid = ~valid.reshape(nb, -1)
    has_invalid = bool(invalid.any())

    EM, EN = exp_table(M), exp_table(N)
    resid = np.asarray(sensor, dtype=np.complex128).copy()
    indices = np.zeros((nb, iterations), dtype=np.intp)
    updates = np.zeros((nb, iterations), dtype=np.complex128)
    rows = np.arange(nb)
    den_flat = den.reshape(nb, -1)
    buf = np.empty((nb, N, M), dtype=np.complex128)
    score = np.empty((nb, N * M))
    for it in range(iterations):
        F = sp_fft.fft2(auxiliary(resid, S, discarded, out=buf), axes=(-2, -1),
                        overwrite_x=True).reshape(nb, -1)
        np.abs(F, out=score)
        score *= gain_flat
        if has_invalid:
            np.copyto(score, -np.inf, where=invalid)
        u = first_max(score)
        p = F[rows, u] / np.where(fallback, 1.0, den_flat[rows, u])
        step = np.where(fallback, 0.0, gamma * p)
        indices[:, it] = u
        updates[:, it] = step
        v = atom_groups(EM[u % M], EN[u // M], codes)
        resid -= step[:, None, None] * v
    return PursuitResult(indices, updates, resid, fallback)


def synthesize(indices: np.ndarray, updates: np.ndarray, M: int, N: int,
               rows: slice = slice(None), cols: slice = slice(None)) -> np.ndarray:
    """Evaluate the models ``sum_i updates[b, i] * phi_{indices[b, i]}`` on a window.

    Terms are accumulated in iteration order.
    """
    EM, EN = exp_table(M), exp_table(N)
    e1 = EM[:, cols]
    e2 = EN[:, rows]
    nb, iters = indices.shape
    h = e2.shape[1]
    w = e1.shape[1]
    g = np.zeros((nb, h, w), dtype=np.complex128)
    for it in range(iters):
        u = indices[:, it]
        g += updates[:, it, None, None] * (e2[u // M][:, :, None] * e1[u % M][:, None, :])
    return g
