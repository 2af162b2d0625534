"""Single-area model generation and its building blocks.

:func:`jsde_model` runs the greedy loop for one :class:`BlockContext` through
the same batched kernel that image reconstruction uses, so a block modeled
on its own is bitwise identical to the same block inside a full image.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .operators import BlockContext, JsdeParams, distribute, from_scan, prior_map, to_scan


class DegenerateAtomError(ValueError):
    """The atom has (numerically) no energy under the weighting."""


@dataclass
class SparseModel:
    """Coefficients of the selected atoms plus model and residual.

    ``model`` and ``residual`` are scan-order vectors of length ``M*N``.
    """

    M: int
    N: int
    coefficients: dict[int, complex] = field(default_factory=dict)
    model: np.ndarray = None
    residual: np.ndarray = None
    selections: list[int] = field(default_factory=list)
    fallback: bool = False

    @property
    def iterations(self) -> int:
        return len(self.selections)

    def image(self) -> np.ndarray:
        """The model as an (N, M) area array."""
        return from_scan(self.model, self.M, self.N)


def numerators_all(r, ctx: BlockContext) -> np.ndarray:
    """``(DA phi_k)^H W r`` for every k, flat in k.

    ``r`` is a scan-order residual in the range of D (constant on groups).
    """
    r = np.asarray(r, dtype=np.complex128)
    groups = r.reshape(-1, 4)[:, 0].reshape(ctx.codes.shape)
    return kernel.numerators(groups, ctx.weights, ctx.codes).reshape(-1)


def denominators_all(ctx: BlockContext, clamp: bool = True) -> np.ndarray:
    """``(DA phi_k)^H W DA phi_k`` for every k, flat in k."""
    den = kernel.denominators(ctx.weights, ctx.codes).reshape(-1)
    return np.maximum(den, 0.0) if clamp else den


def selectable(den: np.ndarray) -> np.ndarray:
    return den > kernel.DEN_RTOL * den[0]


def selection_scores(r, ctx: BlockContext, prior: np.ndarray | None = None) -> np.ndarray:
    """``q_k |num_k|^2 / den_k`` with unselectable atoms at -inf."""
    if prior is None:
        prior = prior_map(ctx.M, ctx.N)
    num = numerators_all(r, ctx)
    den = denominators_all(ctx)
    ok = selectable(den)
    score = np.full(den.shape, -np.inf)
    score[ok] = np.asarray(prior).reshape(-1)[ok] * np.abs(num[ok]) ** 2 / den[ok]
    return score


def select_basis(r, ctx: BlockContext, prior: np.ndarray | None = None) -> int:
    """Index of the atom with the best prior-weighted energy reduction.

    Ties resolve to the smallest index.  Raises :class:`DegenerateAtomError`
    when no atom is selectable.
    """
    score = selection_scores(r, ctx, prior)
    ok = np.isfinite(score)
    if not ok.any():
        raise DegenerateAtomError("no selectable atom in this area")
    return int(kernel.first_max(np.sqrt(score, where=ok, out=np.full(score.shape, -np.inf))))


def projection_coefficient(k: int, r, ctx: BlockContext) -> complex:
    """Weighted least-squares coefficient of atom k against residual r."""
    den = denominators_all(ctx)
    if not selectable(den)[k]:
        raise DegenerateAtomError(f"atom {k} has no support under the weighting")
    return complex(numerators_all(r, ctx)[k] / den[k])


def weighted_energy(r, ctx: BlockContext) -> float:
    r = np.asarray(r)
    return float(np.real(np.vdot(r, ctx.w_vec() * r)))


def run_pursuit(ctx: BlockContext, iterations: int, gamma: float,
                prior: np.ndarray | None = None) -> kernel.PursuitResult:
    if prior is None:
        prior = prior_map(ctx.M, ctx.N)
    return kernel.pursue(ctx.sensor[None], ctx.codes[None], ctx.weights[None],
                         np.asarray(prior, dtype=np.float64), iterations, gamma)


def jsde_model(ctx: BlockContext, params: JsdeParams = JsdeParams(),
               prior: np.ndarray | None = None, gamma: float | None = None) -> SparseModel:
    """Greedy sparse model of one reconstruction area.

    Starts from a zero model and the distributed sensor values as residual,
    then for ``params.iterations`` rounds selects an atom, computes its
    projection coefficient and adds ``gamma`` times it to the model.
    ``prior`` and ``gamma`` override the OTF prior and ``params.gamma``.
    """
    gamma = params.gamma if gamma is None else gamma
    res = run_pursuit(ctx, params.iterations, gamma, prior)
    M, N = ctx.M, ctx.N
    coeffs: dict[int, complex] = {}
    for u, step in zip(res.indices[0], res.updates[0]):
        coeffs[int(u)] = coeffs.get(int(u), 0j) + complex(step)
    g = kernel.synthesize(res.indices, res.updates, M, N)[0]
    resid = distribute(res.residual[0].reshape(-1))
    return SparseModel(M, N, coeffs, to_scan(g), resid,
                       [int(u) for u in res.indices[0]], bool(res.fallback[0]))
