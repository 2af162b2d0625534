"""Literal dense-matrix evaluation of the model generation.

Builds A, D, W and every atom explicitly.  Cost is O((MN)^2), so this is only
meant as an independent check of the fast path on small areas.
"""

from __future__ import annotations

import numpy as np

from .kernel import first_max
from .operators import (BlockContext, aggregation_matrix, basis_function,
                        distribution_matrix, frequency_prior)


class DenseSystem:
    def __init__(self, ctx: BlockContext):
        self.M, self.N = ctx.M, ctx.N
        codes = ctx.codes.reshape(-1)
        self.A = aggregation_matrix(codes)
        self.D = distribution_matrix(codes.size)
        self.W = np.diag(ctx.w_vec())
        self.f_tilde = ctx.f_tilde()
        K = self.M * self.N
        self.Phi = np.stack([basis_function(k, self.M, self.N) for k in range(K)], axis=1)
        self.DAPhi = self.D @ (self.A @ self.Phi)
        self.q = np.array([frequency_prior(k, self.M, self.N) for k in range(K)])

    def numerator(self, k, r):
        a = self.DAPhi[:, k]
        return np.conj(a) @ (self.W @ r)

    def denominator(self, k):
        a = self.DAPhi[:, k]
        return float(np.real(np.conj(a) @ (self.W @ a)))

    def numerators(self, r):
        return np.conj(self.DAPhi).T @ (self.W @ r)

    def denominators(self):
        return np.real(np.einsum("ik,i,ik->k", np.conj(self.DAPhi), np.diag(self.W), self.DAPhi))

    def energy(self, r) -> float:
        return float(np.real(np.conj(r) @ (self.W @ r)))

    def trial_energy(self, k, r, p) -> float:
        """Weighted energy of the residual left after removing p * DA phi_k."""
        return self.energy(r - p * self.DAPhi[:, k])

    def model_residual(self, g):
        return self.D @ self.f_tilde - self.D @ (self.A @ g)

    def projections(self, r):
        """Optimal coefficient p_k for every selectable atom (nan elsewhere)."""
        den = self.denominators()
        ok = den > 1e-12 * den[0]
        p = np.full(den.shape, np.nan, dtype=complex)
        p[ok] = self.numerators(r)[ok] / den[ok]
        return p, ok

    def select_by_gain(self, r, q=None) -> int:
        """argmax_k q_k |num_k|^2 / den_k, the rule the pursuit uses."""
        q = self.q if q is None else q
        den = self.denominators()
        ok = den > 1e-12 * den[0]
        score = np.full(den.shape, -np.inf)
        score[ok] = np.sqrt(q[ok] / den[ok]) * np.abs(self.numerators(r)[ok])
        return int(first_max(score))

    def select_by_energy(self, r, q=None) -> int:
        """argmin_k q_k E_{w,k} with E evaluated at the optimal p_k."""
        q = self.q if q is None else q
        p, ok = self.projections(r)
        cost = np.full(p.shape, np.inf)
        for k in np.flatnonzero(ok):
            cost[k] = q[k] * self.trial_energy(k, r, p[k])
        return int(first_max(-cost))

    def select_by_reduction(self, r, q=None) -> int:
        """argmin_k -q_k (E_w - E_{w,k}): prior-weighted energy reduction."""
        q = self.q if q is None else q
        p, ok = self.projections(r)
        e0 = self.energy(r)
        cost = np.full(p.shape, np.inf)
        for k in np.flatnonzero(ok):
            cost[k] = -q[k] * (e0 - self.trial_energy(k, r, p[k]))
        return int(first_max(-cost))


def dense_model(ctx: BlockContext, iterations: int, gamma: float, use_prior: bool = True,
                rtol: float = 1e-12):
    """Dense-matrix run of the greedy loop; returns (selections, g, r)."""
    sys = DenseSystem(ctx)
    K = sys.M * sys.N
    q = sys.q if use_prior else np.ones(K)
    den = sys.denominators()
    ok = den > rtol * den[0]
    g = np.zeros(K, dtype=complex)
    r = (sys.D @ sys.f_tilde).astype(complex)
    picks = []
    for _ in range(iterations):
        num = sys.numerators(r)
        score = np.full(K, -np.inf)
        score[ok] = np.sqrt(q[ok] / den[ok]) * np.abs(num[ok])
        u = int(first_max(score))
        p = num[u] / den[u]
        g = g + gamma * p * sys.Phi[:, u]
        r = r - gamma * p * sys.DAPhi[:, u]
        picks.append(u)
    return picks, g, r
