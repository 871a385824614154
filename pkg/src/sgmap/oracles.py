"""Brute-force reference solvers used to validate the fast estimators.

None of these reuse the estimator's penalty tables: penalties are rebuilt
here from the prior masses with exact integer binomial coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimator import PenaltyConfig
from .lasso import LassoParams
from .model import IndicatorMatrix, MeanSet, ObservationSet

__all__ = ["OracleBudget", "BudgetExceeded", "exhaustive_map", "posterior_argmax", "numeric_sgl"]


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_cells: int = 20
    tolerance: float = 1e-12
    max_iter: int = 200_000

    def __post_init__(self):
        if not 1 <= self.max_cells <= 20:
            raise ValueError("max_cells must lie in 1..20")
        if not 0 < self.tolerance <= 1e-3:
            raise ValueError("tolerance must lie in (0, 1e-3]")


def _all_indicators(m: int, n: int) -> np.ndarray:
    """Every m x n binary matrix, in lexicographic order of the flattened flags."""
    cells = m * n
    codes = np.arange(2**cells, dtype=np.int64)
    shifts = np.arange(cells - 1, -1, -1, dtype=np.int64)
    bits = ((codes[:, None] >> shifts) & 1).astype(bool)
    return bits.reshape(-1, m, n)


def _log_comb(n: int, k: int) -> float:
    return math.log(math.comb(n, k))


def _log_prior_terms(data: ObservationSet, config: PenaltyConfig):
    """Per-group and per-count log-prior pieces, with exact binomials."""
    m, n = data.m, data.n
    within = np.zeros((m, n + 1))
    for j in range(m):
        prior = config.within_prior(j)
        for h in range(1, n + 1):
            within[j, h] = prior.log_mass(h) - _log_comb(n, h) - 0.5 * h * math.log(1.0 + config.gamma)
    between = np.array([config.between_prior.log_mass(k) - _log_comb(m, k) for k in range(m + 1)])
    return within, between


def _check_budget(data: ObservationSet, budget: OracleBudget):
    if data.m * data.n > budget.max_cells:
        raise BudgetExceeded(f"{data.m}x{data.n} exceeds the {budget.max_cells}-cell enumeration cap")


def _first_within(values: np.ndarray, best: float, tol: float) -> int:
    return int(np.flatnonzero(values <= best + tol * max(1.0, abs(best)))[0])


def exhaustive_map(data: ObservationSet, config: PenaltyConfig, budget: OracleBudget | None = None):
    """Minimize the penalized criterion over all ``2**(m n)`` indicator matrices.

    Returns ``(IndicatorMatrix, objective)``; among objective ties within
    1e-12 the lexicographically smallest matrix wins.
    """
    budget = budget or OracleBudget()
    _check_budget(data, budget)
    m, n = data.m, data.n
    D = _all_indicators(m, n)
    y2 = data.values**2
    log_within, log_between = _log_prior_terms(data, config)
    scale = 2.0 * data.sigma**2 * (1.0 + 1.0 / config.gamma)
    h = D.sum(axis=2)
    rss = np.where(D, 0.0, y2).sum(axis=(1, 2))
    pen_within = np.where(h > 0, -scale * log_within[np.arange(m), h], 0.0).sum(axis=1)
    pen_between = -scale * log_between[np.count_nonzero(h, axis=1)]
    total = rss + pen_within + pen_between
    best = _first_within(total, float(total.min()), 1e-12)
    return IndicatorMatrix(D[best]), float(total[best])


def posterior_argmax(data: ObservationSet, config: PenaltyConfig, budget: OracleBudget | None = None) -> IndicatorMatrix:
    """Most probable indicator matrix under the hierarchical spike-and-slab prior.

    Scores each configuration by its unnormalized log posterior: prior on
    the count of nonzero groups and on their placement, prior on each
    group's count and placement, the slab marginal factor
    ``(1 + gamma)^(-h/2)`` and the data term
    ``gamma / (gamma + 1) * sum(y^2 d) / (2 sigma^2)``.
    """
    budget = budget or OracleBudget()
    _check_budget(data, budget)
    m, n = data.m, data.n
    D = _all_indicators(m, n)
    g = config.gamma
    log_within, log_between = _log_prior_terms(data, config)
    h = D.sum(axis=2)
    data_term = (g / (g + 1.0)) * np.where(D, data.values**2, 0.0).sum(axis=2) / (2.0 * data.sigma**2)
    per_group = np.where(h > 0, log_within[np.arange(m), h] + data_term, 0.0).sum(axis=1)
    logpost = log_between[np.count_nonzero(h, axis=1)] + per_group
    best = _first_within(-logpost, float(-logpost.max()), 1e-12)
    return IndicatorMatrix(D[best])


def numeric_sgl(data: ObservationSet, params: LassoParams, budget: OracleBudget | None = None) -> MeanSet:
    """Sparse group lasso by ADMM splitting of the l1 and group-l2 terms.

    The ``x`` block carries the quadratic loss and the l1 penalty (solved by
    soft thresholding), the ``z`` block the group penalty (solved by block
    shrinkage); neither step uses the composed closed form.
    """
    budget = budget or OracleBudget()
    y = data.values
    lam1, lam2 = params.lambda1, params.lambda2
    rho = 2.0
    z = y.copy()
    u = np.zeros_like(y)
    for _ in range(budget.max_iter):
        v = (2.0 * y + rho * (z - u)) / (2.0 + rho)
        x = np.sign(v) * np.maximum(np.abs(v) - lam2 / (2.0 + rho), 0.0)
        w = x + u
        norm = np.linalg.norm(w, axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            factor = np.where(norm > 0, np.maximum(1.0 - (lam1 / rho) / norm, 0.0), 0.0)
        z_new = factor * w
        u = u + x - z_new
        primal = np.max(np.abs(x - z_new))
        dual = rho * np.max(np.abs(z_new - z))
        z = z_new
        if primal < budget.tolerance and dual < budget.tolerance:
            return MeanSet(z)
    raise RuntimeError("numeric_sgl did not converge within the iteration cap")
