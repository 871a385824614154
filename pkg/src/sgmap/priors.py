"""Sparsity priors on counts of nonzero groups / components.

All mass arithmetic is carried out on the log scale so that supports of size
1e4 and beyond are safe.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

__all__ = [
    "SparsityPrior",
    "AssumptionPReport",
    "binomial_prior",
    "truncated_geometric_prior",
    "uniform_prior",
    "custom_prior",
    "prior_from_dict",
    "universal_xi",
    "binomial_lambda_sq",
    "c_gamma",
    "check_assumption_p",
    "log_binom",
]


def log_binom(n, k):
    """``log C(n, k)`` via log-gamma; works elementwise on arrays."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


@dataclass(frozen=True, eq=False)
class SparsityPrior:
    """Probability mass function on ``{support_min, ..., support_max}``.

    ``log_masses[i]`` is the log-mass at ``support_min + i``. ``descriptor``
    records how the prior was built and is what gets serialized.
    """

    support_min: int
    support_max: int
    log_masses: np.ndarray
    descriptor: dict

    def __post_init__(self):
        lm = np.array(self.log_masses, dtype=float, copy=True)
        if self.support_min not in (0, 1):
            raise ValueError("support must start at 0 or 1")
        if self.support_max < self.support_min:
            raise ValueError("empty support")
        if lm.shape != (self.support_max - self.support_min + 1,):
            raise ValueError("log_masses length does not match support")
        if np.any(np.isnan(lm)) or np.any(lm > 1e-12):
            raise ValueError("invalid log-masses")
        lm.setflags(write=False)
        object.__setattr__(self, "log_masses", lm)

    @property
    def K(self) -> int:
        return self.support_max

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.support_min, self.support_max + 1)

    @property
    def masses(self) -> np.ndarray:
        return np.exp(self.log_masses)

    @property
    def is_positive(self) -> bool:
        """True when every point of the declared support has positive mass."""
        return bool(np.all(np.isfinite(self.log_masses)))

    def log_mass(self, k):
        """Log-mass at ``k``; ``-inf`` outside the support."""
        k = np.asarray(k)
        inside = (k >= self.support_min) & (k <= self.support_max)
        idx = np.where(inside, k - self.support_min, 0).astype(int)
        out = np.where(inside, self.log_masses[idx], -np.inf)
        return float(out) if out.ndim == 0 else out

    def log_table(self, K: int | None = None) -> np.ndarray:
        """Log-masses on ``0..K`` (default ``support_max``), ``-inf`` off-support."""
        K = self.support_max if K is None else K
        return self.log_mass(np.arange(K + 1))

    def log_total(self) -> float:
        return float(logsumexp(self.log_masses))

    def to_dict(self) -> dict:
        return dict(self.descriptor)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SparsityPrior":
        return prior_from_dict(json.loads(text))

    def __repr__(self):
        return f"SparsityPrior({self.descriptor})"


def binomial_prior(K: int, xi: float) -> SparsityPrior:
    """Binomial ``B(K, xi)`` on ``0..K``."""
    if not 0 < xi < 1:
        raise ValueError(f"xi must lie in (0, 1), got {xi}")
    if K < 0:
        raise ValueError("K must be nonnegative")
    k = np.arange(K + 1)
    lm = log_binom(K, k) + k * math.log(xi) + (K - k) * math.log1p(-xi)
    # gammaln cancellation drifts by ~K*eps at large K
    lm -= logsumexp(lm)
    return SparsityPrior(0, K, lm, {"kind": "binomial", "K": int(K), "xi": float(xi)})


def truncated_geometric_prior(K: int, q: float, include_zero: bool = False) -> SparsityPrior:
    """Mass proportional to ``q**k`` on ``1..K`` (or ``0..K`` with ``include_zero``)."""
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if K < 1:
        raise ValueError("K must be >= 1")
    lo = 0 if include_zero else 1
    k = np.arange(lo, K + 1)
    # log sum_{k=lo}^{K} q^k = lo*log q + log(1 - q^(K-lo+1)) - log(1 - q)
    log_norm = lo * math.log(q) + math.log1p(-(q ** (K - lo + 1))) - math.log1p(-q)
    lm = k * math.log(q) - log_norm
    desc = {"kind": "geometric", "K": int(K), "q": float(q), "include_zero": bool(include_zero)}
    return SparsityPrior(lo, K, lm, desc)


def uniform_prior(K: int, include_zero: bool = True) -> SparsityPrior:
    lo = 0 if include_zero else 1
    size = K - lo + 1
    if size < 1:
        raise ValueError("empty support")
    lm = np.full(size, -math.log(size))
    return SparsityPrior(lo, K, lm, {"kind": "uniform", "K": int(K), "include_zero": bool(include_zero)})


def custom_prior(masses, support_min: int = 0) -> SparsityPrior:
    """Prior from an explicit table of (unnormalized, nonnegative) masses.

    Zero masses are allowed and give ``-inf`` log-mass.
    """
    w = np.asarray(masses, dtype=float)
    if w.ndim != 1 or w.size == 0 or np.any(w < 0) or not np.isfinite(w).all() or w.sum() <= 0:
        raise ValueError("masses must be a non-empty vector of nonnegative finite values")
    with np.errstate(divide="ignore"):
        lw = np.log(w)
    lm = lw - logsumexp(lw)
    desc = {"kind": "custom", "support_min": int(support_min), "masses": [float(x) for x in w]}
    return SparsityPrior(support_min, support_min + w.size - 1, lm, desc)


def prior_from_dict(obj: dict) -> SparsityPrior:
    kind = obj.get("kind")
    if kind == "binomial":
        return binomial_prior(int(obj["K"]), float(obj["xi"]))
    if kind == "geometric":
        return truncated_geometric_prior(int(obj["K"]), float(obj["q"]), bool(obj.get("include_zero", False)))
    if kind == "uniform":
        return uniform_prior(int(obj["K"]), bool(obj.get("include_zero", True)))
    if kind == "custom":
        return custom_prior(obj["masses"], int(obj.get("support_min", 0)))
    raise ValueError(f"unknown prior kind {kind!r}")


def universal_xi(n: int, gamma: float) -> float:
    """Within-group binomial rate whose MAP threshold is ``sigma*sqrt(2 ln n)``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    s = math.sqrt(gamma + 1.0)
    return s / (s + n ** (gamma / (gamma + 1.0)))


def binomial_lambda_sq(xi: float, gamma: float, kind: str = "within") -> float:
    """Slope ``lambda^2`` of the linear penalty implied by a binomial prior.

    The penalty is ``2 sigma^2 lambda^2 k`` (plus a constant), so hard
    thresholding happens at ``sqrt(2) * sigma * lambda``.

    Parameters
    ----------
    xi : float
        Binomial success probability, in (0, 1).
    gamma : float
        Slab-to-noise variance ratio.
    kind : {"within", "between"}
        ``"within"`` includes the ``sqrt(1 + gamma)`` factor contributed by
        the Gaussian slab; ``"between"`` does not.
    """
    if not 0 < xi < 1:
        raise ValueError(f"xi must lie in (0, 1), got {xi}")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    odds = math.log1p(-xi) - math.log(xi)
    if kind == "within":
        log_arg = 0.5 * math.log1p(gamma) + odds
    elif kind == "between":
        log_arg = odds
    else:
        raise ValueError(f"kind must be 'within' or 'between', got {kind!r}")
    if log_arg < 0:
        raise ValueError(f"xi={xi} is too large: the implied penalty slope is negative")
    return (1.0 + 1.0 / gamma) * log_arg


def c_gamma(gamma: float) -> float:
    return 8.0 * (gamma + 0.75) ** 2


@dataclass(frozen=True)
class AssumptionPReport:
    gamma: float
    c_gamma: float
    violations: tuple
    satisfied: bool


def check_assumption_p(prior: SparsityPrior, gamma: float, n: int) -> AssumptionPReport:
    """Check ``pi(h) <= C(n, h) exp(-c(gamma) h)`` for ``h = 1..n`` in log space."""
    if prior.support_max != n:
        raise ValueError(f"prior support_max={prior.support_max} does not match n={n}")
    c = c_gamma(gamma)
    h = np.arange(1, n + 1)
    bound = log_binom(n, h) - c * h
    lp = prior.log_mass(h)
    bad = h[lp > bound + 1e-12 * np.maximum(1.0, np.abs(bound))]
    violations = tuple(int(x) for x in bad)
    return AssumptionPReport(gamma=gamma, c_gamma=c, violations=violations, satisfied=not violations)
