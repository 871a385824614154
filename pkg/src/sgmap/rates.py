"""Minimax rate lookup over l0 / strong lp / weak lp balls and empirical sweeps.

Rates are known only up to multiplicative constants and regimes are defined
asymptotically, so at a fixed ``n`` the regime is assigned by a concrete
rule (see :func:`classify_regime`).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .model import SimScenario
from .simulation import EstimatorSpec, replication_sse

__all__ = [
    "DENSE_ETA",
    "RateSpec",
    "classify_regime",
    "sparse_boundary",
    "rate_lookup",
    "group_rate_bound",
    "SweepRow",
    "rate_sweep",
    "sweep_csv",
]

#: Radii at or above this are treated as non-vanishing (dense).
DENSE_ETA = math.exp(-1.0)

_BALLS = ("l0", "strong-lp", "weak-mp")
_REGIMES = ("dense", "sparse", "super-sparse")


def sparse_boundary(p: float, n: int) -> float:
    """Radius ``n^(-1/min(p, 2)) sqrt(ln n)`` separating sparse from super-sparse."""
    return n ** (-1.0 / min(p, 2.0)) * math.sqrt(math.log(n))


def classify_regime(ball: str, p: float, eta: float, n: int) -> str:
    """Finite-``n`` regime of a ball of standardized radius ``eta``.

    l0 balls need at least one nonzero entry (``eta >= 1/n``) and have no
    super-sparse regime. For ``p > 0`` radii below :func:`sparse_boundary`
    are super-sparse. Otherwise ``eta >= DENSE_ETA`` counts as dense.
    """
    if ball == "l0":
        if eta < 1.0 / n:
            raise ValueError("l0 radius below 1/n leaves no nonzero entries")
        return "dense" if eta >= DENSE_ETA else "sparse"
    if eta < sparse_boundary(p, n):
        return "super-sparse"
    return "dense" if eta >= DENSE_ETA else "sparse"


@dataclass(frozen=True)
class RateSpec:
    ball: str
    p: float
    eta: float
    n: int
    sigma: float = 1.0
    regime: str | None = None

    def __post_init__(self):
        if self.ball not in _BALLS:
            raise ValueError(f"ball must be one of {_BALLS}")
        if self.ball == "l0" and self.p != 0:
            raise ValueError("l0 balls have p = 0")
        if self.ball != "l0" and not self.p > 0:
            raise ValueError("lp balls need p > 0")
        if not (self.eta > 0 and self.sigma > 0 and self.n >= 2):
            raise ValueError("eta, sigma must be positive and n >= 2")
        if self.regime is None:
            object.__setattr__(self, "regime", classify_regime(self.ball, self.p, self.eta, self.n))
        elif self.regime not in _REGIMES:
            raise ValueError(f"regime must be one of {_REGIMES}")
        elif not (self.ball == "l0" and self.regime == "super-sparse"):
            # that combination is rejected by rate_lookup instead
            expected = classify_regime(self.ball, self.p, self.eta, self.n)
            if expected != self.regime:
                raise ValueError(f"regime {self.regime!r} inconsistent with radius (expected {expected!r})")


def rate_lookup(spec: RateSpec) -> float:
    """Single-vector minimax risk (up to constants) for ``spec``."""
    s2n = spec.sigma**2 * spec.n
    p, eta = spec.p, spec.eta
    if spec.regime == "dense":
        return s2n
    if spec.regime == "sparse":
        if p == 0:
            return s2n * eta * math.log(1.0 / eta)
        if p < 2:
            return s2n * eta**p * (-p * math.log(eta)) ** (1.0 - p / 2.0)
        rate = s2n * eta**2
        if spec.ball == "weak-mp" and p == 2:
            rate *= -2.0 * math.log(eta)
        return rate
    if p == 0:
        raise ValueError("l0 balls have no super-sparse regime")
    if p < 2:
        return spec.sigma**2 * spec.n ** (2.0 / p) * eta**2
    return s2n * eta**2


def group_rate_bound(specs, m: int, m0: int, sigma: float = 1.0) -> float:
    """``max(sum of per-group rates, sigma^2 m0 ln(m/m0))``."""
    within = sum(rate_lookup(s) for s in specs)
    between = sigma**2 * m0 * math.log(m / m0) if m0 > 0 else 0.0
    return max(within, between)


@dataclass(frozen=True)
class SweepRow:
    m: int
    n: int
    m0: int
    eta: float
    nonzeros: int
    risk: float
    se: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.risk / self.bound


def rate_sweep(
    configs,
    estimator: EstimatorSpec | None = None,
    reps: int = 50,
    seed: int = 0,
    amplitude: float = 5.0,
    sigma: float = 1.0,
    gamma: float | None = None,
) -> list[SweepRow]:
    """Empirical risk of ``estimator`` on l0-ball designs versus the rate bound.

    Each config is ``(m, n, m0, eta)``: the first ``m0`` groups get
    ``round(eta * n)`` (at least one) entries equal to ``+-amplitude*sigma``
    at random positions, the rest are zero. ``gamma`` defaults to
    ``amplitude**2``.
    """
    estimator = estimator or EstimatorSpec("map-geometric", q0=0.3, q=0.3, q_convention="success")
    gamma = amplitude**2 if gamma is None else gamma
    rows = []
    for i, (m, n, m0, eta) in enumerate(configs):
        m, n, m0 = int(m), int(n), int(m0)
        k = max(1, int(round(eta * n)))
        counts = (k,) * m0 + (0,) * (m - m0)
        cfg_seed = int(np.random.SeedSequence([int(seed), i]).generate_state(1, np.uint64)[0])
        scenario = SimScenario(m, n, counts, amplitude * sigma, sigma, reps, cfg_seed, signal="sign")
        sse = replication_sse(scenario, estimator, gamma)
        spec = RateSpec("l0", 0.0, k / n, n, sigma)
        bound = group_rate_bound([spec] * m0, m, m0, sigma)
        se = float(np.std(sse, ddof=1) / math.sqrt(reps)) if reps > 1 else float("nan")
        rows.append(SweepRow(m, n, m0, float(eta), k, float(np.mean(sse)), se, bound))
    return rows


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "n", "m0", "eta", "nonzeros", "risk", "se", "bound", "ratio"])
    for r in rows:
        w.writerow([r.m, r.n, r.m0, repr(r.eta), r.nonzeros, repr(r.risk), repr(r.se), repr(r.bound), repr(r.ratio)])
    return buf.getvalue()
