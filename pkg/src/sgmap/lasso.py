"""Group lasso and sparse group lasso in the orthogonal sequence model.

With an identity design both estimators have closed forms: the group lasso
shrinks whole vectors toward zero, and the sparse group lasso first soft
thresholds each component and then shrinks the resulting vector.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .model import MeanSet, ObservationSet, SimScenario, generate_batch

__all__ = [
    "LassoParams",
    "GridSpec",
    "TuneResult",
    "soft_threshold",
    "group_shrink",
    "group_lasso",
    "sparse_group_lasso",
    "sgl_objective",
    "semi_oracle_lambda2",
    "oracle_tune",
    "sgl_grid_mse",
]


@dataclass(frozen=True)
class LassoParams:
    lambda1: float
    lambda2: float = 0.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")


def soft_threshold(y, t: float) -> np.ndarray:
    """Elementwise ``sign(y) * max(|y| - t, 0)``."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    y = np.asarray(y, dtype=float)
    return np.sign(y) * np.maximum(np.abs(y) - t, 0.0)


def group_shrink(v, t: float) -> np.ndarray:
    """Scale each row of ``v`` by ``(1 - t/||row||)_+``; zero rows stay zero."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(norm > 0, np.maximum(1.0 - t / norm, 0.0), 0.0)
    return factor * v


def group_lasso(data: ObservationSet, lam: float) -> MeanSet:
    """Closed-form group lasso: ``(1 - (lam/2)/||y_j||)_+ y_j`` per group."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    return MeanSet(group_shrink(data.values, lam / 2.0))


def sparse_group_lasso(data: ObservationSet, params: LassoParams) -> MeanSet:
    """Closed-form sparse group lasso.

    Soft threshold every component at ``lambda2 / 2``, then shrink each
    thresholded vector at ``lambda1 / 2``.
    """
    yt = soft_threshold(data.values, params.lambda2 / 2.0)
    return MeanSet(group_shrink(yt, params.lambda1 / 2.0))


def sgl_objective(y, mu, params: LassoParams) -> float:
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    return float(
        np.sum((y - mu) ** 2)
        + params.lambda1 * np.linalg.norm(mu, axis=-1).sum()
        + params.lambda2 * np.abs(mu).sum()
    )


def semi_oracle_lambda2(n: int, sigma: float = 1.0) -> float:
    """Component penalty ``2 sigma sqrt(2 ln n)`` giving universal soft thresholding."""
    return 2.0 * sigma * math.sqrt(2.0 * math.log(n))


def _axis(spec) -> np.ndarray:
    start, stop, step = (float(x) for x in spec)
    if step <= 0 or stop < start:
        raise ValueError(f"bad grid axis {spec}")
    count = int(round((stop - start) / step)) + 1
    return np.round(start + step * np.arange(count), 10)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid ``(start, stop, step)`` per tuning parameter.

    Explicit value lists can be given instead via ``lambda1_values`` /
    ``lambda2_values``.
    """

    lambda1: tuple = (0.0, 20.0, 0.1)
    lambda2: tuple = (0.0, 8.0, 0.1)
    lambda1_values: tuple | None = None
    lambda2_values: tuple | None = None

    def lambda1_grid(self) -> np.ndarray:
        if self.lambda1_values is not None:
            return np.asarray(self.lambda1_values, dtype=float)
        return _axis(self.lambda1)

    def lambda2_grid(self) -> np.ndarray:
        if self.lambda2_values is not None:
            return np.asarray(self.lambda2_values, dtype=float)
        return _axis(self.lambda2)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"l1=0:20:0.1,l2=0:8:0.1"``; a single value like ``l2=1.1`` pins an axis."""
        kwargs = {}
        for part in text.split(","):
            key, _, value = part.strip().partition("=")
            if key not in ("l1", "l2"):
                raise ValueError(f"unknown grid axis {key!r}")
            name = "lambda1" if key == "l1" else "lambda2"
            pieces = value.split(":")
            if len(pieces) == 3:
                kwargs[name] = tuple(float(p) for p in pieces)
            elif len(pieces) == 1:
                kwargs[name + "_values"] = (float(pieces[0]),)
            else:
                raise ValueError(f"bad grid axis {part!r}")
        return cls(**kwargs)


@dataclass(frozen=True)
class TuneResult:
    best_params: LassoParams
    grid: tuple  # of (LassoParams, mse, se)
    mode: str
    replications: int = 0
    seed: int = 0

    @property
    def best_mse(self) -> tuple[float, float]:
        for params, mse, se in self.grid:
            if params == self.best_params:
                return mse, se
        raise LookupError("best params not on grid")

    def to_dict(self) -> dict:
        mse, se = self.best_mse
        return {
            "mode": self.mode,
            "lambda1": self.best_params.lambda1,
            "lambda2": self.best_params.lambda2,
            "mse": mse,
            "se": se,
            "replications": self.replications,
            "seed": self.seed,
            "grid_points": len(self.grid),
        }

    def grid_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda1", "lambda2", "mse", "se"])
        for p, mse, se in self.grid:
            w.writerow([repr(p.lambda1), repr(p.lambda2), repr(mse), repr(se)])
        return buf.getvalue()


def sgl_grid_mse(mu: np.ndarray, y: np.ndarray, lambda1s, lambda2: float):
    """Monte Carlo MSE and SE of the sparse group lasso over a ``lambda1`` grid.

    ``mu`` and ``y`` are stacks of shape ``(R, m, n)`` shared by all grid
    points (common random numbers). For fixed ``lambda2`` the error of the
    shrunken vector ``c * yt`` is ``c^2 |yt|^2 - 2 c <yt, mu> + |mu|^2``, so
    only three inner products per group are needed for the whole grid.
    """
    yt = soft_threshold(y, lambda2 / 2.0)
    a = np.einsum("rjk,rjk->rj", yt, yt)
    b = np.einsum("rjk,rjk->rj", yt, mu)
    c = np.einsum("rjk,rjk->rj", mu, mu)
    norm = np.sqrt(a)
    lam = np.asarray(lambda1s, dtype=float)[:, None, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(norm > 0, np.maximum(1.0 - (lam / 2.0) / norm, 0.0), 0.0)
    sse = np.sum(f * f * a - 2.0 * f * b + c, axis=-1)
    sse = np.maximum(sse, 0.0)
    reps = sse.shape[1]
    mse = sse.mean(axis=1)
    se = sse.std(axis=1, ddof=1) / math.sqrt(reps) if reps > 1 else np.full(mse.shape, np.nan)
    return mse, se


def oracle_tune(
    scenario: SimScenario,
    mode: str = "full",
    grid: GridSpec | None = None,
    replications_per_point: int | None = None,
) -> TuneResult:
    """Choose sparse group lasso parameters by minimizing simulated MSE.

    ``mode="semi"`` fixes ``lambda2 = 2 sigma sqrt(2 ln n)`` and searches
    ``lambda1`` only; ``mode="full"`` searches both. All grid points are
    scored on the same replications of ``scenario``.
    """
    if mode not in ("semi", "full"):
        raise ValueError(f"mode must be 'semi' or 'full', got {mode!r}")
    grid = grid or GridSpec()
    reps = scenario.replications if replications_per_point is None else replications_per_point
    l1 = grid.lambda1_grid()
    l2 = np.array([semi_oracle_lambda2(scenario.n, scenario.sigma)]) if mode == "semi" else grid.lambda2_grid()
    if l1.size == 0 or l2.size == 0:
        raise ValueError("empty grid")
    mu, y = generate_batch(scenario, range(reps))
    rows = []
    for lam2 in l2:
        mse, se = sgl_grid_mse(mu, y, l1, float(lam2))
        for lam1, v, s in zip(l1, mse, se):
            rows.append((LassoParams(float(lam1), float(lam2)), float(v), float(s)))
    best = min(rows, key=lambda r: (r[1], r[0].lambda1, r[0].lambda2))
    return TuneResult(best[0], tuple(rows), mode, reps, int(scenario.seed))
