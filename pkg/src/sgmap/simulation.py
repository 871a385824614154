"""Monte Carlo risk evaluation and the standard estimator comparison."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .estimator import PenaltyConfig, estimate_batch
from .lasso import GridSpec, TuneResult, group_shrink, oracle_tune, soft_threshold
from .model import SimScenario, generate_batch

__all__ = [
    "EstimatorSpec",
    "MSEReport",
    "COMPARED_ESTIMATORS",
    "DEFAULT_GAMMAS",
    "run_mse",
    "replication_sse",
    "reproduce_table3",
    "reproduce_table2",
    "table3_csv",
    "parse_table3_csv",
    "table2_csv",
    "tuning_seed",
]

DEFAULT_GAMMAS = (1.0, 9.0, 25.0)

_KINDS = ("map-binomial", "map-geometric", "sgl-semi", "sgl-full", "sgl", "group-lasso", "zero")


@dataclass(frozen=True)
class EstimatorSpec:
    """Which estimator to run, with its hyperparameters.

    Unused fields stay ``None``. For ``map-binomial`` a missing ``xi0``
    means ``1/m`` and a missing ``xi`` the universal-threshold rate. For
    ``map-geometric``, ``q_convention="success"`` reads ``q0``/``q`` as the
    success probability of a geometric law (mass proportional to
    ``(1 - q)**k``) while ``"ratio"`` uses mass proportional to ``q**k``.
    ``gamma`` overrides the run-level value for the MAP penalties.
    """

    kind: str
    xi0: float | None = None
    xi: float | None = None
    q0: float | None = None
    q: float | None = None
    q_convention: str | None = None
    lambda1: float | None = None
    lambda2: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        if self.kind == "sgl" and (self.lambda1 is None or self.lambda2 is None):
            raise ValueError("sgl needs lambda1 and lambda2")
        if self.kind == "group-lasso" and self.lambda1 is None:
            raise ValueError("group-lasso needs lambda1")
        if self.q_convention not in (None, "success", "ratio"):
            raise ValueError("q_convention must be 'success' or 'ratio'")

    @property
    def label(self) -> str:
        params = [f"{f.name}={getattr(self, f.name)!r}" for f in fields(self)[1:] if getattr(self, f.name) is not None]
        return f"{self.kind}({','.join(params)})" if params else self.kind

    @classmethod
    def parse(cls, label: str) -> "EstimatorSpec":
        kind, _, rest = label.partition("(")
        kwargs = {}
        if rest:
            for item in rest.rstrip(")").split(","):
                key, _, value = item.partition("=")
                kwargs[key] = value.strip("'") if key == "q_convention" else float(value)
        return cls(kind, **kwargs)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, obj: dict) -> "EstimatorSpec":
        return cls(**obj)

    def penalty_config(self, m: int, n: int, gamma: float, sigma: float) -> PenaltyConfig:
        g = self.gamma if self.gamma is not None else gamma
        if self.kind == "map-binomial":
            return PenaltyConfig.binomial(m, n, g, sigma, xi0=self.xi0, xi=self.xi)
        if self.kind == "map-geometric":
            q0 = 0.3 if self.q0 is None else self.q0
            q = 0.3 if self.q is None else self.q
            if (self.q_convention or "success") == "success":
                q0, q = 1.0 - q0, 1.0 - q
            return PenaltyConfig.geometric(m, n, g, sigma, q0=q0, q=q)
        raise ValueError(f"{self.kind} is not a MAP estimator")


# The four estimators compared in the simulation tables.
COMPARED_ESTIMATORS = (
    EstimatorSpec("map-binomial"),
    EstimatorSpec("map-geometric", q0=0.3, q=0.3, q_convention="success"),
    EstimatorSpec("sgl-semi"),
    EstimatorSpec("sgl-full"),
)


@dataclass(frozen=True)
class MSEReport:
    estimator: EstimatorSpec
    gamma: float
    mse: float
    standard_error: float
    replications: int
    seed: int


def tuning_seed(seed: int) -> int:
    """Seed for oracle tuning runs, independent of the evaluation stream."""
    return int(np.random.SeedSequence([int(seed), 0x7475_6E65]).generate_state(1, np.uint64)[0])


def _apply(spec: EstimatorSpec, y: np.ndarray, scenario: SimScenario, gamma: float) -> np.ndarray:
    if spec.kind.startswith("map-"):
        cfg = spec.penalty_config(scenario.m, scenario.n, gamma, scenario.sigma)
        return estimate_batch(y, cfg)
    if spec.kind in ("sgl", "sgl-semi", "sgl-full"):
        if spec.lambda1 is None or spec.lambda2 is None:
            raise ValueError(f"{spec.kind} must be tuned before it can be applied")
        return group_shrink(soft_threshold(y, spec.lambda2 / 2.0), spec.lambda1 / 2.0)
    if spec.kind == "group-lasso":
        return group_shrink(y, spec.lambda1 / 2.0)
    return np.zeros_like(y)


def resolve(spec: EstimatorSpec, scenario: SimScenario, grid: GridSpec | None = None, tune_reps: int | None = None):
    """Fill in oracle-tuned parameters for ``sgl-semi`` / ``sgl-full``.

    Returns ``(spec, TuneResult or None)``; other kinds pass through.
    """
    if spec.kind not in ("sgl-semi", "sgl-full") or (spec.lambda1 is not None and spec.lambda2 is not None):
        return spec, None
    tuning = scenario.with_(seed=tuning_seed(scenario.seed))
    mode = "semi" if spec.kind == "sgl-semi" else "full"
    result = oracle_tune(tuning, mode, grid, tune_reps if tune_reps is not None else scenario.replications)
    return replace(spec, lambda1=result.best_params.lambda1, lambda2=result.best_params.lambda2), result


def replication_sse(scenario: SimScenario, spec: EstimatorSpec, gamma: float | None = None, threads: int = 1, block: int = 100) -> np.ndarray:
    """Per-replication total squared error, in replication order."""
    gamma = scenario.gamma if gamma is None else gamma
    starts = range(0, scenario.replications, block)

    def work(start):
        idx = range(start, min(start + block, scenario.replications))
        mu, y = generate_batch(scenario, idx)
        est = _apply(spec, y, scenario, gamma)
        return np.sum((est - mu) ** 2, axis=(1, 2))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    return np.concatenate(parts)


def run_mse(
    scenario: SimScenario,
    estimator: EstimatorSpec,
    gamma: float | None = None,
    threads: int = 1,
    grid: GridSpec | None = None,
    tune_reps: int | None = None,
) -> MSEReport:
    """Monte Carlo MSE of ``estimator`` over ``scenario.replications`` draws.

    ``gamma`` defaults to ``tau^2 / sigma^2``. Oracle-tuned lasso variants
    are tuned on a separate stream of replications first; the returned
    report carries the tuned parameters in its estimator spec.
    """
    gamma = scenario.gamma if gamma is None else float(gamma)
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    spec, _ = resolve(estimator, scenario, grid, tune_reps)
    sse = replication_sse(scenario, spec, gamma, threads)
    reps = sse.size
    se = float(np.std(sse, ddof=1) / math.sqrt(reps)) if reps > 1 else float("nan")
    return MSEReport(spec, gamma, float(np.mean(sse)), se, reps, int(scenario.seed))


def reproduce_table3(
    reps: int = 1000,
    seed: int = 0,
    threads: int = 1,
    grid: GridSpec | None = None,
    tune_reps: int | None = None,
    estimators=COMPARED_ESTIMATORS,
    gammas=DEFAULT_GAMMAS,
) -> list[MSEReport]:
    """MSE of the four estimators for each gamma, with ``tau = sqrt(gamma)``."""
    if reps < 100:
        raise ValueError("reps must be >= 100")
    reports = []
    for g in gammas:
        scenario = SimScenario.reference_design(math.sqrt(g), reps, seed)
        for spec in estimators:
            reports.append(run_mse(scenario, spec, g, threads, grid, tune_reps))
    return reports


def reproduce_table2(grid: GridSpec | None = None, reps: int = 1000, seed: int = 0, gammas=DEFAULT_GAMMAS) -> list[tuple[float, TuneResult]]:
    """Fully oracle ``(lambda1, lambda2)`` for each gamma."""
    out = []
    for g in gammas:
        scenario = SimScenario.reference_design(math.sqrt(g), reps, seed)
        out.append((g, oracle_tune(scenario, "full", grid, reps)))
    return out


TABLE3_COLUMNS = ("gamma", "estimator", "mse", "se", "reps", "seed")


def table3_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE3_COLUMNS)
    for r in reports:
        w.writerow([repr(r.gamma), r.estimator.label, repr(r.mse), repr(r.standard_error), r.replications, r.seed])
    return buf.getvalue()


def parse_table3_csv(text: str) -> list[MSEReport]:
    rows = csv.DictReader(io.StringIO(text))
    return [
        MSEReport(
            EstimatorSpec.parse(row["estimator"]),
            float(row["gamma"]),
            float(row["mse"]),
            float(row["se"]),
            int(row["reps"]),
            int(row["seed"]),
        )
        for row in rows
    ]


def table2_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma", "lambda1", "lambda2", "mse", "se", "reps", "seed"])
    for g, res in results:
        mse, se = res.best_mse
        w.writerow([repr(g), repr(res.best_params.lambda1), repr(res.best_params.lambda2), repr(mse), repr(se), res.replications, res.seed])
    return buf.getvalue()
