"""Gaussian sequence model: data containers, synthetic generation and risk.

Every array is stored group-major: row ``j`` holds the ``n`` components of
the ``j``-th vector, so a data matrix has shape ``(m, n)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "DimensionError",
    "ObservationSet",
    "MeanSet",
    "IndicatorMatrix",
    "SimScenario",
    "generate",
    "generate_batch",
    "sum_squared_error",
    "replication_rng",
]


class DimensionError(ValueError):
    """Raised when array shapes or counts are inconsistent."""


def _frozen_matrix(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty m x n matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Observed data ``y`` (m groups by n components) with known noise level."""

    values: np.ndarray
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_matrix(self.values, "values"))
        sigma = float(self.sigma)
        if not (np.isfinite(sigma) and sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        object.__setattr__(self, "sigma", sigma)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, ObservationSet):
            return NotImplemented
        return self.sigma == other.sigma and np.array_equal(self.values, other.values)

    def to_json(self) -> str:
        return json.dumps(
            {"m": self.m, "n": self.n, "sigma": self.sigma, "values": self.values.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> "ObservationSet":
        obj = json.loads(text)
        out = cls(np.asarray(obj["values"], dtype=float), obj["sigma"])
        _check_declared_shape(out.values, obj.get("m"), obj.get("n"))
        return out

    def to_csv(self) -> str:
        return _matrix_to_csv(self.values, f"n={self.n} sigma={self.sigma!r}")

    @classmethod
    def from_csv(cls, text: str) -> "ObservationSet":
        header, values = _matrix_from_csv(text)
        if "sigma" not in header:
            raise ValueError("CSV header lacks sigma=<value>")
        out = cls(values, float(header["sigma"]))
        _check_declared_shape(out.values, None, header.get("n"))
        return out


@dataclass(frozen=True, eq=False)
class MeanSet:
    """Mean vectors (true or estimated), shape ``(m, n)``."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_matrix(self.values, "values"))

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, MeanSet):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def to_json(self) -> str:
        return json.dumps({"m": self.m, "n": self.n, "values": self.values.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "MeanSet":
        obj = json.loads(text)
        out = cls(np.asarray(obj["values"], dtype=float))
        _check_declared_shape(out.values, obj.get("m"), obj.get("n"))
        return out

    def to_csv(self) -> str:
        return _matrix_to_csv(self.values, f"n={self.n}")

    @classmethod
    def from_csv(cls, text: str) -> "MeanSet":
        header, values = _matrix_from_csv(text)
        out = cls(values)
        _check_declared_shape(out.values, None, header.get("n"))
        return out


@dataclass(frozen=True, eq=False)
class IndicatorMatrix:
    """Binary selection pattern ``d_ij``; row ``j`` is group ``j``."""

    flags: np.ndarray

    def __post_init__(self):
        arr = np.array(self.flags, dtype=bool, copy=True)
        if arr.ndim != 2 or arr.size == 0:
            raise DimensionError(f"flags must be a non-empty m x n matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "flags", arr)

    @property
    def h(self) -> np.ndarray:
        """Number of selected components per group."""
        return self.flags.sum(axis=1)

    @property
    def m0(self) -> int:
        return int(np.count_nonzero(self.h))

    @property
    def nonzero_groups(self) -> frozenset:
        return frozenset(int(j) for j in np.flatnonzero(self.h))

    def __eq__(self, other):
        if not isinstance(other, IndicatorMatrix):
            return NotImplemented
        return np.array_equal(self.flags, other.flags)

    def __hash__(self):
        return hash((self.flags.shape, self.flags.tobytes()))


@dataclass(frozen=True)
class SimScenario:
    """Recipe for synthetic data.

    ``signal`` selects how nonzero means are drawn: ``"gaussian"`` draws
    i.i.d. N(0, tau^2), ``"sign"`` uses values ``+-tau`` with random signs.
    With ``fix_signal`` every replication reuses the means of replication 0
    and only the noise is redrawn.
    """

    m: int
    n: int
    nonzero_counts: tuple
    tau: float
    sigma: float = 1.0
    replications: int = 1000
    seed: int = 0
    signal: str = "gaussian"
    fix_signal: bool = False

    def __post_init__(self):
        counts = tuple(int(k) for k in self.nonzero_counts)
        object.__setattr__(self, "nonzero_counts", counts)
        if self.m < 1 or self.n < 1:
            raise DimensionError("m and n must be positive")
        if len(counts) != self.m:
            raise DimensionError(f"expected {self.m} nonzero counts, got {len(counts)}")
        if any(k < 0 or k > self.n for k in counts):
            raise DimensionError(f"nonzero counts must lie in [0, {self.n}]: {counts}")
        if not (self.tau >= 0 and math.isfinite(self.tau)):
            raise ValueError("tau must be finite and nonnegative")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.signal not in ("gaussian", "sign"):
            raise ValueError(f"unknown signal kind {self.signal!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def gamma(self) -> float:
        """Signal-to-noise variance ratio tau^2 / sigma^2."""
        return self.tau**2 / self.sigma**2

    def with_(self, **changes) -> "SimScenario":
        fields = {**self.to_dict(), **changes}
        return SimScenario(**fields)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "nonzero_counts": list(self.nonzero_counts),
            "tau": self.tau,
            "sigma": self.sigma,
            "replications": self.replications,
            "seed": int(self.seed),
            "signal": self.signal,
            "fix_signal": self.fix_signal,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SimScenario":
        obj = dict(obj)
        obj["nonzero_counts"] = tuple(obj["nonzero_counts"])
        return cls(**obj)

    @classmethod
    def reference_design(cls, tau: float, replications: int = 1000, seed: int = 0) -> "SimScenario":
        """Ten vectors of length 100; five zero, the rest with 100/70/50/20/5 nonzeros."""
        return cls(
            m=10,
            n=100,
            nonzero_counts=(0, 0, 0, 0, 0, 100, 70, 50, 20, 5),
            tau=tau,
            sigma=1.0,
            replications=replications,
            seed=seed,
        )


# Sub-stream tags for SeedSequence spawn keys.
_SIGNAL_STREAM = 0
_NOISE_STREAM = 1


def replication_rng(seed: int, replication_index: int, stream: int) -> np.random.Generator:
    """Philox generator keyed by ``(seed, replication_index, stream)``.

    Independent of call order and worker count.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(replication_index), int(stream)))
    return np.random.Generator(np.random.Philox(ss))


def _draw_means(scenario: SimScenario, rng: np.random.Generator) -> np.ndarray:
    mu = np.zeros((scenario.m, scenario.n))
    for j, k in enumerate(scenario.nonzero_counts):
        if k == 0:
            continue
        pos = rng.choice(scenario.n, size=k, replace=False)
        if scenario.signal == "gaussian":
            mu[j, pos] = rng.normal(0.0, scenario.tau, size=k)
        else:
            mu[j, pos] = scenario.tau * rng.choice((-1.0, 1.0), size=k)
    return mu


def generate(scenario: SimScenario, replication_index: int) -> tuple[MeanSet, ObservationSet]:
    """Draw one replication ``(means, observations)`` of ``scenario``.

    The output is a pure function of ``(scenario, replication_index)``.
    """
    if replication_index < 0:
        raise ValueError("replication_index must be nonnegative")
    signal_index = 0 if scenario.fix_signal else replication_index
    mu = _draw_means(scenario, replication_rng(scenario.seed, signal_index, _SIGNAL_STREAM))
    noise_rng = replication_rng(scenario.seed, replication_index, _NOISE_STREAM)
    y = mu + noise_rng.normal(0.0, scenario.sigma, size=mu.shape)
    return MeanSet(mu), ObservationSet(y, scenario.sigma)


def generate_batch(scenario: SimScenario, indices: Sequence[int] | None = None):
    """Stack replications into arrays ``(mu, y)`` of shape ``(R, m, n)``."""
    if indices is None:
        indices = range(scenario.replications)
    mus, ys = [], []
    for r in indices:
        mu, obs = generate(scenario, r)
        mus.append(mu.values)
        ys.append(obs.values)
    return np.stack(mus), np.stack(ys)


def sum_squared_error(estimate, truth) -> float:
    """Total squared error ``sum_j ||estimate_j - truth_j||^2``."""
    a = np.asarray(getattr(estimate, "values", estimate), dtype=float)
    b = np.asarray(getattr(truth, "values", truth), dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sum((a - b) ** 2))


def _matrix_to_csv(values: np.ndarray, header: str) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in values:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _matrix_from_csv(text: str) -> tuple[dict, np.ndarray]:
    lines = text.strip().splitlines()
    if not lines:
        raise ValueError("empty CSV")
    header = {}
    for token in lines[0].split():
        key, _, value = token.partition("=")
        header[key] = value
    rows = [[float(v) for v in row] for row in csv.reader(lines[1:]) if row]
    if len({len(r) for r in rows}) > 1:
        raise DimensionError("ragged CSV rows")
    return header, np.asarray(rows, dtype=float)


def _check_declared_shape(values: np.ndarray, m, n) -> None:
    if m is not None and int(m) != values.shape[0]:
        raise DimensionError(f"declared m={m} but found {values.shape[0]} rows")
    if n is not None and int(n) != values.shape[1]:
        raise DimensionError(f"declared n={n} but found {values.shape[1]} columns")
