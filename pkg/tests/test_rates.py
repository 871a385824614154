import math

import numpy as np
import pytest

from sgmap.rates import (
    DENSE_ETA,
    RateSpec,
    classify_regime,
    group_rate_bound,
    rate_lookup,
    rate_sweep,
    sparse_boundary,
    sweep_csv,
)


def test_l0_rates():
    assert rate_lookup(RateSpec("l0", 0, 0.5, 100, sigma=2.0)) == 400.0
    eta = 0.05
    assert rate_lookup(RateSpec("l0", 0, eta, 100)) == pytest.approx(100 * eta * math.log(1 / eta), rel=1e-14)


def test_lp_sparse_rates():
    eta, n = 0.1, 1000
    assert rate_lookup(RateSpec("strong-lp", 1.0, eta, n)) == pytest.approx(n * eta * math.sqrt(math.log(1 / eta)))
    assert rate_lookup(RateSpec("strong-lp", 3.0, eta, n)) == pytest.approx(n * eta**2)
    strong = rate_lookup(RateSpec("strong-lp", 2.0, eta, n))
    weak = rate_lookup(RateSpec("weak-mp", 2.0, eta, n))
    assert weak == pytest.approx(strong * math.log(eta**-2))


def test_super_sparse_rates():
    n = 10_000
    eta = 0.5 * sparse_boundary(1.0, n)
    spec = RateSpec("strong-lp", 1.0, eta, n)
    assert spec.regime == "super-sparse"
    assert rate_lookup(spec) == pytest.approx(n**2 * eta**2)
    with pytest.raises(ValueError):
        rate_lookup(RateSpec("l0", 0, 0.01, 100, regime="super-sparse"))


def test_dense_is_sigma2_n_everywhere():
    for ball, p in (("l0", 0), ("strong-lp", 0.5), ("weak-mp", 2.0), ("strong-lp", 4.0)):
        assert rate_lookup(RateSpec(ball, p, 0.9, 50, sigma=1.5)) == pytest.approx(2.25 * 50)


def test_spec_validation():
    with pytest.raises(ValueError):
        RateSpec("l1", 1.0, 0.1, 10)
    with pytest.raises(ValueError):
        RateSpec("l0", 1.0, 0.1, 10)
    with pytest.raises(ValueError):
        RateSpec("l0", 0, 0.001, 100)
    with pytest.raises(ValueError):
        RateSpec("strong-lp", 1.0, 0.9, 100, regime="sparse")


def test_regimes_agree_with_classifier_on_random_specs():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        ball = str(rng.choice(["l0", "strong-lp", "weak-mp"]))
        p = 0.0 if ball == "l0" else float(rng.uniform(0.1, 4))
        n = int(rng.integers(2, 10_000))
        eta = float(np.exp(rng.uniform(math.log(1.0 / n), 0)))
        regime = classify_regime(ball, p, eta, n)
        spec = RateSpec(ball, p, eta, n)
        assert spec.regime == regime
        if regime == "dense":
            assert eta >= DENSE_ETA
        elif regime == "super-sparse":
            assert ball != "l0" and eta < sparse_boundary(p, n)
        assert rate_lookup(spec) >= 0


def test_group_rate_bound():
    dense = RateSpec("l0", 0, 0.9, 10)
    assert group_rate_bound([dense] * 2, 100, 2) == 20.0
    sparse = RateSpec("l0", 0, 0.1, 10)
    assert group_rate_bound([sparse], 1000, 1) == pytest.approx(math.log(1000))
    assert group_rate_bound([], 10, 0) == 0.0


def test_sweep_single_group_between_term():
    rows = rate_sweep([(128, 4, 1, 0.25), (256, 4, 1, 0.25)], reps=30, seed=1)
    for r in rows:
        assert r.bound == pytest.approx(max(4 * 0.25 * math.log(4), math.log(r.m)))
    ratios = [r.ratio for r in rows]
    assert max(ratios) / min(ratios) < 3


def test_sweep_dense():
    rows = rate_sweep([(8, 32, 4, 1.0)], reps=30, seed=2)
    assert rows[0].nonzeros == 32
    assert rows[0].risk <= 4 * 4 * 32


def test_sweep_csv_columns():
    rows = rate_sweep([(4, 8, 2, 0.25)], reps=5)
    lines = sweep_csv(rows).splitlines()
    assert lines[0] == "m,n,m0,eta,nonzeros,risk,se,bound,ratio" and len(lines) == 2
