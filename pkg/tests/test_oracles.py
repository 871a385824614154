import math

import numpy as np
import pytest

from sgmap.estimator import PenaltyConfig, estimate, pen_between, pen_within, select_h
from sgmap.lasso import LassoParams, sgl_objective, sparse_group_lasso
from sgmap.model import ObservationSet
from sgmap.oracles import BudgetExceeded, OracleBudget, exhaustive_map, numeric_sgl, posterior_argmax
from sgmap.priors import binomial_prior, truncated_geometric_prior


def small_preset_configs(m, n):
    out = []
    for g in (1.0, 9.0, 25.0):
        out.append(PenaltyConfig.binomial(m, n, g))
        out.append(PenaltyConfig.geometric(m, n, g))
        out.append(PenaltyConfig.geometric(m, n, g, q0=0.7, q=0.7))
    return out


def test_one_cell_two_case_rule():
    cfg = PenaltyConfig(1.0, 1.0, binomial_prior(1, 0.4), binomial_prior(1, 0.3))
    cut = pen_within(cfg, 0, 1) + pen_between(cfg, 1) - pen_between(cfg, 0)
    for y in (math.sqrt(cut) - 0.01, math.sqrt(cut) + 0.01, 10.0):
        d, _ = exhaustive_map(ObservationSet([[y]], 1.0), cfg)
        assert bool(d.flags[0, 0]) == (y * y > cut)


@pytest.mark.parametrize("cfg", small_preset_configs(2, 3))
def test_zero_data_selects_nothing(cfg):
    data = ObservationSet(np.zeros((2, 3)), 1.0)
    d, _ = exhaustive_map(data, cfg)
    assert not d.flags.any()
    assert not posterior_argmax(data, cfg).flags.any()


def test_posterior_matches_penalized_criterion():
    rng = np.random.default_rng(8)
    for _ in range(200):
        m, n = rng.integers(1, 4), rng.integers(1, 5)
        if m * n > 12:
            continue
        g = float(rng.choice([0.5, 1.0, 9.0]))
        cfg = PenaltyConfig(
            g,
            float(rng.uniform(0.5, 2)),
            truncated_geometric_prior(m, float(rng.uniform(0.1, 0.9)), include_zero=True),
            binomial_prior(n, float(rng.uniform(0.05, 0.5))),
        )
        data = ObservationSet(rng.normal(size=(m, n)) * 2.5, cfg.sigma)
        assert posterior_argmax(data, cfg) == exhaustive_map(data, cfg)[0]


def test_single_group_is_top_h_thresholding():
    rng = np.random.default_rng(4)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        cfg = PenaltyConfig(2.0, 1.0, binomial_prior(1, 0.5), truncated_geometric_prior(n, 0.4))
        y = rng.normal(size=n) * 2
        d = posterior_argmax(ObservationSet(y[None, :], 1.0), cfg)
        if d.flags.any():
            h, _ = select_h(y, cfg)
            top = set(np.argsort(-np.abs(y), kind="stable")[:h])
            assert set(np.flatnonzero(d.flags[0])) == top


def test_budget():
    cfg = PenaltyConfig.binomial(3, 7, 1.0)
    with pytest.raises(BudgetExceeded):
        exhaustive_map(ObservationSet(np.zeros((3, 7)), 1.0), cfg)
    with pytest.raises(ValueError):
        OracleBudget(max_cells=21)
    with pytest.raises(ValueError):
        OracleBudget(tolerance=0.1)


def test_exhaustive_objective_never_above_estimator():
    rng = np.random.default_rng(12)
    for _ in range(100):
        cfg = PenaltyConfig.geometric(3, 4, 1.0, q0=0.5, q=0.5)
        data = ObservationSet(rng.normal(size=(3, 4)) * 3, 1.0)
        _, best = exhaustive_map(data, cfg)
        assert best <= estimate(data, cfg).objective + 1e-9


def test_numeric_sgl_limits():
    rng = np.random.default_rng(0)
    data = ObservationSet(rng.normal(size=(3, 3)), 1.0)
    np.testing.assert_allclose(numeric_sgl(data, LassoParams(0.0, 0.0)).values, data.values, atol=1e-12)
    assert not numeric_sgl(data, LassoParams(1e6, 0.0)).values.any()


def test_numeric_sgl_matches_closed_form_3x3():
    rng = np.random.default_rng(1)
    for _ in range(50):
        data = ObservationSet(rng.normal(size=(3, 3)) * 2, 1.0)
        p = LassoParams(float(rng.uniform(0, 5)), float(rng.uniform(0, 3)))
        ref = numeric_sgl(data, p).values
        closed = sparse_group_lasso(data, p).values
        assert np.max(np.abs(ref - closed)) <= 1e-6
        assert sgl_objective(data.values, closed, p) <= sgl_objective(data.values, ref, p) + 1e-12
