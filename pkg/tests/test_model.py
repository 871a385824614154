import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sgmap.model import (
    DimensionError,
    IndicatorMatrix,
    MeanSet,
    ObservationSet,
    SimScenario,
    generate,
    generate_batch,
    sum_squared_error,
)


@pytest.fixture
def ref_scenario():
    return SimScenario.reference_design(tau=3.0, replications=10, seed=7)


def test_generate_reference_design_support(ref_scenario):
    mu, obs = generate(ref_scenario, 0)
    assert mu.values.shape == (10, 100)
    assert np.count_nonzero(mu.values) == 245
    assert list(np.count_nonzero(mu.values, axis=1)) == [0] * 5 + [100, 70, 50, 20, 5]
    assert obs.sigma == 1.0


def test_generate_zero_signal_is_pure_noise():
    sc = SimScenario(3, 4, (0, 0, 0), tau=10.0, seed=1)
    mu, obs = generate(sc, 2)
    assert not mu.values.any()
    assert np.all(obs.values != 0)


def test_generate_deterministic(ref_scenario):
    a_mu, a_y = generate(ref_scenario, 3)
    b_mu, b_y = generate(ref_scenario, 3)
    assert a_mu == b_mu and a_y == b_y
    assert a_y.values.tobytes() == b_y.values.tobytes()


def test_replications_differ(ref_scenario):
    _, y0 = generate(ref_scenario, 0)
    _, y1 = generate(ref_scenario, 1)
    assert not np.array_equal(y0.values, y1.values)


def test_fix_signal_shares_means_only(ref_scenario):
    sc = ref_scenario.with_(fix_signal=True)
    mu0, y0 = generate(sc, 0)
    mu5, y5 = generate(sc, 5)
    assert mu0 == mu5
    assert not np.array_equal(y0.values, y5.values)


def test_sign_signal_values():
    sc = SimScenario(2, 50, (10, 0), tau=5.0, seed=3, signal="sign")
    mu, _ = generate(sc, 0)
    nz = mu.values[mu.values != 0]
    assert nz.size == 10 and set(np.abs(nz)) == {5.0}


def test_batch_matches_single(ref_scenario):
    mu, y = generate_batch(ref_scenario, [4, 2])
    m4, y4 = generate(ref_scenario, 4)
    assert np.array_equal(mu[0], m4.values) and np.array_equal(y[0], y4.values)
    _, y2 = generate(ref_scenario, 2)
    assert np.array_equal(y[1], y2.values)


def test_invalid_counts():
    with pytest.raises(DimensionError):
        SimScenario(2, 3, (4, 0), tau=1.0)
    with pytest.raises(DimensionError):
        SimScenario(2, 3, (1,), tau=1.0)


def test_noise_variance_moment():
    sc = SimScenario(5, 200, (0,) * 5, tau=1.0, sigma=2.0, replications=50, seed=11)
    _, y = generate_batch(sc)
    assert abs(y.var() / 4.0 - 1.0) < 0.05


def test_signal_energy_expectation():
    # 245 nonzeros with variance 9 each: E sum mu^2 = 2205
    sc = SimScenario.reference_design(3.0, replications=400, seed=5)
    mu, _ = generate_batch(sc)
    energy = (mu**2).sum(axis=(1, 2))
    se = energy.std(ddof=1) / np.sqrt(energy.size)
    assert abs(energy.mean() - 2205.0) < 4 * se


def test_sse_trivial_cases():
    t = MeanSet(np.arange(6.0).reshape(2, 3))
    assert sum_squared_error(t, t) == 0.0
    assert sum_squared_error(MeanSet(t.values + 1), t) == 6.0
    with pytest.raises(DimensionError):
        sum_squared_error(MeanSet(np.zeros((2, 2))), t)


def test_sse_matches_double_loop():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
    expected = 0.0
    for j in range(2):
        for i in range(2):
            expected += (a[j, i] - b[j, i]) ** 2
    assert sum_squared_error(MeanSet(a), MeanSet(b)) == pytest.approx(expected, rel=1e-15)


# magnitudes >= 1e-100 so squared differences cannot underflow to zero
finite = st.one_of(st.just(0.0), st.floats(1e-100, 1e6), st.floats(-1e6, -1e-100))


@given(arrays(float, (3, 4), elements=finite), arrays(float, (3, 4), elements=finite))
def test_sse_symmetric_nonnegative(a, b):
    ab = sum_squared_error(a, b)
    assert ab == sum_squared_error(b, a) >= 0
    assert (ab == 0) == np.array_equal(a, b)


@settings(max_examples=25)
@given(st.integers(0, 2**64 - 1), st.integers(0, 10_000))
def test_generate_pure_function(seed, rep):
    sc = SimScenario(2, 5, (5, 2), tau=1.5, seed=seed)
    assert generate(sc, rep) == generate(sc, rep)


def test_observation_validation():
    with pytest.raises(ValueError):
        ObservationSet(np.zeros((2, 2)), 0.0)
    with pytest.raises(ValueError):
        ObservationSet(np.array([[np.inf]]), 1.0)
    with pytest.raises(DimensionError):
        ObservationSet(np.zeros((0, 3)), 1.0)


def test_values_are_immutable():
    obs = ObservationSet(np.zeros((2, 2)), 1.0)
    with pytest.raises(ValueError):
        obs.values[0, 0] = 1.0


def test_indicator_counts():
    d = IndicatorMatrix([[0, 0, 0], [1, 0, 1], [0, 1, 0]])
    assert list(d.h) == [0, 2, 1]
    assert d.m0 == 2
    assert d.nonzero_groups == {1, 2}


def test_csv_json_round_trip():
    rng = np.random.default_rng(1)
    obs = ObservationSet(rng.normal(size=(3, 5)), 0.7)
    assert ObservationSet.from_csv(obs.to_csv()) == obs
    assert ObservationSet.from_json(obs.to_json()) == obs
    assert obs.to_csv().splitlines()[0] == "n=5 sigma=0.7"
    mu = MeanSet(rng.normal(size=(2, 4)))
    assert MeanSet.from_csv(mu.to_csv()) == mu
    assert MeanSet.from_json(mu.to_json()) == mu


def test_json_declared_shape_checked():
    with pytest.raises(DimensionError):
        ObservationSet.from_json('{"m": 3, "n": 1, "sigma": 1.0, "values": [[1.0], [2.0]]}')


def test_scenario_dict_round_trip(ref_scenario):
    assert SimScenario.from_dict(ref_scenario.to_dict()) == ref_scenario
    assert ref_scenario.gamma == 9.0
