import numpy as np
import pytest

from fdpair.channel import (NetworkInstance, build_instance, db_to_linear, dbm_to_watt,
                            drop_rngs, los_probability, path_gain_db, place_users)
from fdpair.config import ScenarioConfig, WeightMode


@pytest.fixture
def config():
    return ScenarioConfig()


def test_positions_inside_annulus(config):
    pos = place_users(config, np.random.default_rng(3))
    r = np.hypot(pos[:, 0], pos[:, 1])
    assert pos.shape == (2 * config.n, 2)
    assert np.all(r >= 3.0) and np.all(r <= 100.0)


def test_positions_deterministic(config):
    a = place_users(config, np.random.default_rng(11))
    b = place_users(config, np.random.default_rng(11))
    assert np.array_equal(a, b)


def test_mean_squared_radius():
    # uniform disk: E[r^2] = R^2 / 2
    cfg = ScenarioConfig(num_ul=5000, num_dl=5000, num_channels=5000)
    pos = place_users(cfg, np.random.default_rng(5))
    msr = np.mean(pos[:, 0] ** 2 + pos[:, 1] ** 2)
    assert msr == pytest.approx(100.0 ** 2 / 2, rel=0.05)


@pytest.mark.parametrize("d, los, expected", [
    (1.0, True, -34.96),
    (1.0, False, -33.36),
    (100.0, True, -80.36),
    (100.0, False, -(33.36 + 38.35 * 2)),
])
def test_path_gain_db(d, los, expected):
    assert path_gain_db(d, los) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_path_gain_rejects_nonpositive_distance(d):
    with pytest.raises(ValueError):
        path_gain_db(d, True)


def test_path_gain_monotone_in_distance():
    d = np.linspace(3, 300, 200)
    for los in (True, False):
        assert np.all(np.diff(path_gain_db(d, los)) < 0)


def test_los_probability_range():
    d = np.linspace(3, 300, 100)
    p = los_probability(d)
    assert np.all((p > 0) & (p <= 1))
    assert los_probability(18.0) == pytest.approx(1.0)


def test_unit_conversions():
    assert float(db_to_linear(-100)) == pytest.approx(1e-10, rel=1e-12)
    assert float(dbm_to_watt(-116.4)) == pytest.approx(10 ** ((-116.4 - 30) / 10), rel=1e-12)
    assert float(dbm_to_watt(-116.4)) == pytest.approx(2.29e-15, rel=1e-3)
    assert float(dbm_to_watt(24)) == pytest.approx(0.2512, rel=1e-3)


def _instance(config, seed=0, drop=0):
    rng, _ = drop_rngs(seed, drop)
    return build_instance(config, place_users(config, rng), rng)


def test_build_instance_conversions():
    inst = _instance(ScenarioConfig(si_cancellation=-100.0))
    assert inst.beta == pytest.approx(1e-10, rel=1e-12)
    assert inst.sigma2 == pytest.approx(2.2909e-15, rel=1e-4)
    assert inst.sinr_th_ul == 1.0 and inst.sinr_th_dl == 1.0


def test_weights_path_loss_compensation(config):
    inst = _instance(config)
    np.testing.assert_allclose(inst.alpha_ul * inst.g_ul, 1.0, rtol=4e-16)
    np.testing.assert_allclose(inst.alpha_dl * inst.g_dl, 1.0, rtol=4e-16)


def test_weights_sum_rate():
    inst = _instance(ScenarioConfig(weight_mode=WeightMode.SUM_RATE))
    assert np.all(inst.alpha_ul == 1) and np.all(inst.alpha_dl == 1)


def test_instance_reproducible(config):
    assert _instance(config, 4, 9) == _instance(config, 4, 9)
    assert not _instance(config, 4, 9) == _instance(config, 4, 10)


def test_gains_in_unit_interval(config):
    for drop in range(20):
        inst = _instance(config, drop=drop)
        for g in (inst.g_ul, inst.g_dl, inst.g_cross):
            assert np.all((g > 0) & (g < 1))
    # worst case: 3 m link with +5 sigma shadowing is still below 0 dB
    assert path_gain_db(3.0, True) + 5 * config.los_shadow_std < 0
    assert path_gain_db(3.0, False) + 5 * config.nlos_shadow_std < 0


def test_no_shadowing_gain_decreases_with_distance():
    cfg = ScenarioConfig(force_nlos=True, los_shadow_std=0.0, nlos_shadow_std=0.0)
    rng = np.random.default_rng(2)
    pos = place_users(cfg, rng)
    inst = build_instance(cfg, pos, rng)
    d = np.hypot(pos[:cfg.n, 0], pos[:cfg.n, 1])
    order = np.argsort(d)
    assert np.all(np.diff(inst.g_ul[order]) < 0)


def test_instance_validation():
    with pytest.raises(ValueError):
        NetworkInstance.from_gains([1.0], [1.0], [[1.0]], sigma2=0.0, beta=0.5)
    with pytest.raises(ValueError):
        NetworkInstance.from_gains([1.0], [1.0], [[1.0]], sigma2=1.0, beta=2.0)
    with pytest.raises(ValueError):
        NetworkInstance.from_gains([1.0, 1.0], [1.0], [[1.0]], sigma2=1.0, beta=0.5)
