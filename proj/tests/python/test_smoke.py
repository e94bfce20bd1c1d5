import math

import pytest

import fedgame


def test_pmf_hand_values():
    assert fedgame.poibin_pmf([0.5, 0.5]) == pytest.approx([0.25, 0.5, 0.25], abs=1e-14)
    assert fedgame.poibin_pmf([0.1, 0.2, 0.3])[0] == pytest.approx(0.504, abs=1e-14)


def test_expected_duration_and_gradient():
    dm = fedgame.DurationModel.interpolate([10.0, 6.0, 4.0])
    assert fedgame.expected_duration([0.5, 0.5], dm) == pytest.approx(6.5)
    assert fedgame.duration_gradient([0.5, 0.5], 0, dm) == pytest.approx(-3.0)


def test_table_and_fit():
    rows = fedgame.load_empirical_table("averaged")
    assert len(rows) == 42
    row = next(r for r in rows if abs(r["p"] - 0.5) < 1e-9)
    assert row["d_mean"] == 40.0 and row["e_mean"] == 704.10
    dm = fedgame.fit_duration_model(degree=3)
    assert 30.0 <= dm.eval(34.5) <= 45.0
    assert dm.degree == 3


def test_game_solvers():
    cfg = fedgame.GameConfig(fedgame.fit_duration_model(degree=4), c=0.0, gamma=0.6)
    ne = fedgame.solve_symmetric_ne(cfg)
    assert ne and 0.0 <= ne[0].p_star <= 1.0
    p_opt, u_opt = fedgame.solve_social_optimum(cfg)
    rep = fedgame.price_of_anarchy(cfg)
    assert rep.poa >= 1.0
    assert rep.p_opt == pytest.approx(p_opt)
    assert fedgame.aoi(2.0 / 3.0) == pytest.approx(1.0)
    rows = fedgame.sweep(cfg, [0.0, 2.0], [0.0, 0.6], threads=2)
    assert [(r["c"], r["gamma"]) for r in rows] == [(0.0, 0.0), (0.0, 0.6), (2.0, 0.0), (2.0, 0.6)]
    assert fedgame.best_gamma(cfg, [0.35]) == 0.35


def test_errors_are_translated():
    with pytest.raises(fedgame.FedgameError, match="domain_error"):
        fedgame.aoi(0.0)
    with pytest.raises(fedgame.FedgameError, match="invalid_argument"):
        fedgame.poibin_pmf([1.5])


def test_energy():
    assert fedgame.dbm_to_watts(9.0) == pytest.approx(7.943e-3, rel=1e-3)
    t = fedgame.airtime()
    assert 2.4 < t < 2.6
    assert fedgame.tx_energy() == pytest.approx(fedgame.dbm_to_watts(9.0) * t)
    assert fedgame.calibrate_hardware_power() == pytest.approx(fedgame.EnergyParams().p_hw, rel=1e-6)


def test_monte_carlo_is_seeded():
    dm = fedgame.fit_duration_model()
    a = fedgame.monte_carlo([0.5] * 50, dm, mode="static", seed=3, reps=20, threads=1)
    b = fedgame.monte_carlo([0.5] * 50, dm, mode="static", seed=3, reps=20, threads=4)
    assert a == b
    assert math.isfinite(a["mean_energy_wh"])
