import math

import pytest

import mpgame


def test_reference_protocol_signal_count():
    x = mpgame.sample_ecological_trace(0.5, 0.1, 0.02, 10.0, seed=7)
    assert len(x) == 500
    assert mpgame.hold_value(x, 0.019) == x.values[0]
    assert mpgame.hold_value(x, 0.02) == x.values[1]


def test_trace_round_trip(tmp_path):
    y = mpgame.sample_cost_trace(1.0, 0.25, 0.02, 1.0, seed=3)
    mpgame.save_trace(y, tmp_path / "y.csv")
    back = mpgame.load_trace(tmp_path / "y.csv")
    assert back.values == y.values


def test_beliefs():
    b = mpgame.step_discrete(mpgame.NormalGammaBelief(0.0, 1.0, 1.0, 0.0), 2.0, 1.0)
    assert (b.mu_hat, b.kappa, b.alpha, b.beta) == pytest.approx((1.0, 2.0, 1.5, 1.0))
    k = mpgame.step_discrete_kalman(mpgame.KalmanBelief(0.0, 1.0, 1.0), 2.0, 0.5)
    assert (k.tau_hat, k.P) == pytest.approx((1.0, 0.5))
    assert mpgame.kalman_variance_closed_form(1.0, 1.0, 1.0) == pytest.approx(0.5)


def test_equilibrium():
    p = mpgame.GameParams([2.0], [1.0], delta=0.5, rho=0.25)
    sol = mpgame.solve_equilibrium(p, mpgame.BeliefProfile(0.5, [1.0]))
    assert sol.controls[0] == pytest.approx(0.75)
    assert sol.effective_slope() == pytest.approx(-0.5)
    assert sol.foc_residual <= 1e-12
    assert mpgame.c_bar(0.5, 0.5, 0.25) == pytest.approx(-1.0)


def test_errors_surface_as_exceptions():
    with pytest.raises(mpgame.MpgameError):
        mpgame.c_bar(1.5, 0.5, 0.25)
    with pytest.raises(mpgame.MpgameError, match="delta"):
        mpgame.parse_config_text("[scenario]\ndelta=1.5\n")


def test_simulate_default_scenario():
    cfg = mpgame.default_config()
    cfg.horizon = 2.0
    tr = mpgame.simulate(cfg)
    assert len(tr) == 1001
    assert tr.kappa[-1] == pytest.approx(cfg_kappa_end(cfg))
    assert all(math.isfinite(s) for s in tr.S)
    again = mpgame.simulate(cfg)
    assert again.S == tr.S


def cfg_kappa_end(cfg):
    return 1.0 + cfg.horizon


def test_compare_and_verify():
    cfg = mpgame.default_config()
    rows = mpgame.compare_dt(cfg, [0.08, 0.04, 0.02])
    gaps = [r["gap_x_bar"] for r in rows]
    assert gaps == sorted(gaps, reverse=True)
    cfg.horizon = 2.0
    ok, report = mpgame.verify(cfg)
    assert ok
    assert len(mpgame.equilibrium_report(cfg, 3)) == 3


def test_file_commands(tmp_path):
    cfg = mpgame.default_config()
    cfg.horizon = 1.0
    cfg.out_dir = tmp_path
    assert mpgame.gen_traces(cfg) == 0
    assert mpgame.simulate_to_files(cfg) == 0
    seeded = (tmp_path / "trajectory.csv").read_bytes()
    cfg.seed += 1
    assert mpgame.simulate_to_files(cfg, tmp_path) == 0
    assert (tmp_path / "trajectory.csv").read_bytes() == seeded
