import math
from dataclasses import replace

import numpy as np
import pytest

from srl import closed_form as cf
from srl.params import Theta
from srl.trainer import (TrainConfig, TrainError, linf_error,
                         mc_value_estimate, read_episode_log, run_benchmark,
                         run_randomized, run_seed_sweep, run_training,
                         write_episode_log)

SMALL = TrainConfig(T=10.0, N=200, M=5, seed=0)


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(T=-1.0)
    with pytest.raises(ValueError):
        TrainConfig(M=0)
    with pytest.raises(ValueError):
        TrainConfig(mode="bogus")
    with pytest.raises(ValueError):
        TrainConfig(lam=0.0)


def test_config_grid():
    assert SMALL.dt == pytest.approx(0.05)
    grid = SMALL.grid
    assert len(grid) == SMALL.N + 1
    assert grid[0] == 0.0 and grid[-1] == SMALL.T


def test_linf_error_zero_at_truth(params, dc, theta_star):
    assert linf_error(theta_star, dc.x_hat, params) < 1e-10
    assert linf_error(Theta(0.15, 0.4, 15.0), -2.5, params) > 1.0


def test_run_benchmark_reproducible(params):
    r1 = run_benchmark(SMALL, params)
    r2 = run_benchmark(SMALL, params)
    assert len(r1) == SMALL.M
    assert all(a == b for a, b in zip(r1, r2))


def test_run_randomized_reproducible(params):
    cfg = replace(SMALL, mode="randomized")
    r1 = run_randomized(cfg, params)
    r2 = run_randomized(cfg, params)
    assert all(a == b for a, b in zip(r1, r2))


def test_mode_guards(params):
    with pytest.raises(ValueError):
        run_benchmark(replace(SMALL, mode="randomized"), params)
    with pytest.raises(ValueError):
        run_randomized(SMALL, params)


def test_run_training_dispatch(params):
    assert run_training(SMALL, params) == run_benchmark(SMALL, params)


def test_infeasible_init_raises(params):
    cfg = replace(SMALL, theta_init=Theta(0.1, 0.26, 5.0))
    with pytest.raises((ValueError, TrainError)):
        run_training(cfg, params)


def test_theta_stays_feasible_along_run(params):
    from srl.params import theta_feasible
    for rec in run_benchmark(replace(SMALL, M=20), params):
        assert theta_feasible(rec.theta, params.beta)
        assert np.isfinite(rec.x_bar)


def test_mc_value_estimate_close_to_phi(params, dc):
    est, se = mc_value_estimate(dc.x_hat, params, x0=1.0, T=100.0, N=2000,
                                n_paths=4000, seed=3)
    assert se < 0.1
    assert abs(est - float(cf.phi(1.0, dc, params))) < 5 * se + 0.05


def test_mc_value_estimate_validation(params):
    with pytest.raises(ValueError):
        mc_value_estimate(0.0, params, 1.0, 10.0, 100, 0, seed=0)


def test_seed_sweep_medians(params):
    finals, med_linf, med_gap = run_seed_sweep(SMALL, params, [0, 1, 2])
    assert len(finals) == 3
    assert med_linf >= 0 and med_gap >= 0


def test_episode_log_roundtrip(tmp_path, params):
    records = run_benchmark(SMALL, params)
    path = tmp_path / "log.csv"
    write_episode_log(records, path)
    rows = read_episode_log(path)
    assert len(rows) == len(records)
    last = rows[-1]
    assert int(last["m"]) == records[-1].m
    assert float(last["theta1"]) == records[-1].theta.theta1
    assert float(last["x_bar"]) == records[-1].x_bar
    assert float(last["total_cost"]) == records[-1].total_cost


def test_episode_log_inf_activation(tmp_path, params):
    cfg = replace(SMALL, mode="randomized", x0=30.0, T=1.0, N=50, M=2)
    records = run_randomized(cfg, params)
    assert any(math.isinf(r.activation_time) for r in records)
    path = tmp_path / "log.csv"
    write_episode_log(records, path)
    rows = read_episode_log(path)
    assert any(r["activation_time"] == "inf" for r in rows)
