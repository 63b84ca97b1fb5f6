import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srl import _kernels
from srl import closed_form as cf
from srl.simulate import (EpisodeTrace, RngSeed, export_trace_csv,
                          simulate_nonrandomized, simulate_randomized,
                          step_increment, trace_total_cost)

GRID = np.linspace(0.0, 10.0, 501)


def test_rng_streams_are_independent_and_stable():
    a = RngSeed(42, 0).generator(0).standard_normal(5)
    b = RngSeed(42, 0).generator(0).standard_normal(5)
    c = RngSeed(42, 1).generator(0).standard_normal(5)
    d = RngSeed(42, 0).generator(1).standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_step_increment_deterministic_when_sigma_zero():
    rng = np.random.default_rng(0)
    assert step_increment(rng, 0.25, 0.0, 0.02) == 0.25 * 0.02


def test_step_increment_moments():
    rng = np.random.default_rng(7)
    draws = np.array([step_increment(rng, 0.25, 1.0, 0.02)
                      for _ in range(20000)])
    assert draws.mean() == pytest.approx(0.005, abs=4 * 0.1414 / 141.4)
    assert draws.std() == pytest.approx(math.sqrt(0.02), rel=0.05)


def test_nonrandomized_reproducible(params):
    t1 = simulate_nonrandomized(GRID, 1.0, 0.0, 1.23, params, RngSeed(5, 3))
    t2 = simulate_nonrandomized(GRID, 1.0, 0.0, 1.23, params, RngSeed(5, 3))
    assert np.array_equal(t1.x_post, t2.x_post)
    assert np.array_equal(t1.H, t2.H)


def test_nonrandomized_reflection_invariants(params):
    x_bar = 1.23
    tr = simulate_nonrandomized(GRID, 3.0, 0.0, x_bar, params, RngSeed(1, 0))
    tr.validate()
    assert np.all(tr.x_post <= x_bar + 1e-12)
    assert np.all(np.diff(tr.xi_post) >= -1e-12)
    # initial jump absorbed at t0
    assert tr.x_pre[0] == 3.0
    assert tr.x_post[0] == x_bar
    assert tr.xi_post[0] == pytest.approx(3.0 - x_bar)
    assert tr.activation_time == GRID[0]


def test_nonrandomized_running_cost_definition(params):
    tr = simulate_nonrandomized(GRID, 0.0, 0.0, 1.23, params, RngSeed(2, 0))
    n = tr.n_steps
    t = tr.grid[:n]
    expect = np.exp(-params.beta * t) * np.exp(params.a * tr.x_post) * tr.dt
    assert np.max(np.abs(tr.H - expect)) < 1e-14


def test_reflect_path_drift_only():
    # zero-noise increments give a deterministic ramp stuck at the barrier
    dt, x_bar = 0.02, 0.5
    incs = np.full(500, 0.25 * dt)
    _, post, overshoot = _kernels.reflect_path(0.0, x_bar, incs)
    hit = int(np.ceil(x_bar / (0.25 * dt)))
    assert np.all(np.abs(post[:hit] - 0.25 * dt * np.arange(hit)) < 1e-12)
    assert np.all(np.abs(post[hit + 1:] - x_bar) < 1e-12)
    assert np.all(np.abs(overshoot[hit + 1:] - 0.25 * dt) < 1e-12)


def test_randomized_pre_activation_is_uncontrolled(params, dc, theta_star):
    tr = simulate_randomized(GRID, 1.0, 0.0, 0.0, dc.x_hat, theta_star,
                             params, params.lam, RngSeed(11, 4))
    tr.validate()
    n = tr.n_steps
    k = n if math.isinf(tr.activation_time) \
        else int(round(tr.activation_time / tr.dt))
    assert np.array_equal(tr.x_pre[:k], tr.x_post[:k])
    assert np.all(tr.xi_post[:k] == 0.0)
    if k < n:
        assert np.all(tr.x_post[k:] <= dc.x_hat + 1e-12)


def test_randomized_eta_monotone_capped(params, dc, theta_star):
    for m in range(8):
        tr = simulate_randomized(GRID, -1.0, 0.0, 0.0, dc.x_hat, theta_star,
                                 params, params.lam, RngSeed(13, m))
        assert np.all(np.diff(tr.eta_post) >= -1e-15)
        assert np.all((tr.eta_post >= 0.0) & (tr.eta_post <= 1.0))


def test_randomized_never_activated_has_inf_time(params, dc, theta_star):
    # starting far above the boundary keeps the activation fraction tiny
    tr = simulate_randomized(np.linspace(0, 1, 51), 30.0, 0.0, 0.0, dc.x_hat,
                             theta_star, params, params.lam, RngSeed(3, 1))
    assert math.isinf(tr.activation_time)
    assert np.all(tr.xi_post == 0.0)


def test_trace_total_cost_manual(params):
    grid = np.linspace(0.0, 0.1, 3)
    tr = simulate_nonrandomized(grid, 2.0, 0.0, 1.0, params, RngSeed(9, 0))
    n = tr.n_steps
    t = grid[:n]
    disc = np.exp(-params.beta * t)
    manual = float(np.sum(tr.H) + np.sum(tr.c)
                   + params.c * np.sum(disc * (tr.xi_post - tr.xi_pre)))
    assert trace_total_cost(tr, params) == pytest.approx(manual, rel=1e-12)


def test_export_trace_csv(tmp_path, params):
    tr = simulate_nonrandomized(np.linspace(0, 1, 11), 1.0, 0.0, 0.5,
                                params, RngSeed(4, 2))
    path = tmp_path / "trace.csv"
    export_trace_csv(tr, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("n,t,x_pre")
    assert len([ln for ln in lines if not ln.startswith("#")]) == 1 + tr.n_steps
    assert any(ln.startswith("# activation_time") for ln in lines)


def test_grid_validation(params):
    with pytest.raises(ValueError):
        simulate_nonrandomized(np.array([0.0, 0.1, 0.3]), 1.0, 0.0, 0.5,
                               params, RngSeed(0, 0))
    # a single-point grid is legal and yields an empty, zero-step trace
    tr = simulate_nonrandomized(np.array([0.0]), 1.0, 0.0, 0.5, params,
                                RngSeed(0, 0))
    assert tr.n_steps == 0


@given(st.floats(min_value=-3, max_value=3),
       st.floats(min_value=-1, max_value=2), st.integers(0, 50))
@settings(max_examples=30, deadline=None)
def test_kernel_backends_agree(x0, x_bar, seed):
    rng = np.random.default_rng(seed)
    incs = 0.25 * 0.02 + math.sqrt(0.02) * rng.standard_normal(200)
    pre_a, post_a, ov_a = _kernels.reflect_path(x0, x_bar, incs)
    pre_b, post_b, ov_b = _kernels._reflect_path_np(x0, x_bar, incs)
    assert np.allclose(pre_a, pre_b, atol=1e-12)
    assert np.allclose(post_a, post_b, atol=1e-12)
    assert np.allclose(ov_a, ov_b, atol=1e-12)


def test_kernel_totals_backends_agree():
    rng = np.random.default_rng(123)
    incs = 0.25 * 0.02 + math.sqrt(0.02) * rng.standard_normal((64, 300))
    got = _kernels.reflect_totals(1.0, 0.2, incs, 0.1, 1.0, 0.1, 0.02)
    want = _kernels._reflect_totals_np(1.0, 0.2, incs, 0.1, 1.0, 0.1, 0.02)
    assert np.allclose(got, want, rtol=1e-12, atol=1e-12)
