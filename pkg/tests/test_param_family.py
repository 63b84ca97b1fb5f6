import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srl import closed_form as cf
from srl.params import (Theta, clip_full, clip_uncontrolled, coeffs_of,
                        fd_grad_theta_phi, fd_grad_theta_u,
                        fd_grad_theta_u_inf, grad_theta_phi, grad_theta_u,
                        grad_theta_u_inf, mu_of_theta, phi_theta,
                        sigma_of_theta, theta_feasible, u_inf_theta, u_theta)

BETA = 0.1
C = 1.0


def feasible_thetas():
    """Strategy over the feasible parameter region (theta2 strictly inside
    its theta1/theta3 dependent interval)."""
    def build(t1, t3, frac):
        ratio = BETA / (BETA - 1.0 / t3)
        lo, hi = math.sqrt(ratio) * t1, ratio * t1
        return Theta(t1, lo + frac * (hi - lo), t3)
    return st.builds(build,
                     st.floats(min_value=0.02, max_value=0.5),
                     st.floats(min_value=11.0, max_value=40.0),
                     st.floats(min_value=0.05, max_value=0.95))


def test_truth_recovers_environment(params, dc, theta_star):
    assert mu_of_theta(theta_star, params.beta) == pytest.approx(
        params.mu, abs=1e-12)
    assert sigma_of_theta(theta_star, params.beta) == pytest.approx(
        params.sigma, abs=1e-12)
    c_b, c_v = coeffs_of(theta_star, dc.x_hat, params.c)
    assert c_b == pytest.approx(dc.c_b, abs=1e-12)
    assert c_v == pytest.approx(float(cf.phi(dc.x_hat, dc, params)),
                                abs=1e-12)


def test_phi_theta_at_truth_is_phi(params, dc, theta_star):
    xs = np.linspace(-60, 60, 501)
    got = phi_theta(xs, theta_star, dc.x_hat, params.c)
    want = cf.phi(xs, dc, params)
    assert np.max(np.abs(got - want)) < 1e-10


def test_phi_theta_linear_above_boundary(theta_star, dc):
    x_bar = 0.5
    xs = np.array([x_bar, x_bar + 1.0, x_bar + 2.0])
    vals = phi_theta(xs, theta_star, x_bar, C)
    d1 = vals[1] - vals[0]
    d2 = vals[2] - vals[1]
    assert d1 == pytest.approx(C, abs=1e-12)
    assert d2 == pytest.approx(C, abs=1e-12)


def test_u_theta_reduces_to_phi_after_activation(theta_star, dc):
    x_bar = dc.x_hat
    xs = np.linspace(-5, 5, 11)
    t = np.full_like(xs, 3.0)
    r = np.full_like(xs, 3.0)  # activation already happened, zero lag
    got = u_theta(xs, t, r, theta_star, x_bar, C, BETA)
    want = phi_theta(xs, theta_star, x_bar, C)
    assert np.max(np.abs(got - want)) < 1e-12


def test_u_theta_long_horizon_tends_to_uncontrolled(theta_star, dc):
    x = 0.0
    far = u_theta(x, 0.0, 600.0, theta_star, dc.x_hat, C, BETA)
    assert far == pytest.approx(float(u_inf_theta(x, theta_star)), abs=1e-8)


def test_u_theta_matches_truth_psi(params, dc, theta_star):
    # before activation the parametric time value equals the lag integral
    for p, q in [(0.0, 0.5), (2.0, 1.0), (-4.0, 3.0)]:
        got = float(u_theta(p, 0.0, q, theta_star, dc.x_hat, params.c,
                            params.beta))
        want = cf.psi(p, q, dc, params)
        assert got == pytest.approx(want, rel=1e-10)


@given(feasible_thetas(), st.floats(min_value=-20, max_value=20))
@settings(max_examples=40, deadline=None)
def test_grad_phi_matches_finite_difference(theta, x):
    x_bar = 0.3
    g = grad_theta_phi(np.array([x]), theta, x_bar, C)[:, 0]
    fd = fd_grad_theta_phi(np.array([x]), theta, x_bar, C)[:, 0]
    scale = 1.0 + np.abs(fd)
    assert np.max(np.abs(g - fd) / scale) < 5e-5


@given(feasible_thetas(), st.floats(min_value=-15, max_value=15),
       st.floats(min_value=0.0, max_value=4.0))
@settings(max_examples=40, deadline=None)
def test_grad_u_matches_finite_difference(theta, x, q):
    x_bar = -0.5
    xs, ts, rs = np.array([x]), np.array([0.0]), np.array([q])
    g = grad_theta_u(xs, ts, rs, theta, x_bar, C, BETA)[:, 0]
    fd = fd_grad_theta_u(xs, ts, rs, theta, x_bar, C, BETA)[:, 0]
    scale = 1.0 + np.abs(fd)
    assert np.max(np.abs(g - fd) / scale) < 5e-5


@given(feasible_thetas(), st.floats(min_value=-20, max_value=10))
@settings(max_examples=40, deadline=None)
def test_grad_u_inf_matches_finite_difference(theta, x):
    g = grad_theta_u_inf(np.array([x]), theta)[:, 0]
    fd = fd_grad_theta_u_inf(np.array([x]), theta)[:, 0]
    scale = 1.0 + np.abs(fd)
    assert np.max(np.abs(g - fd) / scale) < 5e-5
    assert g[1] == 0.0  # second parameter never enters the uncontrolled value


def test_feasibility_boundary_cases(theta_star):
    assert theta_feasible(theta_star, BETA)
    assert not theta_feasible(Theta(-0.1, 0.26, 14.0), BETA)
    assert not theta_feasible(Theta(0.1, 0.26, 9.0), BETA)  # theta3 <= 1/beta
    assert not theta_feasible(Theta(0.1, 0.1, 14.0), BETA)  # theta2 too small
    assert not theta_feasible(Theta(0.1, 0.9, 14.0), BETA)  # theta2 too large


@given(st.floats(min_value=0.02, max_value=0.5),
       st.floats(min_value=-2.0, max_value=2.0),
       st.floats(min_value=10.5, max_value=40.0))
@settings(max_examples=60, deadline=None)
def test_clip_full_lands_feasible(t1, t2, t3):
    clipped = clip_full(Theta(t1, t2, t3), BETA, delta_bc=0.001)
    assert theta_feasible(clipped, BETA)
    assert clipped.theta1 == t1
    assert clipped.theta3 == t3


def test_clip_full_noop_inside(theta_star):
    out = clip_full(theta_star, BETA)
    assert out == theta_star


def test_clip_uncontrolled_midpoint(theta_star):
    out = clip_uncontrolled(theta_star, BETA)
    ratio = BETA / (BETA - 1.0 / theta_star.theta3)
    lo = math.sqrt(ratio) * theta_star.theta1
    hi = ratio * theta_star.theta1
    assert out.theta2 == pytest.approx(0.5 * (lo + hi), abs=1e-15)
    assert out.theta1 == theta_star.theta1
    assert out.theta3 == theta_star.theta3
    assert theta_feasible(out, BETA)


def test_theta_array_roundtrip(theta_star):
    arr = theta_star.as_array()
    assert arr.shape == (3,)
    assert Theta.from_array(arr) == theta_star
