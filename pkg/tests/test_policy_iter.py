import warnings

import numpy as np
import pytest

from srl.params import Theta
from srl.policy_iter import PiConfig, iterate_boundary, q_functions

BETA = 0.1
C = 1.0


def test_q_functions_at_truth(params, dc, theta_star):
    # below the boundary the generator residual vanishes, above it the
    # gradient constraint binds with equality
    for x in np.linspace(dc.x_hat - 6, dc.x_hat - 0.01, 30):
        q0, q1 = q_functions(x, theta_star, dc.x_hat, C, BETA)
        assert abs(q1) < 1e-10
        assert q0 > 0
    for x in np.linspace(dc.x_hat, dc.x_hat + 6, 30):
        q0, q1 = q_functions(x, theta_star, dc.x_hat, C, BETA)
        assert abs(q0) < 1e-12
        assert q1 > -1e-10


def test_fixed_point_at_truth(dc, theta_star):
    out = iterate_boundary(theta_star, dc.x_hat, BETA, C,
                           PiConfig(alpha_pi=1.0))
    assert out == pytest.approx(dc.x_hat, abs=1e-10)


@pytest.mark.parametrize("offset", [-2.0, 2.0])
def test_convergence_from_both_sides(dc, theta_star, offset):
    xb = dc.x_hat + offset
    cfg = PiConfig(alpha_pi=0.5)
    for _ in range(60):
        xb = iterate_boundary(theta_star, xb, BETA, C, cfg)
    assert abs(xb - dc.x_hat) < 1e-4


def test_relaxation_halves_the_move(dc, theta_star):
    xb = dc.x_hat - 1.0
    full = iterate_boundary(theta_star, xb, BETA, C, PiConfig(alpha_pi=1.0))
    half = iterate_boundary(theta_star, xb, BETA, C, PiConfig(alpha_pi=0.5))
    assert half == pytest.approx(xb + 0.5 * (full - xb), abs=1e-12)


def test_boundary_moves_right_when_started_low(dc, theta_star):
    xb = dc.x_hat - 1.5
    out = iterate_boundary(theta_star, xb, BETA, C, PiConfig(alpha_pi=1.0))
    assert out > xb


def test_boundary_moves_left_when_started_high(dc, theta_star):
    xb = dc.x_hat + 1.5
    out = iterate_boundary(theta_star, xb, BETA, C, PiConfig(alpha_pi=1.0))
    assert out < xb


def test_iteration_finite_over_feasible_region():
    # the root finder must come back with a finite boundary anywhere inside
    # the feasible parameter region, whichever case branch is selected
    rng = np.random.default_rng(17)
    for _ in range(200):
        t1 = rng.uniform(0.02, 0.6)
        t3 = rng.uniform(10.5, 40.0)
        ratio = BETA / (BETA - 1.0 / t3)
        lo, hi = np.sqrt(ratio) * t1, ratio * t1
        theta = Theta(t1, lo + rng.uniform(0.02, 0.98) * (hi - lo), t3)
        xb = rng.uniform(-6.0, 8.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = iterate_boundary(theta, xb, BETA, C, PiConfig(alpha_pi=1.0))
        assert np.isfinite(out)


def test_pi_config_validation():
    with pytest.raises(ValueError):
        PiConfig(alpha_pi=0.0)
    with pytest.raises(ValueError):
        PiConfig(root_tol=-1.0)
