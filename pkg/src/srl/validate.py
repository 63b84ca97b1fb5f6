"""Runtime invariant suites backing the `validate` CLI command.

Each suite returns a list of (name, passed, measured) tuples; `measured` is
the residual or statistic that was compared against the tolerance.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from . import closed_form as cf
from .params import Theta, phi_theta
from .policy_eval import PeConfig, lr_schedule, ml_update_phi
from .policy_iter import PiConfig, iterate_boundary
from .simulate import RngSeed, simulate_nonrandomized, simulate_randomized

_PARAMS = cf.ModelParams(mu=0.25, sigma=1.0, a=0.1, c=1.0, beta=0.1, lam=0.5)


def suite_closedform(params: cf.ModelParams = _PARAMS):
    dc = cf.derive_constants(params)
    checks = []
    for name, r in (("char_eq_b", dc.b), ("char_eq_l", dc.l)):
        res = abs(0.5 * params.sigma ** 2 * r * r + params.mu * r - params.beta)
        checks.append((name, res < 1e-12, res))
    res = abs(cf.phi_prime(dc.x_hat - 1e-12, dc, params) - params.c)
    checks.append(("smooth_fit_c1", res < 1e-10, res))
    res = abs(cf.phi_second(dc.x_hat - 1e-12, dc, params))
    checks.append(("smooth_fit_c2", res < 1e-8, res))
    xs = np.linspace(-20, 20, 200)
    pde, grad = cf.vi_residual(xs, dc, params)
    res = float(np.max(np.abs(np.minimum(pde, grad))))
    checks.append(("variational_inequality", res < 1e-8, res))
    # gamma monotone decreasing, within (0, 1), and -> 1 as lam grows
    g = cf.gamma(xs, dc, params)
    mono = bool(np.all(np.diff(g) < 0) and np.all((g > 0) & (g < 1)))
    checks.append(("gamma_monotone", mono, float(np.max(np.diff(g)))))
    big = cf.ModelParams(params.mu, params.sigma, params.a, params.c,
                         params.beta, lam=1e9)
    res = abs(1.0 - float(cf.gamma(0.0, cf.derive_constants(big), big)))
    checks.append(("gamma_high_temperature_limit", res < 1e-6, res))
    return checks


def suite_simulator(params: cf.ModelParams = _PARAMS, n_episodes: int = 4000):
    dc = cf.derive_constants(params)
    checks = []
    grid = np.linspace(0.0, 1.0, 51)
    # distribution of the pre-activation state at a fixed time
    xs = []
    th = Theta(params.a, dc.b, dc.c_a)
    for m in range(n_episodes):
        tr = simulate_randomized(grid, -30.0, 0.0, 0.0, dc.x_hat, th,
                                 params, params.lam, RngSeed(901, m))
        xs.append(tr.x_pre[-1])
    t_fix = grid[50 - 1]
    zstat = stats.kstest(np.asarray(xs),
                         stats.norm(loc=-30.0 + params.mu * t_fix,
                                    scale=params.sigma * math.sqrt(t_fix)).cdf)
    checks.append(("pre_activation_gaussian_ks", zstat.pvalue > 0.01,
                   float(zstat.pvalue)))
    # monotonicity and reflection on a controlled trace
    tr = simulate_nonrandomized(np.linspace(0, 20, 1001), 3.0, 0.0,
                                dc.x_hat, params, RngSeed(7, 0))
    mono = bool(np.all(np.diff(tr.xi_post) >= -1e-12))
    checks.append(("xi_monotone", mono, 0.0))
    refl = float(np.max(tr.x_post - dc.x_hat))
    checks.append(("reflection_bound", refl <= 1e-12, refl))
    return checks


def suite_pe(params: cf.ModelParams = _PARAMS):
    dc = cf.derive_constants(params)
    th = Theta(params.a, dc.b, dc.c_a)
    cfg = PeConfig()
    grid = np.linspace(0, 50, 1001)
    updates = []
    for m in range(100):
        tr = simulate_nonrandomized(grid, 1.0, 0.0, dc.x_hat, params,
                                    RngSeed(23, m))
        new = ml_update_phi(th, dc.x_hat, tr, 0, cfg, params.c, params.beta)
        updates.append(new.as_array() - th.as_array())
    upd = np.asarray(updates)
    tstat = np.abs(upd.mean(axis=0)) / (upd.std(axis=0, ddof=1)
                                        / math.sqrt(len(upd)) + 1e-300)
    checks = [("truth_stationarity_phi", bool(np.all(tstat < 3.0)),
               float(np.max(tstat)))]
    checks.append(("lr_schedule_start", lr_schedule(0) == 1.0,
                   lr_schedule(0)))
    return checks


def suite_pi(params: cf.ModelParams = _PARAMS):
    dc = cf.derive_constants(params)
    th = Theta(params.a, dc.b, dc.c_a)
    cfg = PiConfig(alpha_pi=1.0)
    res = abs(iterate_boundary(th, dc.x_hat, params.beta, params.c, cfg)
              - dc.x_hat)
    checks = [("boundary_fixed_point", res < 1e-8, res)]
    xb = dc.x_hat - 2.0
    cfg2 = PiConfig(alpha_pi=0.5)
    for _ in range(60):
        xb = iterate_boundary(th, xb, params.beta, params.c, cfg2)
    res = abs(xb - dc.x_hat)
    checks.append(("boundary_convergence_below", res < 1e-4, res))
    # parametric value reproduces the true one at the fixed point
    xs = np.linspace(-50, 50, 301)
    res = float(np.max(np.abs(phi_theta(xs, th, dc.x_hat, params.c)
                              - cf.phi(xs, dc, params))))
    checks.append(("fixed_point_realization", res < 1e-8, res))
    return checks


SUITES = {
    "closedform": suite_closedform,
    "simulator": suite_simulator,
    "pe": suite_pe,
    "pi": suite_pi,
}


def run_suites(names):
    results = {}
    for name in names:
        results[name] = SUITES[name]()
    return results
