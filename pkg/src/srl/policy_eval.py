"""Offline martingale-loss updates for the critic parameters.

Each update forms, per grid step, the residual between the discounted
parametric value and the realized suffix cost, weights it by the parameter
gradient of the value, sums over steps, clamps the summed 3-vector
componentwise, scales by the scheduled learning rate and the step size, and
finally projects back into the feasible set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import (Theta, clip_full, clip_uncontrolled, grad_theta_phi,
                     grad_theta_u, grad_theta_u_inf, phi_theta, u_inf_theta,
                     u_theta)
from .simulate import EpisodeTrace


def lr_schedule(m: int) -> float:
    """Per-episode learning rate multiplier 1.01^(-m)."""
    if m < 0:
        raise ValueError("episode index must be nonnegative")
    return 1.01 ** (-m)


@dataclass(frozen=True)
class PeConfig:
    alpha: np.ndarray = field(
        default_factory=lambda: np.array([0.1, 0.1, 1.0]))
    grad_clip: np.ndarray = field(
        default_factory=lambda: np.array([1.0, 1.0, 10.0]))
    delta_bc: float = 0.001
    schedule: object = lr_schedule

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=float))
        object.__setattr__(self, "grad_clip",
                           np.asarray(self.grad_clip, dtype=float))
        if np.any(self.alpha <= 0) or np.any(self.grad_clip <= 0):
            raise ValueError("alpha and grad_clip must be positive")
        if self.delta_bc <= 0:
            raise ValueError("delta_bc must be positive")


def _suffix_costs(trace: EpisodeTrace, include_control_costs: bool,
                  c: float = 0.0, beta: float = 0.0):
    """Realized cost from t_n (exclusive of the jump at t_n itself) to T.

    Interval costs at steps k >= n count fully; grid-time jump costs (a
    nonzero xi jump can occur at the activation step of a randomized trace)
    count only for k > n, because the value at t_n is measured post-jump.
    """
    costs = trace.H + trace.c if include_control_costs else trace.H
    suffix = np.cumsum(costs[::-1])[::-1]
    if include_control_costs and c != 0.0:
        n = trace.n_steps
        jumps = trace.xi_post - trace.xi_pre
        if np.any(jumps > 0):
            disc = np.exp(-beta * trace.grid[:n])
            jc = c * disc * jumps
            suffix = suffix + np.cumsum(jc[::-1])[::-1] - jc
    return suffix


def _apply(theta: Theta, raw, trace: EpisodeTrace, m: int,
           cfg: PeConfig) -> np.ndarray:
    clamped = np.clip(raw, -cfg.grad_clip, cfg.grad_clip)
    step = cfg.alpha * cfg.schedule(m) * trace.dt * clamped
    return theta.as_array() + step


def ml_update_phi(theta: Theta, x_bar: float, trace: EpisodeTrace, m: int,
                  cfg: PeConfig, c: float, beta: float,
                  include_control_costs: bool = True) -> Theta:
    """Martingale-loss update against the stationary parametric value."""
    if trace.n_steps == 0:
        return clip_full(theta, beta, cfg.delta_bc)
    suffix = _suffix_costs(trace, include_control_costs, c, beta)
    disc = np.exp(-beta * trace.grid[:trace.n_steps])
    vals = phi_theta(trace.x_post, theta, x_bar, c)
    grads = grad_theta_phi(trace.x_post, theta, x_bar, c)
    raw = grads @ (-disc * vals + suffix)
    return clip_full(Theta.from_array(_apply(theta, raw, trace, m, cfg)),
                     beta, cfg.delta_bc)


def ml_update_u_activated(theta: Theta, x_bar: float, trace: EpisodeTrace,
                          tau: float, m: int, cfg: PeConfig, c: float,
                          beta: float,
                          include_control_costs: bool = True) -> Theta:
    """Update against the time-dependent value of an activated episode."""
    if math.isinf(tau):
        raise ValueError("activated update requires a finite activation time")
    if trace.n_steps == 0:
        return clip_full(theta, beta, cfg.delta_bc)
    n = trace.n_steps
    tn = trace.grid[:n]
    r = np.maximum(tau, tn)  # value collapses to the stationary branch at t>=tau
    suffix = _suffix_costs(trace, include_control_costs, c, beta)
    disc = np.exp(-beta * tn)
    vals = u_theta(trace.x_post, tn, r, theta, x_bar, c, beta)
    grads = grad_theta_u(trace.x_post, tn, r, theta, x_bar, c, beta)
    raw = grads @ (-disc * vals + suffix)
    return clip_full(Theta.from_array(_apply(theta, raw, trace, m, cfg)),
                     beta, cfg.delta_bc)


def ml_update_u_inactive(theta: Theta, trace: EpisodeTrace, m: int,
                         cfg: PeConfig, beta: float) -> Theta:
    """Update for never-activated episodes against the uncontrolled value.

    Only the first and third components carry gradient; the second is reset
    by the midpoint rule inside clip_uncontrolled regardless of input.
    """
    if not math.isinf(trace.activation_time):
        raise ValueError("inactive update requires activation_time = inf")
    if trace.n_steps == 0:
        return clip_uncontrolled(theta, beta, cfg.delta_bc)
    suffix = _suffix_costs(trace, include_control_costs=False)
    disc = np.exp(-beta * trace.grid[:trace.n_steps])
    vals = u_inf_theta(trace.x_post, theta)
    grads = grad_theta_u_inf(trace.x_post, theta)
    raw = grads @ (-disc * vals + suffix)
    return clip_uncontrolled(
        Theta.from_array(_apply(theta, raw, trace, m, cfg)),
        beta, cfg.delta_bc)
