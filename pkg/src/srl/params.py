"""Learnable critic: the parameter triple, its value functions and clipping.

The triple (theta1, theta2, theta3) plays the roles of the running-cost
exponent, the positive characteristic root and the particular-solution
coefficient.  The implied environment coefficients mu(theta), sigma(theta)
are pinned down by requiring both exponentials to solve the pricing ODE.
Gradients come in two independent flavors: exact forward-mode duals
(default in the training loop) and central finite differences (cross-check).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _dual as D


@dataclass(frozen=True)
class Theta:
    theta1: float
    theta2: float
    theta3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2, self.theta3], dtype=float)

    @staticmethod
    def from_array(arr) -> "Theta":
        return Theta(float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class Boundary:
    """Current inner action threshold; the waiting region is {x < x_bar}."""

    x_bar: float


def theta_feasible(theta: Theta, beta: float) -> bool:
    t1, t2, t3 = theta.theta1, theta.theta2, theta.theta3
    if not (t1 > 0 and t3 > 1.0 / beta):
        return False
    ratio = beta / (beta - 1.0 / t3)
    return math.sqrt(ratio) * t1 < t2 < ratio * t1


def _check_feasible(theta: Theta, beta: float) -> None:
    if not theta_feasible(theta, beta):
        raise ValueError(f"infeasible parameter triple {theta}")


# ---------------------------------------------------------------------------
# generic expressions (plain numbers or forward-mode duals)

def _mu_expr(t1, t2, t3, beta):
    return (beta * (t2 * t2 - t1 * t1) - t2 * t2 / t3) / (t1 * t2 * (t2 - t1))


def _sigma2_expr(t1, t2, t3, beta):
    return 2.0 * (t2 / t3 - beta * (t2 - t1)) / (t1 * t2 * (t2 - t1))


def _coeffs_expr(t1, t2, t3, x_bar, c):
    cb = (c - t1 * t3 * D.exp(t1 * x_bar)) / (t2 * D.exp(t2 * x_bar))
    cv = (c + (t2 - t1) * t3 * D.exp(t1 * x_bar)) / t2
    return cb, cv


def _phi_expr(x, t1, t2, t3, x_bar, c):
    cb, cv = _coeffs_expr(t1, t2, t3, x_bar, c)
    xl = np.minimum(x, x_bar)
    lower = t3 * D.exp(t1 * xl) + cb * D.exp(t2 * xl)
    upper = c * (x - x_bar) + cv
    return D.where(x <= x_bar, lower, upper)


def _u_kernel_expr(x, q, t1, t2, t3, x_bar, c, beta):
    """Gaussian-kernel value for strictly positive time-to-activation q."""
    from . import _gauss
    cb, cv = _coeffs_expr(t1, t2, t3, x_bar, c)
    mu = _mu_expr(t1, t2, t3, beta)
    s2 = _sigma2_expr(t1, t2, t3, beta) * q
    s = D.sqrt(s2)
    m = x + mu * q
    p_up = _gauss.prob_above(m, s, x_bar)
    kernel = (cb * _gauss.exp_moment_below(t2, m, s2, s, x_bar)
              + c * (_gauss.lin_moment_above(m, s, x_bar) - x_bar * p_up)
              + cv * p_up
              - t3 * _gauss.exp_moment_above(t1, m, s2, s, x_bar))
    return t3 * D.exp(t1 * x) + np.exp(-beta * q) * kernel


# ---------------------------------------------------------------------------
# public evaluators

def mu_of_theta(theta: Theta, beta: float) -> float:
    _check_feasible(theta, beta)
    return float(_mu_expr(theta.theta1, theta.theta2, theta.theta3, beta))


def sigma_of_theta(theta: Theta, beta: float) -> float:
    _check_feasible(theta, beta)
    s2 = float(_sigma2_expr(theta.theta1, theta.theta2, theta.theta3, beta))
    return math.sqrt(s2)


def coeffs_of(theta: Theta, x_bar: float, c: float):
    cb, cv = _coeffs_expr(theta.theta1, theta.theta2, theta.theta3, x_bar, c)
    return float(cb), float(cv)


def phi_theta(x, theta: Theta, x_bar: float, c: float):
    xa = np.asarray(x, dtype=float)
    out = _phi_expr(xa, theta.theta1, theta.theta2, theta.theta3, x_bar, c)
    return float(out) if np.ndim(x) == 0 else np.asarray(out)


def _split_uq(x, t, r):
    """Broadcast (x, t, r) and split by whether the kernel branch applies."""
    xa, ta, ra = np.broadcast_arrays(np.asarray(x, float),
                                     np.asarray(t, float),
                                     np.asarray(r, float))
    q = ra - ta
    if np.any(q < -1e-12) or np.any(ta < 0):
        raise ValueError("need r >= t >= 0")
    kern = q > 1e-12
    return xa, np.maximum(q, 0.0), kern


def u_theta(x, t, r, theta: Theta, x_bar: float, c: float, beta: float):
    """Pre-activation value function; collapses to phi_theta once t >= r."""
    xa, q, kern = _split_uq(x, t, r)
    out = np.empty_like(xa)
    if np.any(~kern):
        out[~kern] = np.asarray(
            phi_theta(xa[~kern], theta, x_bar, c))
    if np.any(kern):
        out[kern] = D.value_of(_u_kernel_expr(
            xa[kern], q[kern], theta.theta1, theta.theta2, theta.theta3,
            x_bar, c, beta))
    return float(out) if np.ndim(x) == 0 and np.ndim(t) == 0 and np.ndim(r) == 0 else out


def u_inf_theta(x, theta: Theta):
    """Value when activation never happens: theta3 * exp(theta1 * x)."""
    out = theta.theta3 * np.exp(theta.theta1 * np.asarray(x, dtype=float))
    return float(out) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# gradients in (theta1, theta2, theta3)

def grad_theta_phi(x, theta: Theta, x_bar: float, c: float) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    t1, t2, t3 = D.Dual.seed(theta.as_array())
    out = _phi_expr(xa, t1, t2, t3, x_bar, c)
    return out.grad


def grad_theta_u(x, t, r, theta: Theta, x_bar: float, c: float,
                 beta: float) -> np.ndarray:
    xa, q, kern = _split_uq(x, t, r)
    grad = np.empty((3,) + xa.shape)
    t1, t2, t3 = D.Dual.seed(theta.as_array())
    if np.any(~kern):
        grad[:, ~kern] = _phi_expr(xa[~kern], t1, t2, t3, x_bar, c).grad
    if np.any(kern):
        grad[:, kern] = _u_kernel_expr(
            xa[kern], q[kern], t1, t2, t3, x_bar, c, beta).grad
    return grad


def grad_theta_u_inf(x, theta: Theta) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    e = np.exp(theta.theta1 * xa)
    return np.stack([theta.theta3 * xa * e, np.zeros_like(xa), e])


def _fd_grad(fn, theta: Theta) -> np.ndarray:
    """Central finite differences with per-component relative steps."""
    base = theta.as_array()
    parts = []
    for i in range(3):
        h = 1e-6 * max(1.0, abs(base[i]))
        up, dn = base.copy(), base.copy()
        up[i] += h
        dn[i] -= h
        parts.append((np.asarray(fn(Theta.from_array(up)))
                      - np.asarray(fn(Theta.from_array(dn)))) / (2 * h))
    return np.stack(parts)


def fd_grad_theta_phi(x, theta, x_bar, c):
    return _fd_grad(lambda th: phi_theta(x, th, x_bar, c), theta)


def fd_grad_theta_u(x, t, r, theta, x_bar, c, beta):
    return _fd_grad(lambda th: u_theta(x, t, r, th, x_bar, c, beta), theta)


def fd_grad_theta_u_inf(x, theta):
    return _fd_grad(lambda th: u_inf_theta(x, th), theta)


# ---------------------------------------------------------------------------
# feasibility clipping

def clip_full(theta: Theta, beta: float, delta_bc: float = 0.001) -> Theta:
    """Project all three components back into the feasible box."""
    t1 = max(theta.theta1, delta_bc)
    t3 = max(theta.theta3, 1.0 / beta + delta_bc)
    ratio = beta / (beta - 1.0 / t3)
    t2 = min(ratio * t1 - delta_bc,
             max(theta.theta2, math.sqrt(ratio) * t1 + delta_bc))
    out = Theta(t1, t2, t3)
    _check_feasible(out, beta)
    return out


def clip_uncontrolled(theta: Theta, beta: float,
                      delta_bc: float = 0.001) -> Theta:
    """Clip theta1/theta3 and reset theta2 to the feasible-interval midpoint."""
    t1 = max(theta.theta1, delta_bc)
    t3 = max(theta.theta3, 1.0 / beta + delta_bc)
    ratio = beta / (beta - 1.0 / t3)
    t2 = 0.5 * (math.sqrt(ratio) + ratio) * t1
    out = Theta(t1, t2, t3)
    _check_feasible(out, beta)
    return out
