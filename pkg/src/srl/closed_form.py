"""Ground-truth analytic layer for the irreversible-reinsurance model.

Everything here is evaluated under the *true* environment coefficients: the
free-boundary value function of the inner singular control problem, the
kernel-smoothed value Psi, the equilibrium activation boundary Gamma of the
entropy-regularized outer problem, and the outer equilibrium value functions
V and f.  These are the oracles the learning algorithms are measured
against.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import _gauss

# switch point below which the outer-coefficient integral is evaluated in
# the boundary variable instead of the activation-fraction variable
_CL_Z_SWITCH = 1e-4


class QuadratureError(RuntimeError):
    """Raised when the outer-coefficient integral fails to converge."""


@dataclass(frozen=True)
class ModelParams:
    """True environment coefficients plus the entropy temperature."""

    mu: float
    sigma: float
    a: float
    c: float
    beta: float
    lam: float = 0.5

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.a <= 0 or self.c <= 0 or self.beta <= 0 or self.lam <= 0:
            raise ValueError("a, c, beta, lam must be positive")
        if self.cost_gap <= 0:
            raise ValueError(
                "discount rate too small: need beta > mu*a + 0.5*sigma^2*a^2")

    @property
    def cost_gap(self) -> float:
        """beta - mu*a - 0.5*sigma^2*a^2, the particular-solution denominator."""
        return self.beta - self.mu * self.a - 0.5 * self.sigma ** 2 * self.a ** 2


@dataclass(frozen=True)
class DerivedConstants:
    """Characteristic roots, free boundary and solution coefficients."""

    b: float
    l: float
    x_hat: float
    c_a: float
    c_b: float


def derive_constants(params: ModelParams) -> DerivedConstants:
    mu, sigma, a, c, beta = (params.mu, params.sigma, params.a,
                             params.c, params.beta)
    disc = math.sqrt(mu ** 2 + 2.0 * beta * sigma ** 2)
    b = (disc - mu) / sigma ** 2
    l = (-disc - mu) / sigma ** 2
    gap = params.cost_gap
    c_a = 1.0 / gap
    x_hat = math.log(b * c * gap / (b * a - a ** 2)) / a
    c_b = -(a ** 2 / b ** 2) * c_a * math.exp((a - b) * x_hat)
    return DerivedConstants(b=b, l=l, x_hat=x_hat, c_a=c_a, c_b=c_b)


def _scalar_or_array(x, out):
    out = np.asarray(out)
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


def phi(x, dc: DerivedConstants, params: ModelParams):
    """Inner value function: exponential pair below x_hat, linear above."""
    xa = np.asarray(x, dtype=float)
    xl = np.minimum(xa, dc.x_hat)  # keep the b-exponent bounded
    lower = dc.c_a * np.exp(params.a * xl) + dc.c_b * np.exp(dc.b * xl)
    phi_hat = (dc.c_a * math.exp(params.a * dc.x_hat)
               + dc.c_b * math.exp(dc.b * dc.x_hat))
    upper = params.c * (xa - dc.x_hat) + phi_hat
    return _scalar_or_array(x, np.where(xa < dc.x_hat, lower, upper))


def phi_prime(x, dc: DerivedConstants, params: ModelParams):
    xa = np.asarray(x, dtype=float)
    xl = np.minimum(xa, dc.x_hat)
    lower = (params.a * dc.c_a * np.exp(params.a * xl)
             + dc.b * dc.c_b * np.exp(dc.b * xl))
    return _scalar_or_array(x, np.where(xa < dc.x_hat, lower, params.c))


def phi_second(x, dc: DerivedConstants, params: ModelParams):
    """Second derivative; the left-limit value is returned at x_hat."""
    xa = np.asarray(x, dtype=float)
    xl = np.minimum(xa, dc.x_hat)
    lower = (params.a ** 2 * dc.c_a * np.exp(params.a * xl)
             + dc.b ** 2 * dc.c_b * np.exp(dc.b * xl))
    return _scalar_or_array(x, np.where(xa <= dc.x_hat, lower, 0.0))


def vi_residual(x, dc: DerivedConstants, params: ModelParams):
    """Both brackets of the variational inequality min{., .} = 0.

    Returns (pde_res, grad_res): the PDE residual and the gradient
    constraint c - phi'(x), each from the analytic derivatives.
    """
    xa = np.asarray(x, dtype=float)
    p = phi(xa, dc, params)
    p1 = phi_prime(xa, dc, params)
    p2 = phi_second(xa, dc, params)
    pde = (np.exp(params.a * xa) - params.beta * p + params.mu * p1
           + 0.5 * params.sigma ** 2 * p2)
    grad = params.c - p1
    return _scalar_or_array(x, pde), _scalar_or_array(x, grad)


def psi(p, q, dc: DerivedConstants, params: ModelParams):
    """Kernel-smoothed inner value: Gaussian convolution of phi - C_a e^{ax}.

    Evaluated in closed form via truncated normal moments split at the free
    boundary.  q is the remaining time to activation; q = 0 gives phi(p).
    """
    if q < 0:
        raise ValueError("q must be nonnegative")
    if q < 1e-12:
        return phi(p, dc, params)
    a, c, beta = params.a, params.c, params.beta
    m = p + params.mu * q
    s2 = params.sigma ** 2 * q
    s = math.sqrt(s2)
    u = dc.x_hat
    phi_hat = phi(u, dc, params)
    p_up = _gauss.prob_above(m, s, u)
    kernel = (dc.c_b * _gauss.exp_moment_below(dc.b, m, s2, s, u)
              + c * (_gauss.lin_moment_above(m, s, u) - u * p_up)
              + phi_hat * p_up
              - dc.c_a * _gauss.exp_moment_above(a, m, s2, s, u))
    return dc.c_a * math.exp(a * p) + math.exp(-beta * q) * float(kernel)


def psi_quad(p, q, dc: DerivedConstants, params: ModelParams):
    """Adaptive-quadrature cross-check of :func:`psi` (not a hot path)."""
    if q < 1e-12:
        return phi(p, dc, params)
    m = p + params.mu * q
    s = params.sigma * math.sqrt(q)

    def integrand(y):
        g = math.exp(-0.5 * ((y - m) / s) ** 2) / (s * math.sqrt(2 * math.pi))
        return g * (phi(y, dc, params) - dc.c_a * math.exp(params.a * y))

    lo, hi = m - 12 * s, m + 12 * s
    val = quad(integrand, lo, dc.x_hat, limit=200)[0] if lo < dc.x_hat else 0.0
    val += quad(integrand, max(lo, dc.x_hat), hi, limit=200)[0]
    return dc.c_a * math.exp(params.a * p) + math.exp(-params.beta * q) * val


def psi_q_at_zero(x, dc: DerivedConstants, params: ModelParams):
    """d/dq psi(x, q) at q = 0; equals the PDE bracket of the inequality."""
    return vi_residual(x, dc, params)[0]


def gamma(x, dc: DerivedConstants, params: ModelParams):
    """Equilibrium activation boundary in the fraction coordinate."""
    xa = np.asarray(x, dtype=float)
    out = np.exp(-(params.beta / params.lam) * np.asarray(phi(xa, dc, params)))
    return _scalar_or_array(x, out)


def gamma_inv(z, dc: DerivedConstants, params: ModelParams):
    """Inverse of gamma on (0, 1), by monotone bracketing + bisection."""
    if not (0.0 < z < 1.0):
        raise ValueError("gamma_inv requires z in (0, 1)")
    target = -(params.lam / params.beta) * math.log(z)
    lo, hi = -50.0, 50.0
    # phi is increasing: expand the bracket geometrically until it straddles
    while phi(lo, dc, params) > target:
        lo *= 2.0
        if lo < -1e12:
            raise RuntimeError("bracket expansion failed (lower)")
    while phi(hi, dc, params) < target:
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("bracket expansion failed (upper)")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if phi(mid, dc, params) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _cl_integrand(zp, psi_val, q, dc, params):
    pref = (params.lam / params.beta) * math.exp(-params.beta * q)
    return ((pref * math.log(zp) + psi_val)
            * math.exp(-dc.l * gamma_inv(zp, dc, params)))


def c_l(p, q, z, dc: DerivedConstants, params: ModelParams,
        abs_tol: float = 1e-10):
    """Outer-solution coefficient: integral over the activated fraction.

    Finite for z in (0, 1]; the lower endpoint z' -> 0 maps to the state
    boundary x' -> +infinity where the integrand can blow up, so for small z
    the tail is integrated in the substituted state variable.
    """
    if not (0.0 <= z <= 1.0):
        raise ValueError("c_l requires z in [0, 1]")
    if z >= 1.0:
        return 0.0
    psi_val = psi(p, q, dc, params)
    pref = (params.lam / params.beta) * math.exp(-params.beta * q)
    lo = max(z, _CL_Z_SWITCH)
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(_cl_integrand, lo, 1.0,
                            args=(psi_val, q, dc, params),
                            epsabs=abs_tol, limit=400)
        except IntegrationWarning as exc:
            raise QuadratureError(f"upper-piece quadrature did not converge: {exc}") from exc
    if z < _CL_Z_SWITCH:
        decay = params.a * params.beta / params.lam - abs(dc.l)
        if decay >= 0:
            warnings.warn(
                "substituted tail integrand may not decay "
                f"(rate {decay:.3g} >= 0)", RuntimeWarning)
        x_lo = gamma_inv(_CL_Z_SWITCH, dc, params)
        x_hi = gamma_inv(z, dc, params) if z > 0 else math.inf

        def tail(xp):
            gam = float(gamma(xp, dc, params))
            dens = (params.beta / params.lam) * float(phi_prime(xp, dc, params)) * gam
            return ((-(params.beta / params.lam) * pref * float(phi(xp, dc, params))
                     + psi_val) * math.exp(-dc.l * xp) * dens)

        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            try:
                tail_val, tail_err = quad(tail, x_lo, x_hi,
                                          epsabs=abs_tol, limit=400)
            except IntegrationWarning as exc:
                raise QuadratureError(
                    f"tail quadrature did not converge: {exc}") from exc
        val += tail_val
        err += tail_err
    if not math.isfinite(val):
        raise QuadratureError(f"integral not finite (error estimate {err:.3g})")
    return val


def entropy(z):
    """E(z) = z - z ln z on [0, 1], with E(0) = 0 by continuity."""
    za = np.asarray(z, dtype=float)
    if np.any(za < 0) or np.any(za > 1):
        raise ValueError("entropy requires z in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(za > 0, za - za * np.log(np.maximum(za, 1e-300)), 0.0)
    return _scalar_or_array(z, out)


def outer_value_f(p, q, x, z, dc: DerivedConstants, params: ModelParams):
    """Auxiliary equilibrium value f^{p,s}(x, t, z) with q = t - s."""
    if q < 0:
        raise ValueError("q must be nonnegative")
    lam, beta = params.lam, params.beta
    g = float(gamma(x, dc, params))
    disc = math.exp(-beta * q)
    if z > g:
        return (-(lam / beta) * disc * float(entropy(z))
                + c_l(p, q, z, dc, params) * math.exp(dc.l * x))
    return (-psi(p, q, dc, params) * (z - g)
            - (lam / beta) * disc * float(entropy(g))
            + c_l(p, q, g, dc, params) * math.exp(dc.l * x))


def outer_value_v(x, z, dc: DerivedConstants, params: ModelParams):
    """Equilibrium value of the outer problem (stationary in time)."""
    return outer_value_f(x, 0.0, x, z, dc, params)


def outer_vz(x, z, dc: DerivedConstants, params: ModelParams):
    """Analytic dV/dz on the activated side z > gamma(x)."""
    g = float(gamma(x, dc, params))
    if z <= g:
        return -float(phi(x, dc, params))
    lam, beta = params.lam, params.beta
    if z >= 1.0:
        # gamma_inv(1) sits at -infinity where the exponential factor dies
        return 0.0
    lz = (lam / beta) * math.log(z)
    return lz - (lz + float(phi(x, dc, params))) * math.exp(
        dc.l * (x - gamma_inv(z, dc, params)))


def veri3_gap(x, z, dc: DerivedConstants, params: ModelParams):
    """Waiting-side verification quantity; nonnegative for z <= gamma(x)."""
    g = float(gamma(x, dc, params))
    pq = psi_q_at_zero(x, dc, params)
    return (-params.lam * float(entropy(z)) + params.lam * float(entropy(g))
            - pq * (z - g))
