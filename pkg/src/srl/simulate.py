"""Episode generators for the reinsurance state process.

The non-randomized simulator runs the reflected dynamics under the threshold
strategy at x_bar from the start.  The randomized simulator lets the state
run uncontrolled while accumulating the auxiliary activation fraction eta,
draws one uniform coin Z per episode up front, switches to the reflected
dynamics at the first grid time with eta > Z, and keeps growing eta along an
uncontrolled shadow path so that E[eta_t] stays the activation probability
P(tau <= t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .closed_form import ModelParams
from .params import Theta, phi_theta


@dataclass(frozen=True)
class RngSeed:
    """Root seed plus a stream index; one stream per episode keeps multi-run
    comparisons coupled on the same Brownian increments."""

    seed: int
    stream: int = 0

    def generator(self, key: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed,
                                    spawn_key=(self.stream, key))
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class EpisodeTrace:
    """Per-step arrays, all of length N (steps t_0 .. t_{N-1}).

    pre-jump values are the left limits at t_n; post-jump values hold after
    the (possibly zero) jump at t_n.  H and c are the discounted running and
    control costs accrued over [t_n, t_{n+1}).
    """

    grid: np.ndarray
    x_pre: np.ndarray
    xi_pre: np.ndarray
    eta_pre: np.ndarray
    x_post: np.ndarray
    xi_post: np.ndarray
    eta_post: np.ndarray
    H: np.ndarray
    c: np.ndarray
    activation_time: float

    @property
    def n_steps(self) -> int:
        return self.x_pre.shape[0]

    @property
    def dt(self) -> float:
        return float(self.grid[1] - self.grid[0]) if len(self.grid) > 1 else 0.0

    def validate(self) -> None:
        if np.any(np.diff(self.xi_post) < -1e-12):
            raise ValueError("xi must be nondecreasing")
        if np.any(np.diff(self.eta_post) < -1e-12) or np.any(self.eta_post > 1 + 1e-12):
            raise ValueError("eta must be nondecreasing and <= 1")


def step_increment(rng: np.random.Generator, mu: float, sigma: float,
                   dt: float) -> float:
    """One uncontrolled Gaussian increment over a step of length dt."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if sigma == 0.0:
        return mu * dt
    return mu * dt + sigma * math.sqrt(dt) * float(rng.standard_normal())


def _draw_increments(rng, mu, sigma, dt, n):
    if sigma == 0.0:
        return np.full(n, mu * dt)
    return mu * dt + sigma * math.sqrt(dt) * rng.standard_normal(n)


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 1:
        raise ValueError("grid must contain t_0")
    if len(grid) > 1:
        dts = np.diff(grid)
        if not np.allclose(dts, dts[0], rtol=1e-9, atol=1e-12):
            raise ValueError("grid must be uniform")
    return grid


def simulate_nonrandomized(grid, x0: float, xi0: float, x_bar: float,
                           params: ModelParams, seed: RngSeed) -> EpisodeTrace:
    """Reflected episode under the threshold strategy at x_bar.

    The activation fraction is degenerate here (control active from t_0), so
    the eta columns are identically 1 and activation_time is t_0.
    """
    grid = _check_grid(grid)
    n = len(grid) - 1
    dt = float(grid[1] - grid[0]) if n > 0 else 0.0
    rng = seed.generator(0)
    incs = _draw_increments(rng, params.mu, params.sigma, dt, n)
    x_pre, x_post, overshoot = _kernels.reflect_path(x0, x_bar, incs)
    tn = grid[:n]
    disc = np.exp(-params.beta * tn)
    h = disc * np.exp(params.a * x_post) * dt
    cc = disc * params.c * overshoot
    jump0 = max(x0 - x_bar, 0.0)
    xi_post = np.empty(n)
    xi_pre = np.empty(n)
    if n > 0:
        xi_post[0] = xi0 + jump0
        xi_post[1:] = xi_post[0] + np.cumsum(overshoot[:-1])
        xi_pre[0] = xi0
        xi_pre[1:] = xi_post[1:]  # jumps after t_0 are zero
    ones = np.ones(n)
    return EpisodeTrace(grid=grid, x_pre=x_pre, xi_pre=xi_pre, eta_pre=ones,
                        x_post=x_post, xi_post=xi_post, eta_post=ones,
                        H=h, c=cc, activation_time=float(grid[0]))


def simulate_randomized(grid, x0: float, xi0: float, eta0: float,
                        x_bar: float, theta: Theta, params: ModelParams,
                        lam: float, seed: RngSeed) -> EpisodeTrace:
    """Randomized episode: uncontrolled until the eta coin flips, reflected
    afterwards.  Uses the critic's own boundary function for eta."""
    if not (0.0 <= eta0 <= 1.0):
        raise ValueError("eta0 must lie in [0, 1]")
    grid = _check_grid(grid)
    n = len(grid) - 1
    dt = float(grid[1] - grid[0]) if n > 0 else 0.0
    rng = seed.generator(0)
    incs = _draw_increments(rng, params.mu, params.sigma, dt, n)
    z = float(seed.generator(1).uniform())

    # uncontrolled shadow path drives eta for the whole episode
    xu_pre = x0 + np.concatenate([[0.0], np.cumsum(incs[:-1])]) if n > 0 \
        else np.empty(0)
    gam = np.exp(-(params.beta / lam)
                 * phi_theta(xu_pre, theta, x_bar, params.c)) if n > 0 \
        else np.empty(0)
    eta_post = np.maximum(eta0, np.maximum.accumulate(gam)) if n > 0 \
        else np.empty(0)
    eta_post = np.minimum(eta_post, 1.0)
    eta_pre = np.empty(n)
    if n > 0:
        eta_pre[0] = eta0
        eta_pre[1:] = eta_post[:-1]

    activated = np.nonzero(eta_post > z)[0]
    tn = grid[:n]
    disc = np.exp(-params.beta * tn)

    if activated.size == 0:
        # coin never flips: fully uncontrolled, no control costs
        h = disc * np.exp(params.a * xu_pre) * dt
        xi = np.full(n, xi0)
        return EpisodeTrace(grid=grid, x_pre=xu_pre, xi_pre=xi,
                            eta_pre=eta_pre, x_post=xu_pre, xi_post=xi,
                            eta_post=eta_post, H=h, c=np.zeros(n),
                            activation_time=math.inf)

    k = int(activated[0])
    tau = float(grid[k])
    x_pre = xu_pre.copy()
    x_post = xu_pre.copy()
    xi_pre = np.full(n, xi0)
    xi_post = np.full(n, xi0)
    h = np.empty(n)
    cc = np.zeros(n)
    h[:k] = disc[:k] * np.exp(params.a * xu_pre[:k]) * dt

    # delegate the tail to the reflected stepping rule
    rp, rq, overshoot = _kernels.reflect_path(float(xu_pre[k]), x_bar,
                                              incs[k:])
    x_pre[k:] = rp
    x_post[k:] = rq
    jump = max(xu_pre[k] - x_bar, 0.0)
    xi_post[k] = xi0 + jump
    if k + 1 < n:
        xi_post[k + 1:] = xi_post[k] + np.cumsum(overshoot[:-1])
        xi_pre[k + 1:] = xi_post[k + 1:]
    h[k:] = disc[k:] * np.exp(params.a * x_post[k:]) * dt
    cc[k:] = disc[k:] * params.c * overshoot
    return EpisodeTrace(grid=grid, x_pre=x_pre, xi_pre=xi_pre,
                        eta_pre=eta_pre, x_post=x_post, xi_post=xi_post,
                        eta_post=eta_post, H=h, c=cc, activation_time=tau)


def trace_total_cost(trace: EpisodeTrace, params: ModelParams) -> float:
    """Realized discounted cost: interval costs plus grid-time jump costs."""
    n = trace.n_steps
    if n == 0:
        return 0.0
    disc = np.exp(-params.beta * trace.grid[:n])
    jumps = trace.xi_post - trace.xi_pre
    return float(np.sum(trace.H) + np.sum(trace.c)
                 + params.c * np.sum(disc * jumps))


def export_trace_csv(trace: EpisodeTrace, path) -> None:
    """One row per step; activation time in a footer row."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("n,t,x_pre,xi_pre,eta_pre,x_post,xi_post,eta_post,H,c\n")
        for i in range(trace.n_steps):
            cols = (trace.grid[i], trace.x_pre[i], trace.xi_pre[i],
                    trace.eta_pre[i], trace.x_post[i], trace.xi_post[i],
                    trace.eta_post[i], trace.H[i], trace.c[i])
            fh.write(str(i) + "," + ",".join("%.17g" % v for v in cols) + "\n")
        fh.write("# activation_time,%s\n"
                 % ("inf" if math.isinf(trace.activation_time)
                    else "%.17g" % trace.activation_time))
