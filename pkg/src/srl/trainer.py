"""Training loops: episode generation, critic updates, boundary iteration.

run_benchmark drives the non-randomized actor-critic, run_randomized the
entropy-regularized one.  Both thread (theta, x_bar) sequentially across
episodes and log per-episode metrics.  The Monte Carlo value estimator and
the sup-norm error metric double as oracles for the acceptance tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .closed_form import ModelParams, derive_constants, phi
from .params import Theta, phi_theta, theta_feasible
from .policy_eval import (PeConfig, ml_update_phi, ml_update_u_activated,
                          ml_update_u_inactive)
from .policy_iter import PiConfig, iterate_boundary
from .simulate import (EpisodeTrace, RngSeed, simulate_nonrandomized,
                       simulate_randomized, trace_total_cost)


@dataclass(frozen=True)
class TrainConfig:
    x0: float = 1.0
    T: float = 100.0
    N: int = 5000
    M: int = 500
    theta_init: Theta = Theta(0.15, 0.4, 15.0)
    x_bar_init: float = -2.5
    pe: PeConfig = field(default_factory=PeConfig)
    pi: PiConfig = field(default_factory=PiConfig)
    lam: float = 0.5
    seed: int = 0
    mode: str = "benchmark"
    include_control_costs: bool = True

    def __post_init__(self):
        if self.T <= 0 or self.N < 1 or self.M < 1:
            raise ValueError("need T > 0, N >= 1, M >= 1")
        if self.mode not in ("benchmark", "randomized"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.lam <= 0:
            raise ValueError("lam must be positive")

    @property
    def dt(self) -> float:
        return self.T / self.N

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.N + 1)


@dataclass(frozen=True)
class EpisodeRecord:
    m: int
    theta: Theta
    x_bar: float
    linf_error: float
    activation_time: float
    total_cost: float


class TrainError(RuntimeError):
    def __init__(self, episode: int, cause: Exception):
        super().__init__(f"episode {episode}: {cause}")
        self.episode = episode
        self.cause = cause


def linf_error(theta: Theta, x_bar: float, true_params: ModelParams,
               n_grid: int = 2001) -> float:
    """Sup-norm gap between the parametric and true stationary values on
    [-100, 100]."""
    dc = derive_constants(true_params)
    xs = np.linspace(-100.0, 100.0, n_grid)
    return float(np.max(np.abs(phi_theta(xs, theta, x_bar, true_params.c)
                               - phi(xs, dc, true_params))))


def _run(cfg: TrainConfig, true_params: ModelParams):
    theta, x_bar = cfg.theta_init, cfg.x_bar_init
    if not theta_feasible(theta, true_params.beta):
        raise ValueError("theta_init violates the feasibility constraints")
    grid = cfg.grid
    records = []
    for m in range(cfg.M):
        try:
            seed = RngSeed(cfg.seed, m)
            if cfg.mode == "benchmark":
                trace = simulate_nonrandomized(grid, cfg.x0, 0.0, x_bar,
                                               true_params, seed)
                theta = ml_update_phi(theta, x_bar, trace, m, cfg.pe,
                                      true_params.c, true_params.beta,
                                      cfg.include_control_costs)
            else:
                trace = simulate_randomized(grid, cfg.x0, 0.0, 0.0, x_bar,
                                            theta, true_params, cfg.lam, seed)
                if math.isinf(trace.activation_time):
                    theta = ml_update_u_inactive(theta, trace, m, cfg.pe,
                                                 true_params.beta)
                else:
                    theta = ml_update_u_activated(
                        theta, x_bar, trace, trace.activation_time, m,
                        cfg.pe, true_params.c, true_params.beta,
                        cfg.include_control_costs)
            x_bar = iterate_boundary(theta, x_bar, true_params.beta,
                                     true_params.c, cfg.pi)
            records.append(EpisodeRecord(
                m=m, theta=theta, x_bar=x_bar,
                linf_error=linf_error(theta, x_bar, true_params),
                activation_time=trace.activation_time,
                total_cost=trace_total_cost(trace, true_params)))
        except (ValueError, RuntimeError) as exc:
            raise TrainError(m, exc) from exc
    return records


def run_benchmark(cfg: TrainConfig, true_params: ModelParams):
    if cfg.mode != "benchmark":
        raise ValueError("config mode must be 'benchmark'")
    return _run(cfg, true_params)


def run_randomized(cfg: TrainConfig, true_params: ModelParams):
    if cfg.mode != "randomized":
        raise ValueError("config mode must be 'randomized'")
    return _run(cfg, true_params)


def run_training(cfg: TrainConfig, true_params: ModelParams):
    return run_benchmark(cfg, true_params) if cfg.mode == "benchmark" \
        else run_randomized(cfg, true_params)


def mc_value_estimate(x_bar: float, true_params: ModelParams, x0: float,
                      T: float, N: int, n_paths: int, seed: int,
                      chunk: int = 4096):
    """Sample mean and standard error of the realized discounted cost under
    the threshold strategy, estimated over independent reflected paths."""
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    dt = T / N
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    sums = 0.0
    sq = 0.0
    done = 0
    root_dt = math.sqrt(dt)
    while done < n_paths:
        k = min(chunk, n_paths - done)
        if true_params.sigma == 0.0:
            incs = np.full((k, N), true_params.mu * dt)
        else:
            incs = (true_params.mu * dt
                    + true_params.sigma * root_dt * rng.standard_normal((k, N)))
        totals = _kernels.reflect_totals(x0, x_bar, incs, true_params.a,
                                         true_params.c, true_params.beta, dt)
        sums += float(np.sum(totals))
        sq += float(np.sum(totals ** 2))
        done += k
    mean = sums / n_paths
    var = max(sq / n_paths - mean ** 2, 0.0)
    stderr = math.sqrt(var / n_paths)
    return mean, stderr


def run_seed_sweep(cfg: TrainConfig, true_params: ModelParams, seeds):
    """Repeat a training config across seeds; returns per-seed final records
    plus the medians of the final sup-norm error and boundary gap."""
    dc = derive_constants(true_params)
    finals = []
    for s in seeds:
        records = run_training(replace(cfg, seed=int(s)), true_params)
        finals.append(records[-1])
    linf = np.array([r.linf_error for r in finals])
    gaps = np.array([abs(r.x_bar - dc.x_hat) for r in finals])
    return finals, float(np.median(linf)), float(np.median(gaps))


def write_episode_log(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("m,theta1,theta2,theta3,x_bar,linf_error,"
                 "activation_time,total_cost\n")
        for r in records:
            tau = "inf" if math.isinf(r.activation_time) \
                else "%.17g" % r.activation_time
            fh.write("%d,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%.17g\n"
                     % (r.m, r.theta.theta1, r.theta.theta2, r.theta.theta3,
                        r.x_bar, r.linf_error, tau, r.total_cost))


def read_episode_log(path):
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            parts = line.strip().split(",")
            if not parts or parts == [""]:
                continue
            rows.append(dict(zip(header, parts)))
    return rows
