"""Continuous-time actor-critic learning for irreversible reinsurance.

The package pairs closed-form ground truth for a singular control problem
(threshold reinsurance with entropy-regularized randomized activation) with
offline martingale-loss learning algorithms that recover the value function
parameters and the free boundary from simulated episodes.
"""

from .closed_form import (DerivedConstants, ModelParams, QuadratureError,
                          derive_constants, entropy, gamma, gamma_inv,
                          outer_value_f, outer_value_v, phi, phi_prime,
                          phi_second, psi, vi_residual)
from .params import (Theta, clip_full, clip_uncontrolled, coeffs_of,
                     mu_of_theta, phi_theta, sigma_of_theta, theta_feasible,
                     u_inf_theta, u_theta)
from .policy_eval import (PeConfig, lr_schedule, ml_update_phi,
                          ml_update_u_activated, ml_update_u_inactive)
from .policy_iter import BoundaryRootError, PiConfig, iterate_boundary, \
    q_functions
from .simulate import (EpisodeTrace, RngSeed, simulate_nonrandomized,
                       simulate_randomized, step_increment)
from .trainer import (EpisodeRecord, TrainConfig, linf_error,
                      mc_value_estimate, run_benchmark, run_randomized,
                      run_seed_sweep)

__all__ = [
    "DerivedConstants", "ModelParams", "QuadratureError", "derive_constants",
    "entropy", "gamma", "gamma_inv", "outer_value_f", "outer_value_v", "phi",
    "phi_prime", "phi_second", "psi", "vi_residual",
    "Theta", "clip_full", "clip_uncontrolled", "coeffs_of", "mu_of_theta",
    "phi_theta", "sigma_of_theta", "theta_feasible", "u_inf_theta", "u_theta",
    "PeConfig", "lr_schedule", "ml_update_phi", "ml_update_u_activated",
    "ml_update_u_inactive",
    "BoundaryRootError", "PiConfig", "iterate_boundary", "q_functions",
    "EpisodeTrace", "RngSeed", "simulate_nonrandomized",
    "simulate_randomized", "step_increment",
    "EpisodeRecord", "TrainConfig", "linf_error", "mc_value_estimate",
    "run_benchmark", "run_randomized", "run_seed_sweep",
]

__version__ = "0.1.0"
