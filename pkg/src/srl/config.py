"""Flat key = value configuration files.

One assignment per line, '#' starts a comment, values are plain literals.
Defaults reproduce the reference experiment, so an empty file is a valid
config.  parse -> serialize -> parse is the identity.
"""

from __future__ import annotations

import numpy as np

from .closed_form import ModelParams
from .params import Theta
from .policy_eval import PeConfig
from .policy_iter import PiConfig
from .trainer import TrainConfig


class ConfigError(ValueError):
    pass


_DEFAULTS = {
    # true environment
    "mu": 0.25, "sigma": 1.0, "a": 0.1, "c": 1.0, "beta": 0.1,
    "lambda": 0.5,
    # experiment block
    "x0": 1.0, "T": 100.0, "N": 5000, "M": 500,
    "theta1_init": 0.15, "theta2_init": 0.4, "theta3_init": 15.0,
    "x_bar_init": -2.5,
    "alpha1": 0.1, "alpha2": 0.1, "alpha3": 1.0,
    "grad_clip1": 1.0, "grad_clip2": 1.0, "grad_clip3": 10.0,
    "delta_bc": 0.001, "alpha_pi": 0.5, "root_tol": 1e-10,
    "seed": 0, "mode": "benchmark", "include_control_costs": True,
}

_INT_KEYS = {"N", "M", "seed"}
_BOOL_KEYS = {"include_control_costs"}
_STR_KEYS = {"mode"}


def _coerce(key, raw):
    raw = raw.strip()
    if key in _STR_KEYS:
        return raw
    if key in _BOOL_KEYS:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def parse_config_text(text: str) -> dict:
    values = dict(_DEFAULTS)
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, raw = body.partition("=")
        key = key.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def serialize_config(values: dict) -> str:
    lines = []
    for key in _DEFAULTS:
        v = values[key]
        if key in _BOOL_KEYS:
            s = "true" if v else "false"
        elif key in _INT_KEYS:
            s = str(int(v))
        elif key in _STR_KEYS:
            s = str(v)
        else:
            s = "%.17g" % float(v)
        lines.append(f"{key} = {s}")
    return "\n".join(lines) + "\n"


def to_model_params(values: dict) -> ModelParams:
    try:
        return ModelParams(mu=values["mu"], sigma=values["sigma"],
                           a=values["a"], c=values["c"], beta=values["beta"],
                           lam=values["lambda"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def to_train_config(values: dict, mode=None, seed=None) -> TrainConfig:
    try:
        pe = PeConfig(
            alpha=np.array([values["alpha1"], values["alpha2"],
                            values["alpha3"]]),
            grad_clip=np.array([values["grad_clip1"], values["grad_clip2"],
                                values["grad_clip3"]]),
            delta_bc=values["delta_bc"])
        pi = PiConfig(alpha_pi=values["alpha_pi"],
                      root_tol=values["root_tol"])
        return TrainConfig(
            x0=values["x0"], T=values["T"], N=values["N"], M=values["M"],
            theta_init=Theta(values["theta1_init"], values["theta2_init"],
                             values["theta3_init"]),
            x_bar_init=values["x_bar_init"], pe=pe, pi=pi,
            lam=values["lambda"],
            seed=values["seed"] if seed is None else int(seed),
            mode=values["mode"] if mode is None else mode,
            include_control_costs=values["include_control_costs"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
