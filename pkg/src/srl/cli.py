"""Command-line surface: train, oracle, validate, figures.

Exit codes: 0 success, 1 failed validation, 2 configuration error,
3 numeric failure during training.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
import time

import numpy as np

from . import closed_form as cf
from . import config as cfgmod
from .trainer import TrainError, read_episode_log, run_training, \
    write_episode_log
from .validate import SUITES, run_suites


def _parse_grid(spec: str) -> np.ndarray:
    """Parse 'a..b' or 'a..b..n' into a uniform grid (default 201 points),
    or a single number into a one-point grid."""
    parts = spec.split("..")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 2:
            return np.linspace(float(parts[0]), float(parts[1]), 201)
        if len(parts) == 3:
            n = int(parts[2])
            if n < 1:
                raise ValueError("grid needs at least one point")
            return np.linspace(float(parts[0]), float(parts[1]), n)
    except ValueError as exc:
        raise cfgmod.ConfigError(f"bad grid {spec!r}: {exc}") from exc
    raise cfgmod.ConfigError(f"bad grid {spec!r}")


def _resolve_seed(args, values) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("SRL_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise cfgmod.ConfigError(f"SRL_SEED: {exc}") from exc
    return values["seed"]


def cmd_train(args) -> int:
    values = cfgmod.load_config(args.config) if args.config \
        else dict(cfgmod._DEFAULTS)
    seed = _resolve_seed(args, values)
    tc = cfgmod.to_train_config(values, mode=args.mode, seed=seed)
    params = cfgmod.to_model_params(values)
    os.makedirs(args.out_dir, exist_ok=True)
    try:
        records = run_training(tc, params)
    except TrainError as exc:
        print(f"numeric failure at episode {exc.episode}: {exc.cause}",
              file=sys.stderr)
        return 3
    log_path = os.path.join(args.out_dir, f"episodes_{tc.mode}.csv")
    write_episode_log(records, log_path)
    serialized = cfgmod.serialize_config({**values, "mode": tc.mode,
                                          "seed": seed})
    digest = hashlib.sha256(serialized.encode()).hexdigest()
    with open(os.path.join(args.out_dir, f"manifest_{tc.mode}.txt"), "w",
              encoding="utf-8") as fh:
        fh.write(f"command = train\nmode = {tc.mode}\nseed = {seed}\n"
                 f"config = {args.config or '<defaults>'}\n"
                 f"config_sha256 = {digest}\n"
                 f"timestamp = {time.strftime('%Y-%m-%dT%H:%M:%S')}\n"
                 f"episodes = {len(records)}\nlog = {log_path}\n")
        fh.write("---\n")
        fh.write(serialized)
    print(f"wrote {log_path} ({len(records)} episodes)")
    return 0


def cmd_oracle(args) -> int:
    values = cfgmod.load_config(args.config) if args.config \
        else dict(cfgmod._DEFAULTS)
    params = cfgmod.to_model_params(values)
    dc = cf.derive_constants(params)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        if args.what == "boundary":
            out.write("name,value\n")
            for name, v in (("x_hat", dc.x_hat), ("b", dc.b), ("l", dc.l),
                            ("c_a", dc.c_a), ("c_b", dc.c_b)):
                out.write(f"{name},%.17g\n" % v)
            return 0
        xs = _parse_grid(args.x)
        if args.what == "phi":
            out.write("x,value\n")
            for x in xs:
                out.write("%.17g,%.17g\n" % (x, cf.phi(x, dc, params)))
        elif args.what == "gamma":
            out.write("x,value\n")
            for x in xs:
                out.write("%.17g,%.17g\n" % (x, cf.gamma(x, dc, params)))
        elif args.what == "psi":
            qs = _parse_grid(args.q)
            out.write("x,q,value\n")
            for q in qs:
                for x in xs:
                    out.write("%.17g,%.17g,%.17g\n"
                              % (x, q, cf.psi(x, q, dc, params)))
        elif args.what == "v":
            zs = _parse_grid(args.z)
            if np.any((zs <= 0) | (zs > 1)):
                raise cfgmod.ConfigError("z grid must lie in (0, 1]")
            out.write("x,z,value\n")
            for z in zs:
                for x in xs:
                    out.write("%.17g,%.17g,%.17g\n"
                              % (x, z, cf.outer_value_v(x, z, dc, params)))
        return 0
    finally:
        if args.out:
            out.close()


def cmd_validate(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names)
    ok = True
    for suite, checks in results.items():
        for name, passed, measured in checks:
            ok = ok and passed
            print(f"[{suite}] {name}: {'PASS' if passed else 'FAIL'} "
                  f"(measured {measured:.6g})")
    return 0 if ok else 1


def _figure_rows(run_dir):
    rows = []
    for mode in ("benchmark", "randomized"):
        path = os.path.join(run_dir, f"episodes_{mode}.csv")
        if os.path.exists(path):
            log = read_episode_log(path)
            if log:
                rows.append((mode, log))
    return rows


def cmd_figures(args) -> int:
    dirs = [args.run_dir] + (args.compare or [])
    logs = []
    for d in dirs:
        if not os.path.isdir(d):
            print(f"missing run directory {d}", file=sys.stderr)
            return 2
        logs.extend(_figure_rows(d))
    if not logs:
        print("no non-empty episode logs found", file=sys.stderr)
        return 2
    params = cf.ModelParams(mu=0.25, sigma=1.0, a=0.1, c=1.0, beta=0.1)
    dc = cf.derive_constants(params)
    truth = {"theta1": params.a, "theta2": dc.b, "theta3": dc.c_a,
             "x_bar": dc.x_hat}
    out_path = args.out or os.path.join(args.run_dir, "figure_data.csv")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("episode,mode,series,value\n")
        for mode, log in logs:
            for row in log:
                m = row["m"]
                for series in ("theta1", "theta2", "theta3", "x_bar",
                               "linf_error"):
                    fh.write(f"{m},{mode},{series},{row[series]}\n")
        last = max(int(row["m"]) for _, log in logs for row in log)
        for series, v in truth.items():
            for m in (0, last):
                fh.write(f"{m},truth,{series}_true,%.17g\n" % v)
    print(f"wrote {out_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="srl",
        description="Actor-critic learning for singular reinsurance control")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="run a training experiment")
    t.add_argument("--config", help="key = value config file")
    t.add_argument("--mode", choices=["benchmark", "randomized"],
                   default=None)
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--out-dir", default="runs")
    t.set_defaults(func=cmd_train)

    o = sub.add_parser("oracle", help="evaluate closed-form solutions")
    o.add_argument("--what", required=True,
                   choices=["phi", "psi", "gamma", "v", "boundary"])
    o.add_argument("--config", help="key = value config file")
    o.add_argument("--x", default="-10..10", help="grid a..b[..n]")
    o.add_argument("--q", default="0", help="grid a..b[..n]")
    o.add_argument("--z", default="0.5", help="grid a..b[..n]")
    o.add_argument("--out", help="output CSV path (default stdout)")
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("validate", help="run invariant suites")
    v.add_argument("--suite", default="all",
                   choices=sorted(SUITES) + ["all"])
    v.set_defaults(func=cmd_validate)

    f = sub.add_parser("figures", help="export tidy plot data")
    f.add_argument("--run-dir", required=True)
    f.add_argument("--compare", action="append",
                   help="additional run directory (repeatable)")
    f.add_argument("--out", help="output CSV path")
    f.set_defaults(func=cmd_figures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses code 2 for usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except cf.QuadratureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
