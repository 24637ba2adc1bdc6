"""Command-line entry point.

Subcommands:
  run       one or more integrators on a registered model, CSVs out
  paper     the canonical five-method sleigh benchmark
  converge  fitted convergence orders against a fine reference
  check     seeded property suites (axioms, symplecticity, gradients, ...)

Exit codes: 0 success, 1 solver failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .harness import (ExperimentConfig, build_model, convergence_study,
                      parse_config_file, run_experiment)
from .integrators import IntegratorSpec
from .sleigh import paper_experiment_config

# Probe state for order studies: all components O(1) so that fourth-order
# global errors stay well above roundoff on the smallest steps.
CONVERGENCE_INIT = (0.3, -0.2, 0.7, 0.8, 1.1, 0.4, 0.9, -0.3, 0.6, -0.5)

DEFAULT_METHODS = "retraction:0,retraction:0.5,retraction:1,verlet,rk2,rk4,gl4"


def _parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",") if tok.strip() != ""])
    except ValueError as exc:
        raise ValueError(f"expected comma-separated numbers, got {text!r}") from exc


def _parse_params(tokens) -> dict:
    params = {}
    for tok in tokens or ():
        for piece in tok.split(","):
            if not piece.strip():
                continue
            if "=" not in piece:
                raise ValueError(f"model parameter must look like name=value, got {piece!r}")
            key, val = piece.split("=", 1)
            params[key.strip()] = float(val)
    return params


def _parse_methods(text: str, newton_tol: float) -> tuple[IntegratorSpec, ...]:
    specs = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ":" in tok:
            kind, delta = tok.split(":", 1)
            specs.append(IntegratorSpec(kind.strip(), delta=float(delta),
                                        newton_tol=newton_tol))
        else:
            specs.append(IntegratorSpec(tok, newton_tol=newton_tol))
    if not specs:
        raise ValueError("no integrators selected")
    return tuple(specs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nhoc",
        description="Benchmark symplectic and classical integrators on the "
                    "costate dynamics of nonholonomic optimal control.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="integrate a model and write trajectory CSVs")
    run.add_argument("--config", help="flat key=value experiment file; flags override")
    run.add_argument("--model", default=None)
    run.add_argument("--param", action="append",
                     help="model parameter, name=value (repeatable)")
    run.add_argument("--integrator", default=None,
                     help="retraction | verlet | rk2 | rk4 | gl4")
    run.add_argument("--delta", type=float, default=None)
    run.add_argument("--newton-tol", type=float, default=None)
    run.add_argument("--h", type=float, default=None)
    run.add_argument("--t-final", type=float, default=None)
    run.add_argument("--init", default=None, help="comma-separated initial state")
    run.add_argument("--out", default=None, help="output directory")

    paper = sub.add_parser("paper", help="run the canonical five-method benchmark")
    paper.add_argument("--out", default="results", help="output directory")

    conv = sub.add_parser("converge", help="fit observed convergence orders")
    conv.add_argument("--model", default="sleigh")
    conv.add_argument("--param", action="append")
    conv.add_argument("--init", default=None)
    conv.add_argument("--h-list", default="0.02,0.01,0.005,0.0025")
    conv.add_argument("--t-final", type=float, default=1.0)
    conv.add_argument("--methods", default=DEFAULT_METHODS)
    conv.add_argument("--ref-h", type=float, default=1e-5)
    conv.add_argument("--newton-tol", type=float, default=1e-12)

    chk = sub.add_parser("check", help="run the seeded property suites")
    chk.add_argument("--seed", type=int, default=42)

    return parser


def _run_command(args) -> int:
    values = parse_config_file(args.config) if args.config else {}

    def pick(flag, key, cast, default):
        if flag is not None:
            return flag
        if key in values:
            return cast(values[key])
        return default

    model = pick(args.model, "model", str, "sleigh")
    params = _parse_params(args.param) if args.param else _parse_params(
        [values["param"]] if "param" in values else [])
    kind = pick(args.integrator, "integrator", str, "retraction")
    delta = pick(args.delta, "delta", float, 0.5)
    newton_tol = pick(args.newton_tol, "newton_tol", float, 1e-12)
    h = pick(args.h, "h", float, 0.005)
    t_final = pick(args.t_final, "t_final", float, 20.0)
    init_text = pick(args.init, "init", str, None)
    out = pick(args.out, "out", str, "results")
    if init_text is None:
        raise ValueError("an initial state is required (--init or config key init)")

    spec = IntegratorSpec(kind, delta=delta, newton_tol=newton_tol)
    config = ExperimentConfig(model=model, model_params=params,
                              init=_parse_floats(init_text), h=h,
                              t_final=t_final, integrators=(spec,), out_dir=out)
    summaries = run_experiment(config)
    for s in summaries:
        print(f"{s.method}: status={s.status} max|phi_d|={s.max_abs_phi_d:.3e} "
              f"max|dH|={s.max_abs_dH:.3e}")
    return 0 if all(s.status == "ok" for s in summaries) else 1


def _paper_command(args) -> int:
    config = paper_experiment_config(out_dir=args.out)
    summaries = run_experiment(config)
    for s in summaries:
        print(f"{s.method}: status={s.status} max|phi_d|={s.max_abs_phi_d:.3e} "
              f"max|dH|={s.max_abs_dH:.3e} mean_newton={s.mean_newton_iters:.2f}")
    print(f"wrote {len(summaries)} trajectory files and summary.csv to {args.out}")
    return 0 if all(s.status == "ok" for s in summaries) else 1


def _converge_command(args) -> int:
    model, _ = build_model(args.model, _parse_params(args.param))
    init = _parse_floats(args.init) if args.init else np.array(CONVERGENCE_INIT)
    h_list = [float(t) for t in args.h_list.split(",")]
    specs = _parse_methods(args.methods, args.newton_tol)
    fits = convergence_study(model, init, specs, h_list, args.t_final,
                             ref_h=args.ref_h)
    for fit in fits:
        errs = " ".join(f"{e:.3e}" for e in fit.errors)
        print(f"{fit.label}: order {fit.slope:.3f}   errors [{errs}]")
    return 0


def _check_command(args) -> int:
    from .checks import run_all
    results = run_all(args.seed)
    for res in results:
        print(res.line())
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _run_command(args)
        if args.command == "paper":
            return _paper_command(args)
        if args.command == "converge":
            return _converge_command(args)
        return _check_command(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
