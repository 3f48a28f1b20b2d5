"""Command line entry point: ``wavetrain <subcommand> [options]``.

Scenario options mirror the configuration keys (``grid.x_min`` becomes
``--grid-x-min``); a ``--config`` file is read first and flags override it.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import checker, config, fitter, scenarios, stepper, units
from . import packet as pk

FIT_FLAGS = {"amplitude": "fit.amplitude", "width_min": "fit.width_min", "width_max": "fit.width_max",
             "unit": "fit.unit", "lx_microns": "fit.lx_microns", "omega_r_ratio": "fit.omega_r_ratio"}


def _flag(key: str) -> str:
    return "--" + key.replace(".", "-").replace("_", "-")


def _dest(key: str) -> str:
    return "cfg_" + key.replace(".", "__")


def _add_scenario_flags(ap: argparse.ArgumentParser, with_name: bool = True) -> None:
    ap.add_argument("--config", help="key=value or metadata JSON file")
    for key in config.SCENARIO_KEYS:
        if key == "scenario" and not with_name:
            continue
        ap.add_argument(_flag(key), dest=_dest(key), metavar="VALUE", help=f"overrides '{key}'")


def _merged(args, extra=None) -> dict:
    cfg = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg.update(config.parse_text(fh.read()))
    flags = [(key, getattr(args, _dest(key))) for key in config.SCENARIO_KEYS
             if getattr(args, _dest(key), None) is not None]
    cfg.update(config.parse_mapping(flags, lambda i: f"{_flag(flags[i][0])}: "))
    if extra:
        cfg.update(extra)
    return cfg


def _scenario(args, extra=None) -> scenarios.Scenario:
    s = config.from_mapping(_merged(args, extra))
    if not isinstance(s, scenarios.Scenario):
        raise config.ConfigError("expected a scenario configuration, got fit constraints")
    return s


def _emit(doc, out=None) -> None:
    text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_eval(args) -> int:
    s = _scenario(args)
    fh = open(args.out, "w", newline="\n") if args.out else sys.stdout
    try:
        fh.write("t,x,re,im,density\n")
        for t in s.times:
            ts = s.train_at(t)
            x = s.grid.x_axis(t, s.params, ts)
            psi = np.asarray(pk.psi_axial(x, t, s.params, ts))
            for xv, z in zip(x, psi):
                fh.write("%.17g,%.17g,%.17g,%.17g,%.17g\n" % (t, xv, z.real, z.imag, abs(z) ** 2))
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_verify(args) -> int:
    s = _scenario(args)
    ts = s.train_at(s.times[-1])
    times = None if args.random_times else tuple(t for t in s.times if s.train_at(t) == ts)
    rep = checker.full_report(s.params, ts, checker.ReportConfig(seed=args.seed, times=times,
                                                                 n_times=args.random_times or 3))
    _emit(rep.to_dict(), args.out)
    bad = {k: v for k, v in rep.error_fields().items() if not v < args.tol}
    return 1 if bad else 0


def cmd_propagate(args) -> int:
    s = _scenario(args)
    ts = s.train
    cfg = stepper.auto_config(s.params, ts, args.t_final, args.dt, g1d=s.g1d, fft_precision=args.precision,
                              snapshot_every=args.every)
    if s.grid.x_min is not None:
        steps = cfg.steps
        cfg = stepper.StepperConfig(s.grid.x_min, s.grid.x_max, args.points or cfg.points, cfg.dt, steps,
                                    s.g1d, ts.omega_r, s.params.omega_x, args.precision, args.every)
    elif args.points:
        cfg = stepper.StepperConfig(cfg.x_min, cfg.x_max, args.points, cfg.dt, cfg.steps, s.g1d, ts.omega_r,
                                    s.params.omega_x, args.precision, args.every)
    curve = stepper.deviation_curve(s.params, ts, cfg)
    if args.csv:
        with open(args.csv, "w", newline="\n") as fh:
            fh.write("t,deviation,norm_drift\n")
            for t, d, nd in zip(curve.times, curve.deviation, curve.norm_drift):
                fh.write("%.17g,%.17g,%.17g\n" % (t, d, nd))
    _emit({
        "grid": {"x_min": cfg.x_min, "x_max": cfg.x_max, "points": cfg.points},
        "dt": cfg.dt, "steps": cfg.steps, "g1d": cfg.g1d, "fft_precision": cfg.fft_precision,
        "final_time": float(curve.times[-1]),
        "final_deviation": float(curve.deviation[-1]),
        "max_norm_drift": float(np.max(curve.norm_drift)),
    }, args.out)
    return 0


def cmd_fit(args) -> int:
    cfg = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg.update(config.parse_text(fh.read()))
    flags = [(key, getattr(args, name)) for name, key in FIT_FLAGS.items() if getattr(args, name) is not None]
    cfg.update(config.parse_mapping(flags, lambda i: f"--{flags[i][0][4:].replace('_', '-')}: "))
    c = config.constraints_from_mapping(cfg)
    try:
        res = fitter.fit_closed_form(c) if args.method == "closed" else fitter.fit_least_squares(c)
    except fitter.FitError as exc:
        _emit({"method": "closed_form", "converged": False, "error": str(exc)}, args.out)
        return 1
    _emit(res.to_dict(), args.out)
    return 0 if res.converged else 1


def cmd_scenario(args) -> int:
    s = _scenario(args, {"scenario": args.name})
    manifest = scenarios.run_scenario(s, args.out)
    _emit(manifest)
    return 0


def cmd_units(args) -> int:
    _emit(units.convert_units(args.omega_x_si, args.mass_amu).as_dict())
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wavetrain", description="Exact oscillator wave-packet trains.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="sample psi on the scenario grid as CSV")
    _add_scenario_flags(p)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run the numerical checks and print the report")
    _add_scenario_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-times", type=int, default=0, help="sample this many random times instead")
    p.add_argument("--tol", type=float, default=1e-6, help="exit status 1 if any error field reaches this")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("propagate", help="split-step run compared with the closed form")
    _add_scenario_flags(p)
    p.add_argument("--t-final", type=config.eval_number, default=math.pi)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--points", type=int)
    p.add_argument("--every", type=int, default=1000, help="snapshot interval in steps")
    p.add_argument("--precision", choices=("extended", "double"), default="extended")
    p.add_argument("--csv", help="write the deviation curve here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("fit", help="oscillator constants from train observables")
    p.add_argument("--config")
    for name in FIT_FLAGS:
        p.add_argument("--" + name.replace("_", "-"), dest=name)
    p.add_argument("--method", choices=("closed", "lsq"), default="closed")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("scenario", help="write a figure preset")
    p.add_argument("name", choices=scenarios.PRESET_NAMES)
    _add_scenario_flags(p, with_name=False)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("units", help="oscillator length and period in laboratory units")
    p.add_argument("--omega-x-si", type=float, default=20.0, help="rad/s")
    p.add_argument("--mass-amu", type=float, default=units.LI7_MASS_AMU)
    p.set_defaults(func=cmd_units)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (config.ConfigError, scenarios.ScenarioError, ValueError, OSError) as exc:
        print(f"wavetrain: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
