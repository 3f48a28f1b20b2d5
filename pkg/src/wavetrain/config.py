"""Flat ``key = value`` configuration files.

A file either describes a scenario (``scenario=fig1`` and/or explicit
parameters) or fit constraints (``fit.*`` keys only).  The metadata JSON
written by ``run_scenario`` is accepted as well: its ``config`` section
holds the same keys.

Numeric values may use ``pi`` with + - * / and parentheses, e.g.
``times = 0, pi/2, 2.5*pi``.
"""
from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import replace

from . import oscillator as osc
from .fitter import FitConstraints
from .oscillator import OscillatorParams
from .packet import TrainSpec
from .scenarios import GridSpec, Scenario, ScenarioError, Transition, preset
from .units import LI7_MASS_AMU, convert_units

SCENARIO_KEYS = {
    "scenario": "str", "n": "int", "A": "float", "B": "float", "alpha": "float", "beta": "float",
    "b0": "float", "omega_r": "float", "omega_x_si": "float", "mass_amu": "float",
    "grid.x_min": "float", "grid.x_max": "float", "grid.points": "int",
    "grid.y_min": "float", "grid.y_max": "float", "grid.y_points": "int",
    "times": "floats", "outputs": "strs", "g1d": "float",
    "transition.t": "float", "transition.n": "int",
}
FIT_KEYS = {
    "fit.amplitude": "float", "fit.width_min": "float", "fit.width_max": "float",
    "fit.unit": "str", "fit.lx_microns": "float", "fit.omega_r_ratio": "float",
}
KEYS = {**SCENARIO_KEYS, **FIT_KEYS}
PARAM_KEYS = ("n", "A", "B", "alpha", "beta", "b0", "omega_r", "transition.t", "transition.n")


class ConfigError(ValueError):
    pass


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv,
        ast.USub: operator.neg, ast.UAdd: operator.pos}


def eval_number(text: str) -> float:
    """Evaluate a real literal or a small arithmetic expression in ``pi``."""
    text = text.strip().replace("−", "-")
    try:
        return float(text)
    except ValueError:
        pass

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        return ev(ast.parse(text, mode="eval").body)
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot evaluate {text!r}: {exc}") from exc


def _convert(kind: str, raw):
    if kind == "str":
        return str(raw).strip()
    if kind == "int":
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            value = raw
        else:
            value = eval_number(str(raw))
        if float(value) != int(value):
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(value)
    if kind == "float":
        return float(raw) if isinstance(raw, (int, float)) else eval_number(str(raw))
    items = raw if isinstance(raw, list) else [v for v in str(raw).split(",") if v.strip()]
    if kind == "floats":
        return [float(v) if isinstance(v, (int, float)) else eval_number(str(v)) for v in items]
    return [str(v).strip() for v in items]


def parse_mapping(items, where=lambda i: "") -> dict:
    """Validate and convert (key, raw value) pairs; ``where(i)`` labels the i-th pair in errors."""
    out = {}
    for i, (key, raw) in enumerate(items):
        if key not in KEYS:
            raise ConfigError(f"{where(i)}unknown key {key!r}")
        try:
            out[key] = _convert(KEYS[key], raw)
        except ValueError as exc:
            raise ConfigError(f"{where(i)}bad value for {key!r}: {exc}") from exc
    return out


def parse_text(text: str) -> dict:
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from exc
        section = doc.get("config", doc)
        if not isinstance(section, dict):
            raise ConfigError("JSON config must be an object")
        pairs = list(section.items())
        return parse_mapping(pairs, lambda i: f"key {pairs[i][0]!r}: ")
    pairs, lines = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (s.strip() for s in body.split("=", 1))
        if any(k == key for k, _ in pairs):
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs.append((key, value))
        lines.append(lineno)
    return parse_mapping(pairs, lambda i: f"line {lines[i]}: ")


def scenario_from_mapping(cfg: dict) -> Scenario:
    """Start from the named preset (if any) and apply every explicit key on top."""
    name = cfg.get("scenario", "custom")
    try:
        base = preset(name) if name != "custom" else None
    except ScenarioError as exc:
        raise ConfigError(str(exc)) from exc
    if base is None:
        missing = [k for k in ("n", "A", "B", "alpha", "beta") if k not in cfg]
        if missing:
            raise ConfigError(f"custom scenario is missing {', '.join(missing)}")
        p0, tr0, times0, grid0, outputs0, trans0 = None, None, (0.0,), GridSpec(), ("density_profile",), None
    else:
        p0, tr0, times0, grid0, outputs0, trans0 = (base.params, base.train, base.times, base.grid,
                                                    base.outputs, base.transition)

    def pick(key, default):
        return cfg[key] if key in cfg else default

    try:
        params = OscillatorParams(pick("A", p0 and p0.A), pick("B", p0 and p0.B),
                                  pick("alpha", p0 and p0.alpha), pick("beta", p0 and p0.beta))
        train = TrainSpec(pick("n", tr0 and tr0.n), pick("b0", tr0.b0 if tr0 else 0.0),
                          pick("omega_r", tr0.omega_r if tr0 else 40.0))
    except osc.InvalidParametersError as exc:
        raise ConfigError(f"invalid parameters: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid train: {exc}") from exc

    transition = trans0
    if "transition.t" in cfg or "transition.n" in cfg:
        if "transition.t" not in cfg or "transition.n" not in cfg:
            raise ConfigError("transition.t and transition.n must be given together")
        transition = Transition(cfg["transition.t"], cfg["transition.n"])
    grid_keys = {k.split(".", 1)[1]: v for k, v in cfg.items() if k.startswith("grid.")}
    units = convert_units(pick("omega_x_si", 20.0), pick("mass_amu", LI7_MASS_AMU))
    try:
        grid = replace(grid0, **grid_keys)
        s = Scenario(name, params, train, tuple(pick("times", times0)), grid,
                     tuple(pick("outputs", outputs0)), units, pick("g1d", 0.0), transition)
        if transition is not None:
            s.train.with_n(transition.n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if base is not None and (s.params != base.params or s.train != base.train or s.transition != base.transition):
        s = replace(s, name="custom")
    return s


def constraints_from_mapping(cfg: dict) -> FitConstraints:
    try:
        return FitConstraints(
            amplitude=cfg["fit.amplitude"], width_min=cfg["fit.width_min"], width_max=cfg["fit.width_max"],
            omega_x=cfg.get("omega_x_si"), omega_r_ratio=cfg.get("fit.omega_r_ratio", 40.0),
            unit=cfg.get("fit.unit", "natural"), lx_microns=cfg.get("fit.lx_microns"))
    except KeyError as exc:
        raise ConfigError(f"fit constraints need {exc.args[0]}") from exc
    except ValueError as exc:
        raise ConfigError(f"invalid fit constraints: {exc}") from exc


def from_mapping(cfg: dict):
    fit_only = any(k in FIT_KEYS for k in cfg) and not any(k in PARAM_KEYS or k == "scenario" for k in cfg)
    return constraints_from_mapping(cfg) if fit_only else scenario_from_mapping(cfg)


def load_config(path) -> Scenario | FitConstraints:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return from_mapping(parse_text(text))
