"""Recover oscillator constants from measured train observables.

The gauge is fixed to B = 1, alpha = 0, beta = -pi/2, where

    rho(0)/sqrt(c0)    = sqrt(A)        (narrowest)
    rho(pi/2)/sqrt(c0) = 1/sqrt(A)      (widest)
    max |x_c|          = |b0|

so the two widths multiply to one and the inversion is explicit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import oscillator as osc
from .oscillator import OscillatorParams

PRODUCT_TOL = 0.05
GAUGE = {"B": 1.0, "alpha": 0.0, "beta": -0.5 * math.pi}
PARAM_NAMES = ("A", "B", "alpha", "beta", "b0")
OBSERVABLES = ("center", "width", "rho")


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class FitConstraints:
    """Measured amplitude of the center orbit and the extreme train widths.

    With ``unit="physical"`` the three lengths are in micrometres and
    ``lx_microns`` (if given) fixes the length unit; otherwise
    l_x = sqrt(width_min * width_max).
    """

    amplitude: float
    width_min: float
    width_max: float
    omega_x: float | None = None
    omega_r_ratio: float = 40.0
    unit: str = "natural"
    lx_microns: float | None = None

    def __post_init__(self):
        if self.unit not in ("natural", "physical"):
            raise ValueError(f"unit must be 'natural' or 'physical', got {self.unit!r}")
        if not 0 < self.width_min <= self.width_max:
            raise ValueError(f"need 0 < width_min <= width_max, got {self.width_min}, {self.width_max}")
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")
        if not self.omega_r_ratio > 0:
            raise ValueError("omega_r_ratio must be positive")

    def natural(self) -> tuple["FitConstraints", float | None]:
        """Constraints in units of l_x, plus l_x in micrometres for physical input."""
        if self.unit == "natural":
            return self, self.lx_microns
        lx = self.lx_microns or math.sqrt(self.width_min * self.width_max)
        return FitConstraints(self.amplitude / lx, self.width_min / lx, self.width_max / lx,
                              self.omega_x, self.omega_r_ratio), lx


@dataclass
class FitResult:
    params: OscillatorParams
    b0: float
    lx_microns: float | None
    residuals: dict[str, float]
    converged: bool
    tolerance: float
    method: str = "closed_form"
    iterations: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    def to_dict(self) -> dict:
        p = self.params
        return {
            "method": self.method,
            "converged": self.converged,
            "A": p.A, "B": p.B, "alpha": p.alpha, "beta": p.beta, "b0": self.b0, "c0": p.c0,
            "lx_microns": self.lx_microns,
            "residuals": dict(self.residuals),
            "tolerance": self.tolerance,
            "iterations": self.iterations,
            "notes": list(self.notes),
        }


def _width_note(c: FitConstraints) -> list[str]:
    notes = []
    prod = c.width_min * c.width_max
    if abs(prod / 100.0 - 1.0) < PRODUCT_TOL:
        notes.append(
            f"width product {prod:.4g} is close to 100: widths look like they are quoted 10x too large; "
            "dividing both by 10 restores the unit product")
    return notes


def _model(p: OscillatorParams, b0: float) -> dict[str, float]:
    lo, hi = osc.rho_extrema(p)
    s = math.sqrt(p.c0)
    return {"width_min": lo / s, "width_max": hi / s, "amplitude": abs(b0) * abs(p.A) / p.c0}


def _residuals(c: FitConstraints, p: OscillatorParams, b0: float, extra=()) -> dict[str, float]:
    m = _model(p, b0)
    out = {k: float(abs(m[k] - getattr(c, k))) for k in ("width_min", "width_max", "amplitude")}
    for i, (t, kind, value) in enumerate(extra):
        out[f"{kind}[{i}]@t={t:.6g}"] = float(abs(_observe(kind, t, p, b0) - value))
    return out


def _observe(kind: str, t: float, p: OscillatorParams, b0: float) -> float:
    if kind == "center":
        return osc.center_orbit(t, p, b0)
    if kind == "width":
        return osc.rho(t, p) / math.sqrt(p.c0)
    if kind == "rho":
        return osc.rho(t, p)
    raise ValueError(f"unknown observable {kind!r}; expected one of {OBSERVABLES}")


def fit_closed_form(c: FitConstraints) -> FitResult:
    """Explicit inversion in the gauge B = 1, alpha = 0, beta = -pi/2."""
    nat, lx = c.natural()
    prod = nat.width_min * nat.width_max
    if abs(prod - 1.0) > PRODUCT_TOL:
        raise FitError(
            f"widths {nat.width_min:.6g} and {nat.width_max:.6g} (l_x units) multiply to {prod:.6g}; "
            f"this gauge requires 1 within {PRODUCT_TOL:.0%}. " + " ".join(_width_note(nat)))
    A = nat.width_min ** 2
    p = OscillatorParams(A, GAUGE["B"], GAUGE["alpha"], GAUGE["beta"])
    b0 = -nat.amplitude * p.c0 / A
    res = _residuals(nat, p, b0)
    return FitResult(p, b0, lx, res, True, PRODUCT_TOL, notes=_width_note(c))


def _unpack(vec, free, base):
    vals = dict(base)
    vals.update(zip(free, vec))
    return vals


def fit_least_squares(c: FitConstraints, extra=None, free=("A", "b0"), x0=None,
                      tolerance: float = 1e-8, max_iter: int = 20000) -> FitResult:
    """Nelder-Mead on the summed squared residuals.

    ``extra`` holds (t, observable, value) triples with observable in
    ``center``, ``width`` or ``rho``.  Parameters not listed in ``free`` stay
    at the gauge values (A and b0 at their starting guesses).  The start
    point defaults to A = width_min / width_max, b0 = -amplitude and the
    initial simplex is fixed, so results are reproducible.

    The three base observables cannot tell A from 1/A (which half-period
    holds the narrowest train) or the sign of b0; the start point picks
    A <= 1 and b0 <= 0.
    """
    extra = list(extra or ())
    free = tuple(free)
    for name in free:
        if name not in PARAM_NAMES:
            raise ValueError(f"unknown parameter {name!r}; expected one of {PARAM_NAMES}")
    nat, lx = c.natural()
    n_obs = 3 + len(extra)
    if n_obs < len(free):
        raise ValueError(f"{n_obs} observations cannot determine {len(free)} free parameters")
    base = {"A": nat.width_min / nat.width_max, "b0": -nat.amplitude, **GAUGE}
    if x0 is not None:
        base.update(x0)
    start = np.array([base[k] for k in free], dtype=np.float64)

    def objective(vec):
        v = _unpack(vec, free, base)
        try:
            p = OscillatorParams(v["A"], v["B"], v["alpha"], v["beta"])
        except osc.InvalidParametersError:
            return 1e30
        return sum(r * r for r in _residuals(nat, p, v["b0"], extra).values())

    simplex = [start]
    for i in range(len(free)):
        vert = start.copy()
        vert[i] += 0.05 * abs(start[i]) if start[i] != 0 else 0.05
        simplex.append(vert)
    opt = minimize(objective, start, method="Nelder-Mead",
                   options={"initial_simplex": np.array(simplex), "xatol": 1e-13, "fatol": 1e-26,
                            "maxiter": max_iter, "maxfev": 2 * max_iter})
    v = {k: float(val) for k, val in _unpack(opt.x, free, base).items()}
    p = OscillatorParams(v["A"], v["B"], v["alpha"], v["beta"])
    res = _residuals(nat, p, v["b0"], extra)
    converged = max(res.values()) < tolerance
    notes = _width_note(c)
    if not opt.success:
        notes.append(f"simplex stopped: {opt.message}")
    return FitResult(p, v["b0"], lx, res, converged, tolerance, "least_squares", int(opt.nit), notes)


def constraints_from_params(p: OscillatorParams, b0: float) -> FitConstraints:
    """Exact observables of a parameter set, for round trips."""
    m = _model(p, b0)
    return FitConstraints(m["amplitude"], m["width_min"], m["width_max"])
