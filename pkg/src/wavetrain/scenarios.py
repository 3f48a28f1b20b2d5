"""Figure presets and the scenario runner that writes CSV grids and metadata."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import find_peaks

from . import checker
from . import oscillator as osc
from . import packet as pk
from .oscillator import OscillatorParams
from .packet import TrainSpec
from .units import LI7_MASS_AMU, PhysicalUnits, convert_units

OUTPUT_KINDS = ("density_xy", "density_profile", "vertical_view", "report")
PRESET_NAMES = ("fig1", "fig2", "fig3", "fig4", "fig5")
EXTENT_LEVEL = 1e-4
PEAK_FLOOR = 1e-8
HALF_PI = 0.5 * math.pi


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """x-grid per sampled time plus the transverse y-grid.

    With ``x_min``/``x_max`` unset every time gets its own window around the
    train (``packet.train_window``), so a collapsing train stays resolved.
    """

    x_min: float | None = None
    x_max: float | None = None
    points: int = 1024
    y_min: float | None = None
    y_max: float | None = None
    y_points: int = 33

    def __post_init__(self):
        if (self.x_min is None) != (self.x_max is None):
            raise ScenarioError("grid.x_min and grid.x_max must be given together")
        if self.x_min is not None and not self.x_max > self.x_min:
            raise ScenarioError(f"empty x interval [{self.x_min}, {self.x_max}]")
        if (self.y_min is None) != (self.y_max is None):
            raise ScenarioError("grid.y_min and grid.y_max must be given together")
        if self.y_min is not None and not self.y_max > self.y_min:
            raise ScenarioError(f"empty y interval [{self.y_min}, {self.y_max}]")
        if self.points < 16 or self.y_points < 1:
            raise ScenarioError("grid needs points >= 16 and y_points >= 1")

    def x_axis(self, t, p, ts) -> np.ndarray:
        lo, hi = (self.x_min, self.x_max) if self.x_min is not None else pk.train_window(t, p, ts)
        return np.linspace(lo, hi, self.points)

    def y_axis(self, ts) -> np.ndarray:
        if self.y_min is not None:
            return np.linspace(self.y_min, self.y_max, self.y_points)
        half = 4.0 * pk.transverse_length(ts)
        return np.linspace(-half, half, self.y_points)


@dataclass(frozen=True)
class Transition:
    """Sudden change of quantum number at time ``t``; the oscillator orbit is kept."""

    t: float
    n: int


@dataclass(frozen=True)
class Scenario:
    name: str
    params: OscillatorParams
    train: TrainSpec
    times: tuple[float, ...]
    grid: GridSpec = field(default_factory=GridSpec)
    outputs: tuple[str, ...] = ("density_profile",)
    units: PhysicalUnits = field(default_factory=convert_units)
    g1d: float = 0.0
    transition: Transition | None = None

    def __post_init__(self):
        if self.name not in PRESET_NAMES + ("custom",):
            raise ScenarioError(f"unknown scenario name {self.name!r}")
        if not self.times:
            raise ScenarioError("scenario needs at least one time")
        bad = [o for o in self.outputs if o not in OUTPUT_KINDS]
        if bad:
            raise ScenarioError(f"unknown output kind(s) {bad}; expected {OUTPUT_KINDS}")

    def train_at(self, t: float) -> TrainSpec:
        if self.transition is not None and t >= self.transition.t:
            return self.train.with_n(self.transition.n)
        return self.train


def _gauge_params(A: float) -> OscillatorParams:
    return OscillatorParams(A, 1.0, 0.0, -HALF_PI)


_FULL = ("density_xy", "density_profile", "vertical_view", "report")


def preset(name: str) -> Scenario:
    """Caption parameter sets; fig4 is the axial view of fig3 and fig5 its n = 10 -> 6 transition."""
    if name == "fig1":
        return Scenario("fig1", _gauge_params(1.0), TrainSpec(10, -5.0, 40.0), (0.0, HALF_PI, math.pi),
                        outputs=_FULL)
    if name == "fig2":
        return Scenario("fig2", _gauge_params(0.01), TrainSpec(10, 0.0, 40.0), (0.0, 0.25 * math.pi, HALF_PI),
                        outputs=_FULL)
    if name == "fig3":
        return Scenario("fig3", _gauge_params(0.4624), TrainSpec(10, -17.437, 40.0), (0.0, HALF_PI, math.pi),
                        outputs=_FULL)
    if name == "fig4":
        return replace(preset("fig3"), name="fig4", outputs=("density_profile", "vertical_view"),
                       grid=GridSpec(y_points=1))
    if name == "fig5":
        return replace(preset("fig3"), name="fig5", times=(2.0 * math.pi, 2.5 * math.pi, 3.0 * math.pi),
                       transition=Transition(2.0 * math.pi, 6))
    raise ScenarioError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")


# --- measurements -----------------------------------------------------------

def count_peaks(values, floor: float = PEAK_FLOOR) -> int:
    values = np.asarray(values, dtype=np.float64)
    peaks, _ = find_peaks(values, height=floor * float(np.max(values)))
    return int(len(peaks))


def extent(x, values, level: float = EXTENT_LEVEL) -> tuple[float, float]:
    """Outermost grid points where values exceed ``level`` times the peak."""
    above = np.nonzero(values > level * np.max(values))[0]
    return float(x[above[0]]), float(x[above[-1]])


def measure(x, marginal, t, p, ts) -> dict:
    w = marginal / np.sum(marginal)
    center = float(np.sum(w * x))
    var = float(np.sum(w * (x - center) ** 2))
    lo, hi = extent(x, marginal)
    return {
        "t": float(t),
        "n": ts.n,
        "peak_count": count_peaks(marginal),
        "center": center,
        "center_closed_form": float(osc.center_orbit(t, p, ts.b0)),
        "width_rho": float(pk.packet_width(t, p)),
        # <xi^2> = n + 1/2 for a Hermite function
        "width_from_variance": math.sqrt(var / (ts.n + 0.5)),
        "peak_density": float(np.max(marginal)),
        "extent_level": EXTENT_LEVEL,
        "extent": [lo, hi],
        "total_width": hi - lo,
    }


# --- output -----------------------------------------------------------------

def _write_csv(path, header: str, rows: np.ndarray) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def scenario_to_mapping(s: Scenario) -> dict:
    """Flat key -> value form, the same keys ``config.load_config`` reads."""
    out = {
        "scenario": s.name,
        "n": s.train.n,
        "A": s.params.A,
        "B": s.params.B,
        "alpha": s.params.alpha,
        "beta": s.params.beta,
        "b0": s.train.b0,
        "omega_r": s.train.omega_r,
        "omega_x_si": s.units.omega_x_si,
        "mass_amu": s.units.mass_amu,
        "grid.x_min": s.grid.x_min,
        "grid.x_max": s.grid.x_max,
        "grid.points": s.grid.points,
        "grid.y_min": s.grid.y_min,
        "grid.y_max": s.grid.y_max,
        "grid.y_points": s.grid.y_points,
        "times": list(s.times),
        "outputs": list(s.outputs),
        "g1d": s.g1d,
    }
    if s.transition is not None:
        out["transition.t"] = s.transition.t
        out["transition.n"] = s.transition.n
    return {k: v for k, v in out.items() if v is not None}


def _dump_json(path, doc) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2, allow_nan=False)
        fh.write("\n")


def run_scenario(s: Scenario, out_dir) -> dict[str, str]:
    """Evaluate the scenario and write one file per output plus ``<name>_metadata.json``.

    Returns a manifest {kind: path}.  Output is byte-identical across runs.
    """
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise ScenarioError(f"cannot create output directory {out_dir!r}: {exc}") from exc
    if not os.access(out_dir, os.W_OK):
        raise ScenarioError(f"output directory {out_dir!r} is not writable")
    p = s.params
    prefix = os.path.join(out_dir, s.name)
    xy_rows, profile_rows, view_rows, measurements = [], [], [], []
    for t in s.times:
        ts = s.train_at(t)
        x = s.grid.x_axis(t, p, ts)
        psi = np.asarray(pk.psi_axial(x, t, p, ts))
        lr = pk.transverse_length(ts)
        profile = np.abs(psi) ** 2 / (math.pi * lr * lr)  # |psi(x, 0, 0)|^2
        marginal = np.abs(psi) ** 2 / (math.sqrt(math.pi) * lr)  # integral over y at z = 0
        measurements.append(measure(x, marginal, t, p, ts))
        tcol = np.full_like(x, t)
        if "density_profile" in s.outputs:
            profile_rows.append(np.column_stack([tcol, x, profile]))
        if "vertical_view" in s.outputs:
            view_rows.append(np.column_stack([tcol, x, marginal]))
        if "density_xy" in s.outputs:
            y = s.grid.y_axis(ts)
            dens = np.abs(pk.psi_full(x[:, None], y[None, :], 0.0, t, p, ts)) ** 2
            xx, yy = np.meshgrid(x, y, indexing="ij")
            xy_rows.append(np.column_stack([np.full(xx.size, t), xx.ravel(), yy.ravel(), dens.ravel()]))

    manifest = {}
    for kind, header, rows in (("density_xy", "t,x,y,density", xy_rows),
                               ("density_profile", "t,x,density", profile_rows),
                               ("vertical_view", "t,x,density", view_rows)):
        if kind in s.outputs:
            path = f"{prefix}_{kind}.csv"
            _write_csv(path, header, np.vstack(rows))
            manifest[kind] = path
    if "report" in s.outputs:
        final = s.train_at(s.times[-1])
        same_n = [t for t in s.times if s.train_at(t) == final]
        rep = checker.full_report(p, final, checker.ReportConfig(times=tuple(same_n)))
        path = f"{prefix}_report.json"
        _dump_json(path, rep.to_dict())
        manifest["report"] = path

    cs = osc.conserved(p)
    meta = {
        "config": scenario_to_mapping(s),
        "params": {"A": p.A, "B": p.B, "alpha": p.alpha, "beta": p.beta, "omega_x": p.omega_x},
        "train": {"n": s.train.n, "b0": s.train.b0, "omega_r": s.train.omega_r},
        "transition": None if s.transition is None else {"t": s.transition.t, "n": s.transition.n},
        "conserved": {"c0": cs.c0, "c1": cs.c1, "c2": cs.c2},
        "energy_level": {str(n): pk.energy_level(p, s.train.with_n(n))
                         for n in sorted({s.train_at(t).n for t in s.times})},
        "rho_extrema": list(osc.rho_extrema(p)),
        "units": s.units.as_dict(),
        "length_unit": "l_x",
        "density_unit": "l_x^-3 (profile, xy) and l_x^-2 (vertical_view)",
        "measurements": measurements,
        "files": {k: os.path.basename(v) for k, v in manifest.items()},
    }
    path = f"{prefix}_metadata.json"
    _dump_json(path, meta)
    manifest["metadata"] = path
    return manifest
