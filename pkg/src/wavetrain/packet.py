"""Exact wave-packet-train solutions of the harmonic oscillator.

Natural units throughout: lengths in l_x, times in 1/omega_x, energies in
hbar*omega_x.  The axial solution is

    psi_n(x, t) = [sqrt(c0)/rho]^(1/2) h_n(xi) exp(i Theta_n)
    xi      = sqrt(c0) x / rho - (b0/sqrt(c0)) cos(theta)
    Theta_n = rho_dot x^2 / (2 rho) - (b0 x / rho) sin(theta)
              + (b0^2 / 4 c0) sin(2 theta) - (n + 1/2) theta - omega_r t

with h_n the normalized Hermite function, which absorbs the
[sqrt(pi) 2^n n!]^(-1/2) prefactor and the Gaussian.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import oscillator as osc
from .oscillator import OscillatorParams
from .special_fn import hermite_function

TRAIN_N_MAX = 64


@dataclass(frozen=True)
class TrainSpec:
    n: int
    b0: float = 0.0
    omega_r: float = 40.0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise ValueError(f"quantum number must be a non-negative integer, got {self.n!r}")
        if self.n > TRAIN_N_MAX:
            raise ValueError(f"quantum number {self.n} exceeds {TRAIN_N_MAX}")
        if not self.omega_r > 0:
            raise ValueError(f"omega_r must be positive, got {self.omega_r}")

    def with_n(self, n: int) -> "TrainSpec":
        return TrainSpec(n, self.b0, self.omega_r)


@dataclass
class ComplexField:
    """Samples of a complex field on a tensor grid.

    ``axes`` maps axis name to its 1-D coordinate array, in sample order;
    ``samples.shape`` equals the tuple of axis lengths.
    """

    axes: dict[str, np.ndarray]
    samples: np.ndarray
    units: str = "l_x"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(len(v) for v in self.axes.values())
        if self.samples.shape != shape:
            raise ValueError(f"samples shape {self.samples.shape} does not match axes {shape}")

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.samples) ** 2


@dataclass(frozen=True)
class CoefficientState:
    """Ansatz coefficients of psi = a_n H_n(e x - f) exp(b x - c x^2 - f^2/2) at one time."""

    t: float
    b: complex
    c: complex
    e: float
    f: float
    a_n: complex
    log_abs_a_n: float


def xi(x, t, p: OscillatorParams, ts: TrainSpec):
    x = np.asarray(x, dtype=np.float64)
    sc0 = math.sqrt(p.c0)
    return sc0 * x / np.asarray(osc.rho(t, p)) - ts.b0 / sc0 * np.cos(osc.theta(t, p))


def phase(x, t, p: OscillatorParams, ts: TrainSpec):
    """Theta_n(x, t), continuous in both arguments."""
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    c0 = p.c0
    r = np.asarray(osc.rho(t, p))
    rd = np.asarray(osc.rho_dot(t, p))
    th = np.asarray(osc.theta(t, p))
    return (rd * x ** 2 / (2.0 * r)
            - ts.b0 * x / r * np.sin(th)
            + ts.b0 ** 2 / (4.0 * c0) * np.sin(2.0 * th)
            - (0.5 + ts.n) * th
            - ts.omega_r * t)


def amplitude(x, t, p: OscillatorParams, ts: TrainSpec):
    """Signed real amplitude [sqrt(c0)/rho]^(1/2) h_n(xi)."""
    r = np.asarray(osc.rho(t, p))
    return np.sqrt(math.sqrt(p.c0) / r) * hermite_function(ts.n, xi(x, t, p, ts))


def psi_axial(x, t, p: OscillatorParams, ts: TrainSpec):
    """Axial wavefunction psi_n(x, t); broadcasts over x and t."""
    out = amplitude(x, t, p, ts) * np.exp(1j * phase(x, t, p, ts))
    return complex(out) if np.ndim(out) == 0 else out


def transverse_length(ts: TrainSpec) -> float:
    """l_r / l_x = (omega_x / omega_r)^(1/2)."""
    return 1.0 / math.sqrt(ts.omega_r)


def psi_full(x, y, z, t, p: OscillatorParams, ts: TrainSpec, lr_ratio: float | None = None):
    """Full wavefunction with the transverse ground state (sqrt(pi) l_r)^-1 exp(-(y^2+z^2)/(2 l_r^2)).

    ``lr_ratio`` is l_x / l_r and must satisfy lr_ratio^2 = omega_r; it is
    derived from ``ts`` when omitted.
    """
    if lr_ratio is None:
        lr_ratio = math.sqrt(ts.omega_r)
    elif not math.isclose(lr_ratio ** 2, ts.omega_r, rel_tol=1e-9):
        raise ValueError(
            f"lr_ratio^2 = {lr_ratio ** 2:.12g} is inconsistent with omega_r = {ts.omega_r:.12g}")
    lr = 1.0 / lr_ratio
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    transverse = np.exp(-(y ** 2 + z ** 2) / (2.0 * lr ** 2)) / (math.sqrt(math.pi) * lr)
    out = psi_axial(x, t, p, ts) * transverse
    return complex(out) if np.ndim(out) == 0 else out


def coefficients(t: float, p: OscillatorParams, ts: TrainSpec) -> CoefficientState:
    r = osc.rho(t, p)
    rd = osc.rho_dot(t, p)
    th = osc.theta(t, p)
    c0 = p.c0
    thd = c0 / r ** 2
    n = ts.n
    # |A0|^2 = sqrt(c0) / (sqrt(pi) 2^n n!), kept in log form
    log_a0 = 0.5 * (0.5 * math.log(c0) - 0.5 * math.log(math.pi) - n * math.log(2.0) - math.lgamma(n + 1))
    log_abs_a = log_a0 - 0.5 * math.log(r)
    arg = (0.5 + n) * th + ts.omega_r * t - ts.b0 ** 2 / (4.0 * c0) * math.sin(2.0 * th)
    a_n = math.exp(log_abs_a) * complex(math.cos(arg), -math.sin(arg)) if log_abs_a > -700 else 0j
    return CoefficientState(
        t=float(t),
        b=ts.b0 * complex(math.cos(th), -math.sin(th)) / r,
        c=complex(0.5 * thd, -rd / (2.0 * r)),
        e=math.sqrt(c0) / r,
        f=ts.b0 / math.sqrt(c0) * math.cos(th),
        a_n=a_n,
        log_abs_a_n=log_abs_a,
    )


def energy_level(p: OscillatorParams, ts: TrainSpec) -> float:
    """E_n = (n + 1/2) c1/c0 + omega_r + (b0^2/c0) c2, in hbar*omega_x."""
    cs = osc.conserved(p)
    return (0.5 + ts.n) * cs.c1 / cs.c0 + ts.omega_r + ts.b0 ** 2 / cs.c0 * cs.c2


def packet_width(t, p: OscillatorParams):
    """Average packet width rho(t)/sqrt(c0)."""
    return np.asarray(osc.rho(t, p)) / math.sqrt(p.c0)


def train_window(t, p: OscillatorParams, ts: TrainSpec, margin: float | None = None) -> tuple[float, float]:
    """x-interval holding the train at time t with |psi| below ~1e-12 outside.

    The half width is (rho/sqrt(c0)) (sqrt(2n+1) + margin) around x_c(t);
    the default margin follows the Hermite tail, which needs less room as n grows.
    """
    if margin is None:
        margin = tail_margin(ts.n)
    xc = osc.center_orbit(t, p, ts.b0)
    half = float(packet_width(t, p)) * (math.sqrt(2 * ts.n + 1) + margin)
    return xc - half, xc + half


@functools.lru_cache(maxsize=None)
def tail_margin(n: int, threshold: float = 1e-13) -> float:
    """Distance past the turning point sqrt(2n+1) where |h_n| first stays below ``threshold``."""
    turning = math.sqrt(2 * n + 1)
    grid = np.linspace(turning, turning + 12.0, 2401)
    vals = np.abs(hermite_function(n, grid))
    above = np.nonzero(vals > threshold)[0]
    edge = grid[above[-1]] if above.size else turning
    return edge - turning + 0.25


def sample_axial(x, times, p: OscillatorParams, ts: TrainSpec) -> ComplexField:
    x = np.asarray(x, dtype=np.float64)
    times = np.atleast_1d(np.asarray(times, dtype=np.float64))
    samples = psi_axial(x[None, :], times[:, None], p, ts)
    return ComplexField({"t": times, "x": x}, np.asarray(samples))
