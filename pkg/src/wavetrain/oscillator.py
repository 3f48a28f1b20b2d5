"""Classical complex oscillator phi = rho exp(i theta) and the train center orbit.

phi(t) = A cos(w t + alpha) + i B cos(w t + beta) solves phi'' = -w^2 phi.
Everything here is in natural units (m = hbar = 1); ``omega_x`` defaults
to 1 and is only kept as a field so the formulas stay honest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class InvalidParametersError(ValueError):
    """Raised for oscillator constants with c0 = A B w sin(alpha - beta) <= 0."""


@dataclass(frozen=True)
class OscillatorParams:
    A: float
    B: float
    alpha: float
    beta: float
    omega_x: float = 1.0

    def __post_init__(self):
        if not self.omega_x > 0:
            raise InvalidParametersError(f"omega_x must be positive, got {self.omega_x}")
        c0 = self.c0
        if not c0 > 0:
            raise InvalidParametersError(
                f"c0 = A*B*omega_x*sin(alpha - beta) = {c0:.6g} must be positive "
                f"(A={self.A}, B={self.B}, alpha={self.alpha}, beta={self.beta})")

    @property
    def c0(self) -> float:
        return self.A * self.B * self.omega_x * math.sin(self.alpha - self.beta)

    def scaled(self, s: float) -> "OscillatorParams":
        """Same orbit under the gauge (A, B) -> (sA, sB)."""
        return OscillatorParams(s * self.A, s * self.B, self.alpha, self.beta, self.omega_x)


@dataclass(frozen=True)
class ConservedSet:
    c0: float
    c1: float
    c2: float


def pure_soliton(A: float = 1.0, alpha: float = 0.0, omega_x: float = 1.0) -> OscillatorParams:
    """A = B, beta = alpha - pi/2: constant rho = A."""
    return OscillatorParams(A, A, alpha, alpha - 0.5 * math.pi, omega_x)


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def phi(t, p: OscillatorParams):
    t = np.asarray(t, dtype=np.float64)
    w = p.omega_x
    return _scalar(p.A * np.cos(w * t + p.alpha) + 1j * p.B * np.cos(w * t + p.beta))


def rho(t, p: OscillatorParams):
    t = np.asarray(t, dtype=np.float64)
    w = p.omega_x
    ca = p.A * np.cos(w * t + p.alpha)
    cb = p.B * np.cos(w * t + p.beta)
    return _scalar(np.hypot(ca, cb))


def rho_dot(t, p: OscillatorParams):
    t = np.asarray(t, dtype=np.float64)
    w = p.omega_x
    ua = w * t + p.alpha
    ub = w * t + p.beta
    num = p.A ** 2 * np.cos(ua) * np.sin(ua) + p.B ** 2 * np.cos(ub) * np.sin(ub)
    return _scalar(-w * num / np.hypot(p.A * np.cos(ua), p.B * np.cos(ub)))


def theta_dot(t, p: OscillatorParams):
    r = np.asarray(rho(t, p))
    return _scalar(p.c0 / r ** 2)


def _wrap(a):
    return np.mod(a + math.pi, 2.0 * math.pi) - math.pi


def _rotation_angle(p: OscillatorParams) -> float:
    # phi = M (cos wt, sin wt) with det M = c0/w > 0.  Writing M = R(gamma) S with S
    # symmetric positive definite, arg(phi) - (wt + gamma) stays inside (-pi/2, pi/2).
    m00, m01 = p.A * math.cos(p.alpha), -p.A * math.sin(p.alpha)
    m10, m11 = p.B * math.cos(p.beta), -p.B * math.sin(p.beta)
    return math.atan2(m10 - m01, m00 + m11)


def theta(t, p: OscillatorParams):
    """Continuous phase of phi.

    Starts on the principal branch of atan2 at t = 0 and is strictly
    increasing (theta_dot = c0 / rho^2 > 0).  Closed form, so single-time and
    swept queries agree exactly.
    """
    t = np.asarray(t, dtype=np.float64)
    w = p.omega_x
    gamma = _rotation_angle(p)
    raw = np.arctan2(p.B * np.cos(w * t + p.beta), p.A * np.cos(w * t + p.alpha))
    raw0 = math.atan2(p.B * math.cos(p.beta), p.A * math.cos(p.alpha))
    out = raw0 + w * t + _wrap(raw - w * t - gamma) - _wrap(raw0 - gamma)
    return _scalar(out)


def conserved(p: OscillatorParams) -> ConservedSet:
    """c0 = rho^2 theta_dot, c1 = (rho_dot^2 + c0^2/rho^2 + w^2 rho^2)/2, c2 = A^2 c1 / ((A^2+B^2) c0)."""
    c0 = p.c0
    if not c0 > 0:
        raise InvalidParametersError(f"c0 = {c0:.6g} must be positive")
    r = rho(0.0, p)
    rd = rho_dot(0.0, p)
    c1 = 0.5 * (rd ** 2 + c0 ** 2 / r ** 2 + p.omega_x ** 2 * r ** 2)
    c2 = p.A ** 2 * c1 / ((p.A ** 2 + p.B ** 2) * c0)
    return ConservedSet(c0, c1, c2)


def c1_expression(t, p: OscillatorParams):
    """The first-integral expression for c1 evaluated at time t (constant in t)."""
    r = np.asarray(rho(t, p))
    rd = np.asarray(rho_dot(t, p))
    c0 = p.c0
    return _scalar(0.5 * (rd ** 2 + c0 ** 2 / r ** 2 + p.omega_x ** 2 * r ** 2))


def c2_expression(t, p: OscillatorParams):
    """Time-dependent form theta_dot/2 + (c1/c0 - theta_dot) cos^2 theta - (rho_dot/rho) cos theta sin theta."""
    cs = conserved(p)
    r = np.asarray(rho(t, p))
    rd = np.asarray(rho_dot(t, p))
    th = np.asarray(theta(t, p))
    thd = cs.c0 / r ** 2
    out = 0.5 * thd + (cs.c1 / cs.c0 - thd) * np.cos(th) ** 2 - rd / r * np.cos(th) * np.sin(th)
    return _scalar(out)


def center_orbit(t, p: OscillatorParams, b0: float):
    """x_c = (b0/c0) A cos(w t + alpha), the point where xi = 0."""
    t = np.asarray(t, dtype=np.float64)
    return _scalar(b0 / p.c0 * p.A * np.cos(p.omega_x * t + p.alpha))


def rho_extrema(p: OscillatorParams) -> tuple[float, float]:
    """(min, max) of rho over a period, from rho^2 = (A^2+B^2)/2 + Re[(A^2 e^{2i alpha} + B^2 e^{2i beta}) e^{2iwt}]/2."""
    mean = 0.5 * (p.A ** 2 + p.B ** 2)
    amp = 0.5 * abs(p.A ** 2 * np.exp(2j * p.alpha) + p.B ** 2 * np.exp(2j * p.beta))
    return math.sqrt(max(mean - amp, 0.0)), math.sqrt(mean + amp)
