"""Hot inner loops, compiled with numba when available.

Each kernel has a vectorized numpy implementation (``*_np``) and a loop
implementation compiled with ``numba.njit`` (``*_nb``).  The public names
(``hermite_function_values``, ``hermite_table``, ``gauss_hermite_nodes``,
``phase_kick``) are bound to one of the two at import time.

Set ``WAVETRAIN_DISABLE_NUMBA=1`` to force the numpy path.
"""
import math
import os

import numpy as np

PI_M14 = math.pi ** -0.25

try:
    if os.environ.get("WAVETRAIN_DISABLE_NUMBA", "").strip() not in ("", "0"):
        raise ImportError("disabled by WAVETRAIN_DISABLE_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA


# ---------------------------------------------------------------------------
# Normalized Hermite functions
#   h_0 = pi^(-1/4) exp(-xi^2/2)
#   h_{k+1} = xi sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1}
# ---------------------------------------------------------------------------

def hermite_function_values_np(n, xi):
    xi = np.asarray(xi, dtype=np.float64)
    h_prev = np.zeros_like(xi)
    h = PI_M14 * np.exp(-0.5 * xi * xi)
    for k in range(n):
        h, h_prev = xi * math.sqrt(2.0 / (k + 1)) * h - math.sqrt(k / (k + 1)) * h_prev, h
    return h


def hermite_table_np(n_max, xi):
    xi = np.asarray(xi, dtype=np.float64)
    out = np.empty((n_max + 1,) + xi.shape)
    out[0] = PI_M14 * np.exp(-0.5 * xi * xi)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for k in range(1, n_max):
        out[k + 1] = xi * math.sqrt(2.0 / (k + 1)) * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def _recurrence_coeffs(n):
    k = np.arange(max(n, 1), dtype=np.float64)
    return np.sqrt(2.0 / (k + 1.0)), np.sqrt(k / (k + 1.0))


def _hermite_function_values_loop(n, xi):
    flat = xi.ravel()
    out = np.empty(flat.size)
    a, b = _recurrence_coeffs(n)
    for i in range(flat.size):
        x = flat[i]
        h_prev = 0.0
        h = PI_M14 * math.exp(-0.5 * x * x)
        for k in range(n):
            h_next = x * a[k] * h - b[k] * h_prev
            h_prev = h
            h = h_next
        out[i] = h
    return out


def _hermite_table_loop(n_max, xi):
    flat = xi.ravel()
    m = flat.size
    out = np.empty((n_max + 1, m))
    a, b = _recurrence_coeffs(n_max)
    for i in range(m):
        out[0, i] = PI_M14 * math.exp(-0.5 * flat[i] * flat[i])
    if n_max >= 1:
        for i in range(m):
            out[1, i] = math.sqrt(2.0) * flat[i] * out[0, i]
    for k in range(1, n_max):
        for i in range(m):
            out[k + 1, i] = flat[i] * a[k] * out[k, i] - b[k] * out[k - 1, i]
    return out


# ---------------------------------------------------------------------------
# Gauss-Hermite nodes: Newton on the normalized recurrence.  Each positive
# root is seeded independently: the first Airy zero for the largest root,
# the WKB phase condition (nu/4)(2 phi - sin 2 phi) = (k - 1/4) pi elsewhere.
# ---------------------------------------------------------------------------

NEWTON_TOL = 1e-14
NEWTON_MAXIT = 100
AIRY_ZERO_1 = -2.338107410459767


def _gh_newton_loop(order, tol, maxit):
    """Return (nodes ascending, weights, failed_index).  failed_index is -1 on success."""
    m = (order + 1) // 2
    x = np.zeros(order)
    w = np.zeros(order)
    for i in range(m):
        k = i + 1
        nu = 2.0 * order + 1.0
        if order % 2 == 1 and i == m - 1:
            z = 0.0
        elif k == 1:
            z = math.sqrt(nu) + AIRY_ZERO_1 * 2.0 ** (-1.0 / 3.0) * nu ** (-1.0 / 6.0)
        else:
            # k-th largest root: (nu/4)(2 phi - sin 2 phi) = (k - 1/4) pi, z = sqrt(nu) cos phi
            rhs = math.pi * (4.0 * k - 1.0) / nu
            phi = min((0.75 * rhs) ** (1.0 / 3.0), 0.5 * math.pi)
            for _ in range(60):
                dphi = (2.0 * phi - math.sin(2.0 * phi) - rhs) / (2.0 - 2.0 * math.cos(2.0 * phi))
                phi -= dphi
                if abs(dphi) < 1e-15:
                    break
            z = math.sqrt(nu) * math.cos(phi)
        converged = False
        pp = 1.0
        for _ in range(maxit):
            p1 = PI_M14
            p2 = 0.0
            for j in range(order):
                p3 = p2
                p2 = p1
                p1 = z * math.sqrt(2.0 / (j + 1)) * p2 - math.sqrt(j / (j + 1.0)) * p3
            pp = math.sqrt(2.0 * order) * p2
            step = p1 / pp
            z = z - step
            if abs(step) <= tol * max(1.0, abs(z)):
                converged = True
                break
        # roots must come out strictly decreasing and non-negative
        if not converged or z < -tol or (i > 0 and z >= x[i - 1]):
            return x, w, i
        x[i] = z
        x[order - 1 - i] = -z
        w[i] = (2.0 / pp) / pp
        w[order - 1 - i] = w[i]
    return x[::-1].copy(), w[::-1].copy(), -1


def gauss_hermite_nodes_np(order, tol=NEWTON_TOL, maxit=NEWTON_MAXIT):
    # same recurrence as the compiled path, run by the interpreter
    return _gh_newton_loop(order, tol, maxit)


# ---------------------------------------------------------------------------
# Split-step potential / nonlinear phase kick:
#   psi <- psi * exp(-i (v_dt + g_dt |psi|^2))
# ---------------------------------------------------------------------------

def phase_kick_np(psi, v_dt, g_dt):
    phase = v_dt + g_dt * (psi.real * psi.real + psi.imag * psi.imag) if g_dt != 0.0 else v_dt
    psi *= np.cos(phase) - 1j * np.sin(phase)
    return psi


def _phase_kick_loop(psi, v_dt, g_dt):
    for i in range(psi.size):
        z = psi[i]
        ph = v_dt[i] + g_dt * (z.real * z.real + z.imag * z.imag)
        c = math.cos(ph)
        s = math.sin(ph)
        psi[i] = complex(z.real * c + z.imag * s, z.imag * c - z.real * s)
    return psi


if HAVE_NUMBA:
    _recurrence_coeffs = njit(cache=True)(_recurrence_coeffs)
    hermite_function_values_nb = njit(cache=True)(_hermite_function_values_loop)
    hermite_table_nb = njit(cache=True)(_hermite_table_loop)
    _gh_newton_nb = njit(cache=True)(_gh_newton_loop)
    phase_kick_nb = njit(cache=True)(_phase_kick_loop)

    def gauss_hermite_nodes_nb(order, tol=NEWTON_TOL, maxit=NEWTON_MAXIT):
        return _gh_newton_nb(order, tol, maxit)
else:
    hermite_function_values_nb = None
    hermite_table_nb = None
    gauss_hermite_nodes_nb = None
    phase_kick_nb = None


def _pick(nb_fn, np_fn):
    return nb_fn if USE_NUMBA else np_fn


def hermite_function_values(n, xi):
    xi = np.asarray(xi, dtype=np.float64)
    if USE_NUMBA:
        return hermite_function_values_nb(n, np.ascontiguousarray(xi)).reshape(xi.shape)
    return hermite_function_values_np(n, xi)


def hermite_table(n_max, xi):
    xi = np.asarray(xi, dtype=np.float64)
    if USE_NUMBA:
        return hermite_table_nb(n_max, np.ascontiguousarray(xi)).reshape((n_max + 1,) + xi.shape)
    return hermite_table_np(n_max, xi)


def gauss_hermite_nodes(order, tol=NEWTON_TOL, maxit=NEWTON_MAXIT):
    return _pick(gauss_hermite_nodes_nb, gauss_hermite_nodes_np)(order, tol, maxit)


def phase_kick(psi, v_dt, g_dt):
    """In-place on a contiguous 1-D complex128 array."""
    return _pick(phase_kick_nb, phase_kick_np)(psi, v_dt, float(g_dt))
