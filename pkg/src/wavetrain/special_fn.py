"""Hermite polynomials, normalized Hermite functions and Gauss-Hermite rules.

``hermite_function`` is the evaluation path used everywhere else in the
package; ``hermite_phys`` is kept for cross-checks at small orders.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

HERMITE_PHYS_MAX = 64
HERMITE_FUNCTION_MAX = 512
QUADRATURE_MAX = 512


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for the weight exp(-xi^2).

    ``nodes`` are strictly increasing and symmetric about zero.  Weights of
    the outermost nodes underflow to 0.0 in double precision once the order
    exceeds roughly 380.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def integrate(self, f) -> complex | float:
        """Approximate the integral of f(xi) exp(-xi^2) over the real line."""
        return np.sum(self.weights * f(self.nodes))

    def scaled_weights(self) -> np.ndarray:
        """Weights times exp(xi^2), for integrands that already carry their Gaussian."""
        with np.errstate(divide="ignore"):
            return np.exp(np.log(self.weights) + self.nodes ** 2)


def hermite_phys(n: int, xi):
    """Physicists' Hermite polynomial H_n(xi) by the raw three-term recurrence."""
    if n < 0:
        raise ValueError(f"order must be non-negative, got {n}")
    if n > HERMITE_PHYS_MAX:
        raise OverflowError(
            f"hermite_phys order {n} > {HERMITE_PHYS_MAX}: the unnormalized recurrence "
            "risks overflow, use hermite_function instead")
    xi = np.asarray(xi, dtype=np.float64)
    h_prev = np.zeros_like(xi)
    h = np.ones_like(xi)
    for k in range(n):
        h, h_prev = 2.0 * xi * h - 2.0 * k * h_prev, h
    return h if h.ndim else float(h)


def hermite_function(n: int, xi):
    """Normalized Hermite function pi^(-1/4) (2^n n!)^(-1/2) H_n(xi) exp(-xi^2/2).

    Evaluated through the normalized recurrence, so no intermediate value
    grows like 2^n n!.
    """
    if n < 0 or n > HERMITE_FUNCTION_MAX:
        raise ValueError(f"order must be in [0, {HERMITE_FUNCTION_MAX}], got {n}")
    xi = np.asarray(xi, dtype=np.float64)
    out = _kernels.hermite_function_values(n, xi)
    return out if out.ndim else float(out)


def hermite_functions(n_max: int, xi) -> np.ndarray:
    """All orders 0..n_max at once; shape (n_max + 1, *xi.shape)."""
    if n_max < 0 or n_max > HERMITE_FUNCTION_MAX:
        raise ValueError(f"order must be in [0, {HERMITE_FUNCTION_MAX}], got {n_max}")
    return _kernels.hermite_table(n_max, np.asarray(xi, dtype=np.float64))


def hermite_function_derivative(n: int, xi):
    """d/dxi of hermite_function via sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1}."""
    table = hermite_functions(n + 1, xi)
    lower = math.sqrt(n / 2.0) * table[n - 1] if n > 0 else 0.0
    return lower - math.sqrt((n + 1) / 2.0) * table[n + 1]


@functools.lru_cache(maxsize=64)
def gauss_hermite(order: int) -> QuadratureRule:
    """Gauss-Hermite nodes and weights, exact for polynomials of degree <= 2*order - 1."""
    if not 1 <= order <= QUADRATURE_MAX:
        raise ValueError(f"quadrature order must be in [1, {QUADRATURE_MAX}], got {order}")
    nodes, weights, failed = _kernels.gauss_hermite_nodes(order)
    if failed >= 0:
        raise QuadratureError(
            f"Newton iteration for Gauss-Hermite order {order} did not converge "
            f"at root index {failed} (counted from the largest)")
    return QuadratureRule(order, np.asarray(nodes), np.asarray(weights))
