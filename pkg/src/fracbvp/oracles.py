"""Slow, independent reference implementations for the test suite.

Nothing here shares quadrature, kernel or gamma code with the main
modules: closed forms come from textbook identities for the identity
coordinate map, the integral fallback is a plain composite trapezoid
rule at high resolution, maxima are brute-force grid scans, and the
gamma values come from the standard library.  Agreement between these
paths and the library is what the tests lean on.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

__all__ = [
    "ORACLE_RESOLUTION",
    "oracle_power_integral",
    "oracle_frac_integral",
    "oracle_classical_green",
    "oracle_grid_max",
]

# trapezoid point count: ten times the main grid's node budget
ORACLE_RESOLUTION = 100_000


def oracle_power_integral(alpha: float, k: float, t: float) -> float:
    """Closed form of the order-alpha integral of s**k (identity map):

        Gamma(k+1) / Gamma(k+1+alpha) * t**(k+alpha)
    """
    return math.gamma(k + 1.0) / math.gamma(k + 1.0 + alpha) * t ** (k + alpha)


def oracle_frac_integral(alpha: float, u: Callable, t: float,
                         n: int = ORACLE_RESOLUTION) -> float:
    """Trapezoid evaluation of the order-alpha integral, identity map.

    Documented error is below 1e-8 for smooth u and alpha >= 1.5 (the
    kernel's endpoint derivative blow-up limits the plain trapezoid rule
    below that); for smaller orders use the closed forms instead.
    """
    if t == 0.0:
        return 0.0
    s = np.linspace(0.0, t, n + 1)
    if alpha == 1.0:
        kern = np.ones_like(s)
    else:
        kern = np.zeros_like(s)
        np.power(t - s, alpha - 1.0, out=kern, where=(t - s) > 0.0)
    vals = np.asarray(u(s), dtype=float)
    if vals.shape != s.shape:
        vals = np.broadcast_to(vals, s.shape)
    return float(np.trapezoid(kern * vals, s) / math.gamma(alpha))


def oracle_classical_green(t: float, s: float) -> float:
    """Hand-simplified kernel for order 3, identity map, beta = 0:

        [t**2 * (1 - s) - (t - s)**2 * 1_{s <= t}] / 2
    """
    value = t * t * (1.0 - s)
    if s <= t:
        value -= (t - s) ** 2
    return 0.5 * value


def oracle_grid_max(fn: Callable, gridsize: int) -> float:
    """Brute-force maximum of fn over a uniform grid on [0, 1]."""
    if gridsize < 2:
        raise ValueError(f"gridsize must be at least 2, got {gridsize}")
    xs = np.linspace(0.0, 1.0, gridsize)
    try:
        vals = np.asarray(fn(xs), dtype=float)
        if vals.shape != xs.shape:
            vals = np.broadcast_to(vals, xs.shape)
    except (TypeError, ValueError):
        vals = np.array([float(fn(x)) for x in xs])
    return float(np.max(vals))
