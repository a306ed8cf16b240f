"""Gamma function and the catalog of coordinate maps.

Everything downstream is built on a strictly increasing coordinate map
``phi`` on [0, 1] with a nonvanishing derivative.  A :class:`PhiMap`
bundles the map, its derivative and its inverse; ``gamma`` is a plain
function.  All objects here are immutable and safe to share between
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError

__all__ = ["gamma", "PhiMap", "phi_catalog", "PHI_KINDS"]

# Lanczos approximation with g = 7 and 9 coefficients.  Design accuracy
# is about 1e-15 relative on the positive half-line, well below the
# 1e-13 budget; no external gamma implementation is used so behaviour
# is fully pinned by this table.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x: float) -> float:
    """Gamma(x) for real x > 0.

    Satisfies ``gamma(n) == (n-1)!`` to 1e-12 relative for small integer
    n and the recurrence ``gamma(x+1) == x*gamma(x)`` to the same level.

    Raises :class:`DomainError` for x <= 0 (poles are out of scope).
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"gamma requires x > 0, got {x!r}")
    if x < 0.5:
        # reflection keeps the Lanczos sum in its accurate range
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


@dataclass(frozen=True)
class PhiMap:
    """Strictly increasing coordinate map on [0, 1].

    ``fn``, ``deriv_fn`` and ``inverse_fn`` accept floats or numpy
    arrays and are vectorized.  The inverse is defined on
    [fn(0), fn(1)].
    """

    kind: str
    fn: Callable
    deriv_fn: Callable
    inverse_fn: Callable

    def __call__(self, t):
        return self.fn(t)

    def deriv(self, t):
        return self.deriv_fn(t)

    def inverse(self, y):
        return self.inverse_fn(y)

    def shifted(self, t):
        """phi(t) - phi(0), the shifted coordinate vanishing at 0."""
        return self.fn(t) - self.fn(0.0)

    @property
    def span(self) -> float:
        """Length of the image interval, phi(1) - phi(0)."""
        return float(self.fn(1.0) - self.fn(0.0))


def _bisect_newton_inverse(fn, deriv_fn, y, lo: float = 0.0, hi: float = 1.0,
                           tol: float = 1e-12, seed_table=None):
    """Invert a strictly increasing map by bisection plus Newton polish.

    Vectorized over ``y``.  Bisections shrink a bracket well below the
    1e-12 tolerance and safeguarded Newton steps sharpen the result to
    rounding level.  ``seed_table`` is an optional precomputed
    (abscissae, values) pair used to start from a tight bracket, which
    cuts the bisection count for hot paths; the root always stays
    bracketed so the seeding cannot change which value is found.
    """
    y_arr = np.asarray(y, dtype=float)
    f_lo = float(fn(lo))
    f_hi = float(fn(hi))
    slack = 1e-9 * (f_hi - f_lo)
    if np.any(y_arr < f_lo - slack) or np.any(y_arr > f_hi + slack):
        raise DomainError("inverse argument outside the image interval")
    yc = np.clip(y_arr, f_lo, f_hi)
    if seed_table is None:
        a = np.full(yc.shape, lo, dtype=float)
        b = np.full(yc.shape, hi, dtype=float)
        n_bisect = 40
    else:
        ts_tab, ys_tab = seed_table
        idx = np.clip(np.searchsorted(ys_tab, yc), 1, ys_tab.size - 1)
        a = ts_tab[idx - 1].copy()
        b = ts_tab[idx].copy()
        n_bisect = 8
    for _ in range(n_bisect):
        m = 0.5 * (a + b)
        below = fn(m) < yc
        a = np.where(below, m, a)
        b = np.where(below, b, m)
    # Newton with bisection fallback; every evaluation tightens the
    # bracket, so a rejected step still halves the interval.  Steps are
    # accepted within one bracket-width of the bracket (roots sitting
    # exactly on an edge make Newton overshoot by rounding) and clamped
    # to the domain.
    x = 0.5 * (a + b)
    for _ in range(6):
        fx = fn(x) - yc
        negative = fx < 0.0
        a = np.where(negative, x, a)
        b = np.where(negative, b, x)
        d = deriv_fn(x)
        step = np.where(d > 0.0, fx / np.where(d > 0.0, d, 1.0), 0.0)
        xn = np.clip(x - step, lo, hi)
        width = b - a
        inside = (xn >= a - width) & (xn <= b + width)
        x = np.where(inside, xn, 0.5 * (a + b))
    if np.ndim(y) == 0:
        return float(x)
    return x


def _monotone_cubic_coefficients(ts: np.ndarray, vs: np.ndarray):
    """Shape-preserving cubic slopes and local coefficients.

    Interior slopes are the weighted harmonic means classically used for
    monotone piecewise-cubic interpolation; endpoint slopes use the
    one-sided three-point formula clamped into (0, 3*delta] so the
    interpolant stays strictly increasing up to the boundary.
    """
    h = np.diff(ts)
    delta = np.diff(vs) / h
    n = ts.size
    d = np.empty(n)
    w1 = 2.0 * h[1:] + h[:-1]
    w2 = h[1:] + 2.0 * h[:-1]
    d[1:-1] = (w1 + w2) / (w1 / delta[:-1] + w2 / delta[1:])

    def _edge(h0, h1, d0, d1):
        s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1)
        if s <= 0.0:
            return d0
        if s > 3.0 * d0:
            return 3.0 * d0
        return s

    d[0] = _edge(h[0], h[1], delta[0], delta[1])
    d[-1] = _edge(h[-1], h[-2], delta[-1], delta[-2])

    # local form v + s*(d + s*(c + s*b)) with s = t - ts[i]; exactly
    # linear data yields c = b = 0, so such tables reproduce their
    # generating line bit for bit
    c = (3.0 * delta - 2.0 * d[:-1] - d[1:]) / h
    b = (d[:-1] + d[1:] - 2.0 * delta) / (h * h)
    return d, c, b


def _table_map(samples) -> PhiMap:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 1 or (arr.ndim == 2 and arr.shape[0] == 2 and arr.shape[1] != 2):
        raise ConfigurationError("table samples must be (n, 2) rows of (t, phi(t))")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ConfigurationError("table samples must be (n, 2) rows of (t, phi(t))")
    if arr.shape[0] < 4:
        raise ConfigurationError("phi table needs at least 4 points")
    ts = arr[:, 0]
    vs = arr[:, 1]
    if np.any(~np.isfinite(ts)) or np.any(~np.isfinite(vs)):
        raise ConfigurationError("phi table contains non-finite entries")
    if np.any(np.diff(ts) <= 0.0):
        raise ConfigurationError("phi table abscissae must be strictly increasing")
    if np.any(np.diff(vs) <= 0.0):
        raise ConfigurationError("phi table values must be strictly increasing (non-monotone table rejected)")
    if abs(ts[0]) > 1e-12 or abs(ts[-1] - 1.0) > 1e-12:
        raise ConfigurationError("phi table must cover [0, 1]")
    if vs[0] < -1e-12 or vs[-1] > 1.0 + 1e-12:
        raise ConfigurationError("phi table values must stay inside [0, 1]")

    ts = ts.copy()
    ts[0], ts[-1] = 0.0, 1.0
    vs = vs.copy()
    d, c, b = _monotone_cubic_coefficients(ts, vs)

    def _segment(t):
        t_arr = np.asarray(t, dtype=float)
        i = np.clip(np.searchsorted(ts, t_arr, side="right") - 1, 0, ts.size - 2)
        return t_arr, i

    def fn(t):
        t_arr, i = _segment(t)
        s = t_arr - ts[i]
        out = vs[i] + s * (d[i] + s * (c[i] + s * b[i]))
        return float(out) if np.ndim(t) == 0 else out

    def deriv_fn(t):
        t_arr, i = _segment(t)
        s = t_arr - ts[i]
        out = d[i] + s * (2.0 * c[i] + 3.0 * s * b[i])
        return float(out) if np.ndim(t) == 0 else out

    seed_ts = np.linspace(0.0, 1.0, 4097)
    seed_table = (seed_ts, fn(seed_ts))

    def inverse_fn(y):
        return _bisect_newton_inverse(fn, deriv_fn, y, seed_table=seed_table)

    return PhiMap(kind="table", fn=fn, deriv_fn=deriv_fn, inverse_fn=inverse_fn)


def _identity_map() -> PhiMap:
    return PhiMap(
        kind="identity",
        fn=lambda t: np.multiply(t, 1.0),
        deriv_fn=lambda t: np.multiply(t, 0.0) + 1.0,
        inverse_fn=lambda y: np.multiply(y, 1.0),
    )


def _sin_quarter_pi_map() -> PhiMap:
    q = math.pi / 4.0

    def fn(t):
        return np.sin(q * np.asarray(t, dtype=float)) if np.ndim(t) else math.sin(q * t)

    def deriv_fn(t):
        return q * np.cos(q * np.asarray(t, dtype=float)) if np.ndim(t) else q * math.cos(q * t)

    seed_ts = np.linspace(0.0, 1.0, 4097)
    seed_table = (seed_ts, np.sin(q * seed_ts))

    def inverse_fn(y):
        return _bisect_newton_inverse(fn, deriv_fn, y, seed_table=seed_table)

    return PhiMap(kind="sin_quarter_pi", fn=fn, deriv_fn=deriv_fn, inverse_fn=inverse_fn)


def _sqrt_half_map() -> PhiMap:
    def fn(t):
        return 0.5 * np.sqrt(1.0 + np.asarray(t, dtype=float)) if np.ndim(t) else 0.5 * math.sqrt(1.0 + t)

    def deriv_fn(t):
        return 0.25 / np.sqrt(1.0 + np.asarray(t, dtype=float)) if np.ndim(t) else 0.25 / math.sqrt(1.0 + t)

    def inverse_fn(y):
        out = 4.0 * np.square(np.asarray(y, dtype=float)) - 1.0
        return float(out) if np.ndim(y) == 0 else out

    return PhiMap(kind="sqrt_half", fn=fn, deriv_fn=deriv_fn, inverse_fn=inverse_fn)


PHI_KINDS = ("identity", "sin_quarter_pi", "sqrt_half", "table")


def phi_catalog(kind: str, samples: Sequence | None = None) -> PhiMap:
    """Return a coordinate map from the catalog.

    ``identity`` is phi(t) = t, ``sin_quarter_pi`` is sin(pi*t/4),
    ``sqrt_half`` is sqrt(1+t)/2, and ``table`` builds a strictly
    monotone piecewise-cubic interpolant from user samples (rows of
    (t, phi(t)) covering [0, 1]).  Inverses are analytic where a closed
    form exists (identity, sqrt_half) and safeguarded bisection+Newton
    at 1e-12 otherwise.
    """
    if kind == "identity":
        return _identity_map()
    if kind == "sin_quarter_pi":
        return _sin_quarter_pi_map()
    if kind == "sqrt_half":
        return _sqrt_half_map()
    if kind == "table":
        if samples is None:
            raise ConfigurationError("phi kind 'table' requires samples")
        return _table_map(samples)
    raise ConfigurationError(f"unknown phi kind {kind!r} (expected one of {PHI_KINDS})")
