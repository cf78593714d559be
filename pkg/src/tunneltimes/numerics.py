"""Shared numerical kernels.

Dimension-agnostic plumbing used throughout the package: stable evaluation
of sinh/cosh ratios through their removable singularities, a golden-section
maximizer, Ridders' polynomial-extrapolated derivative, and composite
Gauss-Legendre quadrature nodes.
"""

from __future__ import annotations

import math

import numpy as np

# Series window for the removable singularity of sinhc/coshc at z = 0.
# |z| below this uses a 4-term Taylor series (relative error < 1e-28 there).
_SERIES_CUT = 1e-6

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def sinhc_sq(z):
    """sinh(sqrt(z))/sqrt(z) as a function of the signed square z.

    Entire in z, so negative arguments continue analytically to
    sin(sqrt(-z))/sqrt(-z).  Scalars in, scalar out; arrays in, array out.
    Overflows for z > ~5e5; callers switch to scaled forms before that.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z > _SERIES_CUT
    neg = z < -_SERIES_CUT
    mid = ~(pos | neg)
    if pos.any():
        r = np.sqrt(z[pos])
        out[pos] = np.sinh(r) / r
    if neg.any():
        q = np.sqrt(-z[neg])
        out[neg] = np.sin(q) / q
    if mid.any():
        zm = z[mid]
        out[mid] = 1.0 + zm / 6.0 + zm * zm / 120.0 + zm**3 / 5040.0
    return out if out.ndim else float(out)


def coshc_sq(z):
    """cosh(sqrt(z)) as a function of the signed square z (cos(sqrt(-z)) for z < 0)."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z > _SERIES_CUT
    neg = z < -_SERIES_CUT
    mid = ~(pos | neg)
    if pos.any():
        out[pos] = np.cosh(np.sqrt(z[pos]))
    if neg.any():
        out[neg] = np.cos(np.sqrt(-z[neg]))
    if mid.any():
        zm = z[mid]
        out[mid] = 1.0 + zm / 2.0 + zm * zm / 24.0 + zm**3 / 720.0
    return out if out.ndim else float(out)


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Locate the maximum of a unimodal scalar function on [lo, hi].

    Returns the midpoint of the final bracket, which has width <= tol.
    """
    if not hi > lo:
        raise ValueError("need hi > lo")
    h = hi - lo
    if h <= tol:
        return 0.5 * (lo + hi)
    n = int(math.ceil(math.log(tol / h) / math.log(_INVPHI)))
    c = lo + _INVPHI2 * h
    d = lo + _INVPHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(n):
        if yc > yd:
            hi, d, yd = d, c, yc
            h *= _INVPHI
            c = lo + _INVPHI2 * h
            yc = f(c)
        else:
            lo, c, yc = c, d, yd
            h *= _INVPHI
            d = lo + _INVPHI * h
            yd = f(d)
    return 0.5 * (lo + hi)


def ridders_derivative(f, x: float, h: float, max_steps: int = 10,
                       shrink: float = 1.4) -> tuple[float, float]:
    """First derivative of f at x by Ridders' extrapolated central differences.

    h is the initial step (should span a region where f varies noticeably).
    Returns (derivative, error_estimate).  The tableau stops early once the
    extrapolation error grows again.
    """
    if h == 0.0:
        raise ValueError("initial step h must be nonzero")
    con2 = shrink * shrink
    a = {}
    hh = h
    a[0, 0] = (f(x + hh) - f(x - hh)) / (2.0 * hh)
    err = math.inf
    best = a[0, 0]
    for i in range(1, max_steps):
        hh /= shrink
        a[0, i] = (f(x + hh) - f(x - hh)) / (2.0 * hh)
        fac = con2
        for j in range(1, i + 1):
            a[j, i] = (a[j - 1, i] * fac - a[j - 1, i - 1]) / (fac - 1.0)
            fac *= con2
            errt = max(abs(a[j, i] - a[j - 1, i]), abs(a[j, i] - a[j - 1, i - 1]))
            if errt <= err:
                err = errt
                best = a[j, i]
        if abs(a[i, i] - a[i - 1, i - 1]) >= 2.0 * err:
            break
    return best, err


def gauss_legendre_panels(lo: float, hi: float, panels: int,
                          order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule: `panels` equal panels of the given order.

    Returns (nodes, weights) concatenated over panels, nodes increasing.
    """
    if not hi > lo:
        raise ValueError("need hi > lo")
    if panels < 1 or order < 2:
        raise ValueError("need panels >= 1 and order >= 2")
    x, wts = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    nodes = []
    weights = []
    for i in range(panels):
        a, b = edges[i], edges[i + 1]
        nodes.append(0.5 * (b - a) * x + 0.5 * (b + a))
        weights.append(0.5 * (b - a) * wts)
    return np.concatenate(nodes), np.concatenate(weights)


def parabolic_refine(grid: np.ndarray, values: np.ndarray, i: int) -> float:
    """Sub-grid location of a local maximum near index i by parabola fit."""
    if 0 < i < len(grid) - 1:
        y0, y1, y2 = values[i - 1], values[i], values[i + 1]
        denom = y0 - 2.0 * y1 + y2
        if denom != 0.0:
            shift = 0.5 * (y0 - y2) / denom
            if abs(shift) <= 1.0:
                return float(grid[i] + shift * (grid[1] - grid[0]))
    return float(grid[i])
