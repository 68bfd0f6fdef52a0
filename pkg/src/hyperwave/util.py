"""Shared numeric helpers: panel quadrature rules, stable elementary
functions, worker-count control."""

import functools
import math
import os

import numpy as np

THREADS_ENV = "HYPERWAVE_THREADS"


def worker_count():
    """Number of workers for parallel table builds, capped by HYPERWAVE_THREADS."""
    cap = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            cap = min(cap, max(1, int(raw)))
        except ValueError:
            pass
    return cap


@functools.lru_cache(maxsize=32)
def _leggauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def gauss_panels(a, b, n_panels, order=8):
    """Composite Gauss-Legendre rule on [a, b] with n_panels equal panels.

    Returns (nodes, weights), both 1-D and ascending.
    """
    if not (b > a):
        raise ValueError(f"empty interval [{a}, {b}]")
    n_panels = int(n_panels)
    if n_panels < 1:
        raise ValueError("n_panels must be >= 1")
    x, w = _leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def oscillatory_panels(a, b, freq, order=8, max_width=0.25):
    """Panel rule resolving e^{i*freq*x} oscillation: width <= min(max_width, pi/(4 freq))."""
    width = max_width
    if freq > 0:
        width = min(width, math.pi / (4.0 * freq))
    n_panels = max(1, int(math.ceil((b - a) / width)))
    return gauss_panels(a, b, n_panels, order=order)


def logsinh(x):
    """log(sinh x) for x > 0, overflow-safe for large x."""
    x = np.asarray(x, dtype=float)
    small = x < 20.0
    out = np.empty_like(x)
    out[small] = np.log(np.sinh(x[small]))
    xl = x[~small]
    out[~small] = xl + np.log1p(-np.exp(-2.0 * xl)) - math.log(2.0)
    if out.ndim == 0:
        return float(out)
    return out


def fixed_order_sum(values):
    """Deterministic reduction: plain left-to-right sum over a 1-D array."""
    return float(np.add.reduce(np.asarray(values, dtype=float)))
