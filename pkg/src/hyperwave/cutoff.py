"""Smooth compactly supported cutoffs and the Fourier transform of the
squared temporal cutoff.

Exactly two cutoffs are used: a radial one on the space and an even one in
time. Both are built from the standard exp(-1/x) transition, are identically
1 inside ``inner_radius`` and vanish beyond ``outer_radius``.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import make_interp_spline

from .util import oscillatory_panels

XI_CACHE_END = 1.0e4  # knots extend this far; beyond, the transform is zero


@dataclass(frozen=True)
class BumpSpec:
    inner_radius: float
    outer_radius: float
    kind: str  # spatial | temporal

    def __post_init__(self):
        if not 0.0 < self.inner_radius < self.outer_radius:
            raise ValueError("need 0 < inner_radius < outer_radius")
        if self.kind not in ("spatial", "temporal"):
            raise ValueError(f"unknown bump kind {self.kind!r}")


def default_spatial():
    return BumpSpec(inner_radius=1.0, outer_radius=2.0, kind="spatial")


def default_temporal():
    return BumpSpec(inner_radius=1.0, outer_radius=2.0, kind="temporal")


def _h(x):
    out = np.zeros_like(x)
    pos = x > 1e-3  # exp(-1/x) underflows long before this
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def bump(spec, t):
    """C-infinity plateau bump; 1 on [-inner, inner], 0 beyond +-outer."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    x = (spec.outer_radius - np.abs(np.atleast_1d(t))) / (
        spec.outer_radius - spec.inner_radius
    )
    x = np.clip(x, 0.0, 1.0)
    hx = _h(x)
    hc = _h(1.0 - x)
    out = np.where(hx + hc > 0.0, hx / np.where(hx + hc > 0.0, hx + hc, 1.0), 0.0)
    if scalar:
        return float(out[0])
    return out


def bump_prime(spec, t):
    """Derivative of ``bump``; identically 0 on the plateau and outside."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t_arr = np.atleast_1d(t)
    width = spec.outer_radius - spec.inner_radius
    x = (spec.outer_radius - np.abs(t_arr)) / width
    inside = (x > 0.0) & (x < 1.0)
    out = np.zeros_like(t_arr)
    if np.any(inside):
        xi = x[inside]
        hx = _h(xi)
        hc = _h(1.0 - xi)
        # g'(x) = [h'(x) h(1-x) + h(x) h'(1-x)] / (h + h(1-x))^2, h'(y) = h(y)/y^2
        hpx = hx / (xi * xi)
        hpc = hc / ((1.0 - xi) * (1.0 - xi))
        gp = (hpx * hc + hx * hpc) / (hx + hc) ** 2
        out[inside] = gp * (-np.sign(t_arr[inside])) / width
    if scalar:
        return float(out[0])
    return out


def squared_bump(spec, t):
    """The squared cutoff (what enters the kernel and the field integrands)."""
    b = bump(spec, t)
    return b * b


class PsiHatTable:
    """Cached cosine transform of the squared temporal cutoff.

    psi_hat(xi) = 2 * integral_0^outer psi(t) cos(xi t) dt with psi = bump^2,
    evaluated by oscillation-resolving Gauss panels on a dense knot grid and
    interpolated cubically. Knots extend to XI_CACHE_END; past the dense
    region the transform has decayed below the interpolation tolerance and
    past the last knot it is taken as exactly zero.
    """

    def __init__(self, spec, dense_end=None, dense_step=None):
        if spec.kind != "temporal":
            raise ValueError("psi_hat needs a temporal bump")
        self.spec = spec
        outer = spec.outer_radius
        width = outer - spec.inner_radius
        if dense_end is None:
            dense_end = 320.0 / min(1.0, width)
        if dense_step is None:
            # quintic-interpolation error ~ h^6 |psi_hat^(6)| stays below 1e-9
            # for the default support; the sixth moment grows like outer^7
            dense_step = 0.03125 / max(1.0, outer / 2.0) ** 1.4
        self.dense_end = float(dense_end)
        n_dense = int(round(self.dense_end / dense_step)) + 1
        dense = np.linspace(0.0, self.dense_end, n_dense)
        tail = np.geomspace(self.dense_end * 1.05, XI_CACHE_END, 64)
        knots = np.concatenate([dense, tail])

        nodes, weights = oscillatory_panels(0.0, outer, self.dense_end)
        wpsi = squared_bump(spec, nodes) * weights
        vals = np.empty_like(knots)
        block = max(1, 2_000_000 // nodes.size)
        for i0 in range(0, n_dense, block):
            i1 = min(i0 + block, n_dense)
            vals[i0:i1] = 2.0 * (np.cos(np.outer(dense[i0:i1], nodes)) @ wpsi)
        for k, xi in enumerate(tail):
            tn, tw = oscillatory_panels(0.0, outer, xi)
            vals[n_dense + k] = 2.0 * float(
                np.dot(squared_bump(spec, tn) * tw, np.cos(xi * tn))
            )
        # mirror a few knots across 0 (the transform is even) so the
        # interpolant keeps interior accuracy down to xi = 0
        n_mirror = 6
        knots = np.concatenate([-dense[n_mirror:0:-1], knots])
        vals = np.concatenate([vals[n_mirror:0:-1], vals])
        self._spline = make_interp_spline(knots, vals, k=5)
        self.mass = float(vals[n_mirror])  # psi_hat(0) = 2 * integral psi

    def __call__(self, xi):
        xi = np.abs(np.asarray(xi, dtype=float))
        scalar = xi.ndim == 0
        xi_arr = np.atleast_1d(xi)
        out = np.zeros_like(xi_arr)
        inside = xi_arr <= XI_CACHE_END
        out[inside] = self._spline(xi_arr[inside])
        if scalar:
            return float(out[0])
        return out


_tables = {}
_tables_lock = threading.Lock()


def psi_hat_table(spec):
    with _tables_lock:
        table = _tables.get(spec)
    if table is None:
        table = PsiHatTable(spec)
        with _tables_lock:
            _tables.setdefault(spec, table)
            table = _tables[spec]
    return table


def psi_hat(spec, xi):
    """Cached cosine transform of psi = bump^2; even in xi."""
    return psi_hat_table(spec)(xi)


def psi_hat_direct(spec, xi):
    """Uncached reference evaluation (fresh quadrature per point).

    The floor on the panel frequency keeps the rule fine enough for the
    stiff bump transition even when xi itself is small.
    """
    if spec.kind != "temporal":
        raise ValueError("psi_hat needs a temporal bump")
    xi = abs(float(xi))
    nodes, weights = oscillatory_panels(0.0, spec.outer_radius, max(xi, 64.0))
    return 2.0 * float(np.dot(squared_bump(spec, nodes) * weights, np.cos(xi * nodes)))


def clear_psi_hat_cache():
    with _tables_lock:
        _tables.clear()


def ball_radius(spatial_spec):
    """Radius of the plateau ball the experiments integrate over."""
    return spatial_spec.inner_radius
