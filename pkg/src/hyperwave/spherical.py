"""Spherical function evaluation.

Three routes to phi_lambda(t):

* ``phi_ode`` -- reference path. Adaptive propagation of the radial
  eigen-equation (see ``hyperwave._core``); local tolerance 1e-10 by default.
* ``phi_local_bessel`` -- leading term of the small-radius Bessel expansion,
  with an error estimate of the truncation shape.
* ``phi_asymptotic_leading`` -- leading large-radius term built from the
  c-function.

``phi`` dispatches to the ODE path through a per-(space, lambda) cubic
interpolant cache and is the default entry point everywhere else in the
package.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import _core, space as space_mod, specfun
from .errors import ConfigError

R0 = 1.0  # validity radius of the local Bessel expansion

DEFAULT_RTOL = 1e-10


@dataclass(frozen=True)
class SphericalEvalReport:
    """One evaluation with its route and error estimate."""

    value: float
    path: str  # ode | local_bessel | asymptotic
    est_error: float
    lam: float
    t: float


def eigenvalue(params, lam):
    return float(lam) ** 2 + params.rho**2


def phi_table(params, lams, ts, rtol=DEFAULT_RTOL):
    """phi on the (lams x ts) product grid; ts must be sorted ascending."""
    lams = np.abs(np.asarray(lams, dtype=float)).ravel()
    ev = lams**2 + params.rho**2
    return _core.phi_table(params.m1, params.m2, ev, ts, rtol)


def phi_contract_radius(params, lams, t_nodes, coef, rtol=DEFAULT_RTOL):
    """sum_i coef[p, i] phi_lam(t_i) without materializing the table."""
    lams = np.abs(np.asarray(lams, dtype=float)).ravel()
    ev = lams**2 + params.rho**2
    return _core.phi_sum_t(params.m1, params.m2, ev, t_nodes, coef, rtol)


def phi_contract_spectrum(params, lams, wcoef, t_out, rtol=DEFAULT_RTOL):
    """sum_j wcoef[p, j] phi_(lam_j)(t) without materializing the table."""
    lams = np.abs(np.asarray(lams, dtype=float)).ravel()
    ev = lams**2 + params.rho**2
    return _core.phi_sum_ev(params.m1, params.m2, ev, wcoef, t_out, rtol)


def phi_ode(params, lam, grid, rtol=DEFAULT_RTOL):
    """Reference values of phi_lambda on a radius grid starting at 0.

    Solves phi'' + (D'/D) phi' + (lam^2 + rho^2) phi = 0 with phi(0) = 1,
    launched from the Frobenius start at t = 1e-4 and integrated with
    adaptive step control at local tolerance ``rtol``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 1 or grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must start at 0 and be strictly increasing")
    return phi_table(params, [lam], grid, rtol)[0]


# --- per-(space, lambda) interpolant cache --------------------------------

_cache_lock = threading.Lock()
_phi_splines = {}
_CACHE_MAX = 256


def _spline_for(params, lam, t_needed):
    key = (params.key(), float(lam))
    with _cache_lock:
        entry = _phi_splines.get(key)
    if entry is not None and entry[0] >= t_needed:
        return entry[1]
    cover = max(8.0, 1.25 * t_needed)
    # spacing keeps the cubic interpolation error ~1e-9 at frequency lam
    h = 0.025 / max(1.0, abs(lam))
    n_pts = int(math.ceil(cover / h)) + 1
    grid = np.linspace(0.0, cover, n_pts)
    values = phi_table(params, [lam], grid)[0]
    spline = CubicSpline(grid, values)
    with _cache_lock:
        if len(_phi_splines) >= _CACHE_MAX:
            _phi_splines.pop(next(iter(_phi_splines)))
        _phi_splines[key] = (cover, spline)
    return spline


def clear_phi_cache():
    with _cache_lock:
        _phi_splines.clear()


def phi(params, lam, t):
    """phi_lambda(t) via the cached ODE-backed interpolant.

    Even in lambda by construction (|lambda| is used), and the returned
    value is clipped to [-1, 1], which the true function satisfies.
    """
    lam = abs(float(lam))
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    if np.any(t_arr < 0):
        raise ValueError("phi needs t >= 0")
    spline = _spline_for(params, lam, float(np.max(t_arr)) if t_arr.size else 1.0)
    out = np.clip(spline(t_arr), -1.0, 1.0)
    if scalar:
        return float(out[0])
    return out


# --- local Bessel route ---------------------------------------------------

_fit_lock = threading.Lock()
_local_fit = {}
_asym_fit = {}


def _local_leading(params, lam, t):
    t = np.asarray(t, dtype=float)
    mu = (params.n - 2) / 2.0
    c0 = 2.0 ** (params.m2 / 2.0) / specfun.normalized_bessel_at_zero(mu)
    amp = np.sqrt(1.0 / space_mod.density_over_power(params, t))
    return c0 * amp * specfun.normalized_bessel(mu, np.abs(lam) * t)


def _local_error_shape(params, lam, t):
    lt = abs(lam) * np.asarray(t, dtype=float)
    shape = np.asarray(t, dtype=float) ** 2
    decay = np.where(lt > 1.0, np.maximum(lt, 1.0) ** (-((params.n - 1) / 2.0 + 1.0)), 1.0)
    return shape * decay


def _local_fit_constant(params):
    """Truncation-constant fit: max |leading - ode| over the error shape.

    Calibrated per space on a probe grid (the expansion is exact on H3R, so
    a single cross-space constant would undershoot elsewhere); floored so the
    reported estimate never collapses to rounding noise.
    """
    key = params.key()
    with _fit_lock:
        if key in _local_fit:
            return _local_fit[key]
    probes_t = np.linspace(0.02, R0, 40)
    grid = np.concatenate([[0.0], probes_t])
    worst = 0.0
    for lam in (0.5, 2.0, 8.0, 32.0):
        ode_vals = phi_table(params, [lam], grid)[0][1:]
        approx = _local_leading(params, lam, probes_t)
        shape = _local_error_shape(params, lam, probes_t)
        worst = max(worst, float(np.max(np.abs(approx - ode_vals) / shape)))
    const = max(1.5 * worst, 1e-6)
    with _fit_lock:
        _local_fit[key] = const
    return const


def phi_local_bessel(params, lam, t, M=0):
    """Leading small-radius approximation on (0, R0].

    Only the first expansion term is computable (higher coefficients are out
    of scope); requesting M > 0 is rejected.
    """
    if M != 0:
        raise ConfigError("only the M=0 truncation of the local expansion is available")
    t = float(t)
    if not 0.0 < t <= R0:
        raise ValueError(f"local Bessel path needs 0 < t <= {R0}")
    value = float(_local_leading(params, lam, t))
    const = _local_fit_constant(params)
    est = const * float(_local_error_shape(params, lam, t))
    return SphericalEvalReport(value=value, path="local_bessel", est_error=est,
                               lam=float(lam), t=t)


# --- leading large-radius route -------------------------------------------


def _asym_fit_constant(params):
    key = params.key()
    with _fit_lock:
        if key in _asym_fit:
            return _asym_fit[key]
    cal = space_mod.ensure_calibrated(params)
    worst = 0.0
    for lam in (1.5, 4.0, 12.0):
        grid = np.concatenate([[0.0], np.linspace(1.0, 6.0, 30)])
        ode_vals = phi_table(params, [lam], grid)[0][1:]
        ts = grid[1:]
        cc = specfun.c_function(params, lam, n_scale=cal.n_scale)
        lead = 2.0 * np.real(cc * np.exp((1j * lam - params.rho) * ts))
        envelope = np.exp(-params.rho * ts) / (1.0 + lam)
        worst = max(worst, float(np.max(np.abs(lead - ode_vals) / envelope)))
    const = max(1.5 * worst, 0.1)
    with _fit_lock:
        _asym_fit[key] = const
    return const


def phi_asymptotic_leading(params, lam, t):
    """Leading large-radius term 2 Re[c(lam) e^((i lam - rho) t)].

    Requires lam > 1 and t >= 1; the error estimate scales like
    (1 + lam)^(-1) e^(-rho t) with a per-space fitted constant.
    """
    lam = float(lam)
    t = float(t)
    if lam <= 1.0:
        raise ValueError("asymptotic path needs lambda > 1")
    if t < 1.0:
        raise ValueError("asymptotic path needs t >= 1")
    cal = space_mod.ensure_calibrated(params)
    cc = specfun.c_function(params, lam, n_scale=cal.n_scale)
    value = float(2.0 * np.real(cc * np.exp((1j * lam - params.rho) * t)))
    est = _asym_fit_constant(params) * math.exp(-params.rho * t) / (1.0 + lam)
    return SphericalEvalReport(value=value, path="asymptotic", est_error=est,
                               lam=lam, t=t)


def phi_report(params, lam, t, path="ode"):
    """Uniform report wrapper used by the CLI."""
    if path == "ode":
        return SphericalEvalReport(value=phi(params, lam, t), path="ode",
                                   est_error=1e-9, lam=float(lam), t=float(t))
    if path == "bessel":
        return phi_local_bessel(params, lam, t)
    if path == "asym":
        return phi_asymptotic_leading(params, lam, t)
    raise ConfigError(f"unknown phi path {path!r}")


def eigen_residual(params, lam, t_probes, rel_tol=1e-6, rtol=1e-12):
    """Max of |phi'' + (D'/D) phi' + ev phi| over probe radii, by central
    differences on 3-point clusters with a step matched to the eigenvalue."""
    ev = eigenvalue(params, lam)
    h = 0.5 * math.sqrt(12.0 * rel_tol / ev)
    t_probes = np.asarray(t_probes, dtype=float)
    cluster = np.concatenate([t_probes - h, t_probes, t_probes + h])
    order = np.argsort(cluster)
    grid = cluster[order]
    vals = phi_table(params, [lam], grid, rtol=rtol)[0]
    unsorted = np.empty_like(vals)
    unsorted[order] = vals
    lo, mid, hi = np.split(unsorted, 3)
    d2 = (hi - 2.0 * mid + lo) / (h * h)
    d1 = (hi - lo) / (2.0 * h)
    g = space_mod.log_density_derivative(params, t_probes)
    return float(np.max(np.abs(d2 + g * d1 + ev * mid)))
