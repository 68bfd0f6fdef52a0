# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled backend for radial eigenfunction propagation.

Same algorithm as the NumPy fallback (fourth-order Magnus steps on the
Liouville form of the radial eigen-equation, adaptive step doubling), but
marched per eigenvalue in scalar C loops. Each eigenvalue gets its own step
sequence, which is what makes this path fast for small or scattered batches.
"""

import numpy as np

from libc.math cimport (cos, cosh, exp, fabs, fmax, fmin, log, log1p, sin,
                        sinh, sqrt, tanh)

from ..errors import StepControlError

cdef double T0 = 1e-4
cdef double GOFF = 0.2886751345948129      # sqrt(3)/6
cdef double C12 = 0.14433756729740643      # sqrt(3)/12
cdef double LN2 = 0.6931471805599453
cdef double RENORM_LIMIT = 1e150
cdef double RENORM_FACTOR = 2.0 ** -512
cdef double RENORM_LOG = 512.0 * 0.6931471805599453
cdef long MAX_STEPS = 5_000_000


cdef inline double _logsinh(double x) nogil:
    if x < 20.0:
        return log(sinh(x))
    return x + log1p(-exp(-2.0 * fmin(x, 350.0))) - LN2


cdef inline double _log_density(double t, double m1, double m2) nogil:
    return m1 * _logsinh(t) + m2 * _logsinh(2.0 * t)


cdef inline double _potential(double t, double m1, double m2) nogil:
    cdef double s1 = sinh(t)
    cdef double s2 = sinh(2.0 * t)
    cdef double g = m1 / tanh(t) + 2.0 * m2 / tanh(2.0 * t)
    cdef double gp = -m1 / (s1 * s1) - 4.0 * m2 / (s2 * s2)
    return 0.5 * gp + 0.25 * g * g


cdef inline void _expomega(double h, double u1, double u2, double ev,
                           double* e00, double* e01, double* e10, double* e11) nogil:
    cdef double kbar = ev - 0.5 * (u1 + u2)
    cdef double d = C12 * h * h * (u1 - u2)
    cdef double sigma = d * d - h * h * kbar
    cdef double om = sqrt(fabs(sigma))
    cdef double s, c
    if om < 1e-8:
        s = 1.0 + sigma / 6.0
        c = 1.0 + sigma / 2.0
    elif sigma < 0.0:
        s = sin(om) / om
        c = cos(om)
    else:
        s = sinh(om) / om
        c = cosh(om)
    e00[0] = c + d * s
    e01[0] = h * s
    e10[0] = -h * kbar * s
    e11[0] = c - d * s


cdef inline void _series_coeffs(double m1, double m2, double ev, double* c) nogil:
    """Five Frobenius coefficients of phi = sum c_k t^(2k)."""
    cdef double b0 = (m1 + 4.0 * m2) / 3.0
    cdef double b1 = -(m1 + 16.0 * m2) / 45.0
    cdef double b2 = 2.0 * (m1 + 64.0 * m2) / 945.0
    cdef double n = m1 + m2 + 1.0
    cdef double acc
    cdef int m, k, j
    cdef double bj
    c[0] = 1.0
    for m in range(1, 5):
        acc = ev * c[m - 1]
        for k in range(1, m):
            j = m - k - 1
            if j == 0:
                bj = b0
            elif j == 1:
                bj = b1
            elif j == 2:
                bj = b2
            else:
                continue
            acc += 2.0 * k * c[k] * bj
        c[m] = -acc / (2.0 * m * (2.0 * m + n - 2.0))


cdef inline double _series_phi(double tau, double* c) nogil:
    cdef double t2 = tau * tau
    return (((c[4] * t2 + c[3]) * t2 + c[2]) * t2 + c[1]) * t2 + c[0]


cdef int _march_one(double m1, double m2, double ev, double[::1] t_out,
                    double rtol, double[::1] phi_row) nogil:
    """Fill phi_row with phi values at t_out for one eigenvalue.

    Returns 0 on success, 1 on step-control failure.
    """
    cdef Py_ssize_t n_out = t_out.shape[0]
    cdef double c[5]
    cdef Py_ssize_t j = 0
    cdef double t, h, tmax, tnext
    cdef double w, wp, wm, wpm, w2, wp2, wf, wpf
    cdef double phi0, dphi0, g0, sqd0
    cdef double e00, e01, e10, e11
    cdef double u1, u2, kappa, norm, err, tau, hh, logscale
    cdef long steps = 0
    cdef long renorms = 0

    _series_coeffs(m1, m2, ev, c)
    while j < n_out and t_out[j] <= T0:
        phi_row[j] = _series_phi(t_out[j], c)
        j += 1
    if j == n_out:
        return 0

    phi0 = _series_phi(T0, c)
    dphi0 = (((4.0 * c[4] * T0 * T0 + 3.0 * c[3]) * T0 * T0 + 2.0 * c[2]) * T0 * T0
             + c[1]) * 2.0 * T0
    g0 = m1 / tanh(T0) + 2.0 * m2 / tanh(2.0 * T0)
    sqd0 = exp(0.5 * _log_density(T0, m1, m2))
    w = phi0 * sqd0
    wp = (dphi0 + 0.5 * g0 * phi0) * sqd0

    t = T0
    h = 0.5 * T0
    tmax = t_out[n_out - 1]
    while j < n_out:
        h = fmin(fmin(h, 2.0), (tmax - t) * (1.0 + 1e-14) + 1e-14)
        u1 = _potential(t + h * (0.5 - GOFF), m1, m2)
        u2 = _potential(t + h * (0.5 + GOFF), m1, m2)
        _expomega(h, u1, u2, ev, &e00, &e01, &e10, &e11)
        wf = e00 * w + e01 * wp
        wpf = e10 * w + e11 * wp
        u1 = _potential(t + 0.5 * h * (0.5 - GOFF), m1, m2)
        u2 = _potential(t + 0.5 * h * (0.5 + GOFF), m1, m2)
        _expomega(0.5 * h, u1, u2, ev, &e00, &e01, &e10, &e11)
        wm = e00 * w + e01 * wp
        wpm = e10 * w + e11 * wp
        u1 = _potential(t + 0.5 * h + 0.5 * h * (0.5 - GOFF), m1, m2)
        u2 = _potential(t + 0.5 * h + 0.5 * h * (0.5 + GOFF), m1, m2)
        _expomega(0.5 * h, u1, u2, ev, &e00, &e01, &e10, &e11)
        w2 = e00 * wm + e01 * wpm
        wp2 = e10 * wm + e11 * wpm

        kappa = fmax(sqrt(fabs(ev - _potential(t + 0.5 * h, m1, m2))), 1.0)
        norm = fabs(w2) + fabs(wp2) / kappa + 1e-300
        err = fmax(fabs(w2 - wf), fabs(wp2 - wpf) / kappa) / norm
        steps += 1
        if steps > MAX_STEPS or err != err:
            return 1
        if err > rtol:
            h *= fmax(0.25, 0.87 * (rtol / err) ** 0.2)
            if h < 1e-16:
                return 1
            continue

        tnext = t + h
        while j < n_out and t_out[j] <= tnext:
            tau = t_out[j]
            if tau <= t + 0.5 * h:
                hh = tau - t
                u1 = _potential(t + hh * (0.5 - GOFF), m1, m2)
                u2 = _potential(t + hh * (0.5 + GOFF), m1, m2)
                _expomega(hh, u1, u2, ev, &e00, &e01, &e10, &e11)
                logscale = -0.5 * _log_density(tau, m1, m2) + RENORM_LOG * renorms
                phi_row[j] = (e00 * w + e01 * wp) * exp(logscale)
            else:
                hh = tau - (t + 0.5 * h)
                u1 = _potential(t + 0.5 * h + hh * (0.5 - GOFF), m1, m2)
                u2 = _potential(t + 0.5 * h + hh * (0.5 + GOFF), m1, m2)
                _expomega(hh, u1, u2, ev, &e00, &e01, &e10, &e11)
                logscale = -0.5 * _log_density(tau, m1, m2) + RENORM_LOG * renorms
                phi_row[j] = (e00 * wm + e01 * wpm) * exp(logscale)
            j += 1

        w = w2
        wp = wp2
        t = tnext
        if fabs(w) > RENORM_LIMIT:
            w *= RENORM_FACTOR
            wp *= RENORM_FACTOR
            renorms += 1
        err = fmax(err, 1e-16)
        h *= fmin(4.0, 0.87 * (rtol / err) ** 0.2)
    return 0


def _validate(ev, t_out):
    ev = np.ascontiguousarray(np.asarray(ev, dtype=np.float64).ravel())
    t_out = np.ascontiguousarray(np.asarray(t_out, dtype=np.float64).ravel())
    if t_out.size and (np.any(np.diff(t_out) < 0) or t_out[0] < 0):
        raise ValueError("output radii must be sorted ascending and non-negative")
    return ev, t_out


def phi_table(m1, m2, ev, t_out, rtol=1e-10):
    """phi values on the product grid: shape (n_ev, n_t)."""
    ev, t_out = _validate(ev, t_out)
    out = np.empty((ev.size, t_out.size))
    cdef double[::1] evv = ev
    cdef double[::1] tv = t_out
    cdef double[:, ::1] outv = out
    cdef double mm1 = float(m1), mm2 = float(m2), rt = float(rtol)
    cdef Py_ssize_t i
    cdef int bad = 0
    if t_out.size == 0 or ev.size == 0:
        return out
    with nogil:
        for i in range(evv.shape[0]):
            if _march_one(mm1, mm2, evv[i], tv, rt, outv[i]):
                bad = 1
                break
    if bad:
        raise StepControlError("adaptive step control failed", t=None)
    return out


def phi_sum_t(m1, m2, ev, t_nodes, coef, rtol=1e-10):
    """sum_i coef[p, i] * phi_ev(t_i): shape (n_p, n_ev)."""
    ev, t_nodes = _validate(ev, t_nodes)
    coef = np.ascontiguousarray(np.atleast_2d(np.asarray(coef, dtype=np.float64)))
    if coef.shape[1] != t_nodes.size:
        raise ValueError("coef/t_nodes shape mismatch")
    out = np.zeros((coef.shape[0], ev.size))
    row = np.empty(t_nodes.size)
    cdef double[::1] evv = ev
    cdef double[::1] tv = t_nodes
    cdef double[:, ::1] cv = coef
    cdef double[:, ::1] outv = out
    cdef double[::1] rowv = row
    cdef double mm1 = float(m1), mm2 = float(m2), rt = float(rtol)
    cdef Py_ssize_t i, p, k
    cdef double acc
    cdef int bad = 0
    if ev.size == 0 or t_nodes.size == 0:
        return out
    with nogil:
        for i in range(evv.shape[0]):
            if _march_one(mm1, mm2, evv[i], tv, rt, rowv):
                bad = 1
                break
            for p in range(cv.shape[0]):
                acc = 0.0
                for k in range(rowv.shape[0]):
                    acc += cv[p, k] * rowv[k]
                outv[p, i] = acc
    if bad:
        raise StepControlError("adaptive step control failed", t=None)
    return out


def phi_sum_ev(m1, m2, ev, wcoef, t_out, rtol=1e-10):
    """sum_j wcoef[p, j] * phi_(ev_j)(t): shape (n_p, n_t); wcoef may be complex."""
    ev, t_out = _validate(ev, t_out)
    wcoef = np.ascontiguousarray(np.atleast_2d(np.asarray(wcoef, dtype=np.complex128)))
    if wcoef.shape[1] != ev.size:
        raise ValueError("wcoef/ev shape mismatch")
    out = np.zeros((wcoef.shape[0], t_out.size), dtype=np.complex128)
    row = np.empty(t_out.size)
    cdef double[::1] evv = ev
    cdef double[::1] tv = t_out
    cdef double complex[:, ::1] wv = wcoef
    cdef double complex[:, ::1] outv = out
    cdef double[::1] rowv = row
    cdef double mm1 = float(m1), mm2 = float(m2), rt = float(rtol)
    cdef Py_ssize_t i, p, k
    cdef double complex wj
    cdef int bad = 0
    if ev.size == 0 or t_out.size == 0:
        return out
    with nogil:
        for i in range(evv.shape[0]):
            if _march_one(mm1, mm2, evv[i], tv, rt, rowv):
                bad = 1
                break
            for p in range(wv.shape[0]):
                wj = wv[p, i]
                for k in range(rowv.shape[0]):
                    outv[p, k] = outv[p, k] + wj * rowv[k]
    if bad:
        raise StepControlError("adaptive step control failed", t=None)
    return out
