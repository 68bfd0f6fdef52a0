"""Pure-NumPy backend for radial eigenfunction propagation.

Solves the radial eigen-equation phi'' + (D'/D) phi' + ev*phi = 0 with
phi(0) = 1, phi'(0) = 0 for a whole batch of eigenvalues ``ev`` at once.
Internally the equation is propagated in the Liouville variable
w = D^(1/2) phi, which satisfies w'' + (ev - U(t)) w = 0 with

    U = (1/2) g' + (1/4) g^2,    g = D'/D.

Each step applies the closed-form exponential of the two-node fourth-order
Magnus expansion; for piecewise-constant U the step is exact, so the cost is
essentially independent of the eigenvalue. Step size is adaptive (step
doubling), controlled by ``rtol`` as a local per-unit-step tolerance. The
batch shares one step sequence driven by the worst member, which keeps the
whole march vectorized.

Outputs at radii below the launch point T0 = 1e-4 come from the Frobenius
series of the original equation; the march starts at T0 from that series.
"""

import numpy as np

from ..errors import StepControlError

T0 = 1e-4
_GOFF = 0.2886751345948129  # sqrt(3)/6
_C12 = 0.14433756729740643  # sqrt(3)/12
_LN2 = 0.6931471805599453
_RENORM_LIMIT = 1e150
_RENORM_SHIFT = 512  # powers of two removed per renormalization
_MAX_STEPS = 5_000_000
_BLOCK_ELEMS = 2_000_000  # cap on (n_tau * n_ev) per dense-output block


def _logsinh(x):
    x = np.asarray(x, dtype=float)
    out = np.where(
        x < 20.0,
        np.log(np.sinh(np.minimum(x, 20.0))),
        x + np.log1p(-np.exp(-2.0 * np.minimum(x, 350.0))) - _LN2,
    )
    return out


def _log_density(t, m1, m2):
    return m1 * _logsinh(t) + m2 * _logsinh(2.0 * t)


def _potential(t, m1, m2):
    with np.errstate(over="ignore"):
        s1 = np.sinh(t)
        s2 = np.sinh(2.0 * t)
        g = m1 / np.tanh(t) + 2.0 * m2 / np.tanh(2.0 * t)
        gp = -m1 / (s1 * s1) - 4.0 * m2 / (s2 * s2)
    return 0.5 * gp + 0.25 * g * g


def _series_coeffs(m1, m2, ev, nterms=5):
    """Frobenius coefficients of phi = sum c_k t^(2k) around the origin."""
    n = m1 + m2 + 1
    b = ((m1 + 4.0 * m2) / 3.0, -(m1 + 16.0 * m2) / 45.0, 2.0 * (m1 + 64.0 * m2) / 945.0)
    c = np.zeros((nterms, ev.size))
    c[0] = 1.0
    for m in range(1, nterms):
        acc = ev * c[m - 1]
        for k in range(1, m):
            j = m - k - 1
            if j <= 2:
                acc = acc + 2.0 * k * c[k] * b[j]
        c[m] = -acc / (2.0 * m * (2.0 * m + n - 2.0))
    return c


def _series_phi(tau, c):
    """phi on small radii from the Frobenius series; (n_ev, n_tau)."""
    out = np.zeros((c.shape[1], tau.size))
    for i, t in enumerate(tau):
        acc = np.zeros(c.shape[1])
        t2 = t * t
        for k in range(c.shape[0] - 1, -1, -1):
            acc = acc * t2 + c[k]
        out[:, i] = acc
    return out


def _expomega(h, u1, u2, ev):
    """Entries of exp(Omega) for the Magnus-4 step; broadcasts u over ev."""
    kbar = ev - 0.5 * (u1 + u2)
    d = _C12 * h * h * (u1 - u2)
    sigma = d * d - (h * h) * kbar
    om = np.sqrt(np.abs(sigma))
    small = om < 1e-8
    osc = sigma < 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        om_safe = np.where(small, 1.0, om)
        s = np.where(osc, np.sin(om_safe), np.sinh(om_safe)) / om_safe
        s = np.where(small, 1.0 + sigma / 6.0, s)
        cc = np.where(osc, np.cos(om), np.cosh(om))
        cc = np.where(small, 1.0 + sigma / 2.0, cc)
    e00 = cc + d * s
    e01 = h * s
    e10 = -h * kbar * s
    e11 = cc - d * s
    return e00, e01, e10, e11


def _step_matrix(ts, h, ev, m1, m2):
    u1 = _potential(ts + h * (0.5 - _GOFF), m1, m2)
    u2 = _potential(ts + h * (0.5 + _GOFF), m1, m2)
    return _expomega(h, u1, u2, ev)


def _dense_block(ts, taus, w, wp, ev, m1, m2, scale):
    """phi at radii ``taus`` inside the current step, from state (w, wp) at ts."""
    hh = (taus - ts)[:, None]
    u1 = _potential(ts + hh * (0.5 - _GOFF), m1, m2)
    u2 = _potential(ts + hh * (0.5 + _GOFF), m1, m2)
    e00, e01, _, _ = _expomega(hh, u1, u2, ev[None, :])
    wout = e00 * w[None, :] + e01 * wp[None, :]
    ld = _log_density(taus, m1, m2)
    if np.any(scale != 0) or np.max(ld) > 1200.0:
        expo = (-0.5 * ld)[:, None] + (_LN2 * _RENORM_SHIFT) * scale[None, :]
        block = wout * np.exp(expo)
    else:
        block = wout * np.exp(-0.5 * ld)[:, None]
    return block.T  # (n_ev, n_tau)


def march(m1, m2, ev, t_out, rtol, consumer):
    """Propagate the batch and hand phi blocks to ``consumer(j0, j1, block)``.

    ``t_out`` must be sorted ascending with t_out[0] >= 0; ``block`` has shape
    (n_ev, j1 - j0) and covers t_out[j0:j1].
    """
    ev = np.ascontiguousarray(np.asarray(ev, dtype=float).ravel())
    t_out = np.asarray(t_out, dtype=float).ravel()
    if t_out.size == 0 or ev.size == 0:
        return
    if np.any(np.diff(t_out) < 0):
        raise ValueError("output radii must be sorted ascending")
    if t_out[0] < 0:
        raise ValueError("output radii must be non-negative")

    coeffs = _series_coeffs(m1, m2, ev)
    n_out = t_out.size
    k0 = int(np.searchsorted(t_out, T0, side="right"))
    if k0 > 0:
        consumer(0, k0, _series_phi(t_out[:k0], coeffs))
    if k0 == n_out:
        return

    # launch state at T0 from the series
    phi0 = _series_phi(np.array([T0]), coeffs)[:, 0]
    dphi0 = np.zeros_like(ev)
    for k in range(coeffs.shape[0] - 1, 0, -1):
        dphi0 = dphi0 * (T0 * T0) + 2.0 * k * coeffs[k]
    dphi0 *= T0
    g0 = m1 / np.tanh(T0) + 2.0 * m2 / np.tanh(2.0 * T0)
    sq_d0 = np.exp(0.5 * _log_density(np.array([T0]), m1, m2))[0]
    w = phi0 * sq_d0
    wp = (dphi0 + 0.5 * g0 * phi0) * sq_d0
    scale = np.zeros(ev.size, dtype=np.int64)

    t = T0
    h = 0.5 * T0
    j = k0
    tmax = float(t_out[-1])
    steps = 0
    max_tau_block = max(1, _BLOCK_ELEMS // ev.size)
    while j < n_out:
        h = min(h, 2.0, (tmax - t) * (1.0 + 1e-14) + 1e-14)
        e00, e01, e10, e11 = _step_matrix(t, h, ev, m1, m2)
        wf = e00 * w + e01 * wp
        wpf = e10 * w + e11 * wp
        a00, a01, a10, a11 = _step_matrix(t, 0.5 * h, ev, m1, m2)
        wm = a00 * w + a01 * wp
        wpm = a10 * w + a11 * wp
        b00, b01, b10, b11 = _step_matrix(t + 0.5 * h, 0.5 * h, ev, m1, m2)
        w2 = b00 * wm + b01 * wpm
        wp2 = b10 * wm + b11 * wpm

        kappa = np.maximum(np.sqrt(np.abs(ev - _potential(t + 0.5 * h, m1, m2))), 1.0)
        norm = np.abs(w2) + np.abs(wp2) / kappa + 1e-300
        err = float(np.max(np.maximum(np.abs(w2 - wf), np.abs(wp2 - wpf) / kappa) / norm))
        steps += 1
        if steps > _MAX_STEPS:
            raise StepControlError("adaptive step control exceeded the step budget", t=t)
        if not np.isfinite(err):
            raise StepControlError("non-finite state during propagation", t=t)
        if err > rtol:
            h *= max(0.25, 0.87 * (rtol / err) ** 0.2)
            if h < 1e-16:
                raise StepControlError("step size underflow", t=t)
            continue

        tnext = t + h
        while j < n_out and t_out[j] <= tnext:
            j1 = j
            while j1 < n_out and t_out[j1] <= tnext and j1 - j < max_tau_block:
                j1 += 1
            taus = t_out[j:j1]
            lo = taus <= t + 0.5 * h
            if np.all(lo):
                block = _dense_block(t, taus, w, wp, ev, m1, m2, scale)
            elif not np.any(lo):
                block = _dense_block(t + 0.5 * h, taus, wm, wpm, ev, m1, m2, scale)
            else:
                split = int(np.searchsorted(taus, t + 0.5 * h, side="right"))
                block = np.concatenate(
                    [
                        _dense_block(t, taus[:split], w, wp, ev, m1, m2, scale),
                        _dense_block(t + 0.5 * h, taus[split:], wm, wpm, ev, m1, m2, scale),
                    ],
                    axis=1,
                )
            consumer(j, j1, block)
            j = j1

        w, wp, t = w2, wp2, tnext
        big = np.abs(w) > _RENORM_LIMIT
        if np.any(big):
            fac = 2.0 ** (-float(_RENORM_SHIFT))
            w[big] *= fac
            wp[big] *= fac
            scale[big] += 1
        h *= min(4.0, 0.87 * (rtol / max(err, 1e-16)) ** 0.2)


def phi_table(m1, m2, ev, t_out, rtol=1e-10):
    """phi values on the product grid: shape (n_ev, n_t)."""
    ev = np.asarray(ev, dtype=float).ravel()
    t_out = np.asarray(t_out, dtype=float).ravel()
    out = np.empty((ev.size, t_out.size))

    def consume(j0, j1, block):
        out[:, j0:j1] = block

    march(m1, m2, ev, t_out, rtol, consume)
    return out


def phi_sum_t(m1, m2, ev, t_nodes, coef, rtol=1e-10):
    """sum_i coef[p, i] * phi_ev(t_i) for each p and ev: shape (n_p, n_ev)."""
    ev = np.asarray(ev, dtype=float).ravel()
    coef = np.atleast_2d(np.asarray(coef, dtype=float))
    out = np.zeros((coef.shape[0], ev.size))

    def consume(j0, j1, block):
        out[...] += coef[:, j0:j1] @ block.T

    march(m1, m2, ev, t_nodes, rtol, consume)
    return out


def phi_sum_ev(m1, m2, ev, wcoef, t_out, rtol=1e-10):
    """sum_j wcoef[p, j] * phi_(ev_j)(t) for each p and t: shape (n_p, n_t).

    ``wcoef`` may be complex; the contraction splits into two real products.
    """
    ev = np.asarray(ev, dtype=float).ravel()
    wcoef = np.atleast_2d(np.asarray(wcoef))
    t_out = np.asarray(t_out, dtype=float).ravel()
    complex_out = np.iscomplexobj(wcoef)
    dtype = np.complex128 if complex_out else np.float64
    out = np.zeros((wcoef.shape[0], t_out.size), dtype=dtype)
    if complex_out:
        wre = np.ascontiguousarray(wcoef.real)
        wim = np.ascontiguousarray(wcoef.imag)

        def consume(j0, j1, block):
            out[:, j0:j1] += wre @ block
            out[:, j0:j1] += 1j * (wim @ block)

    else:
        wre = np.ascontiguousarray(wcoef)

        def consume(j0, j1, block):
            out[:, j0:j1] += wre @ block

    march(m1, m2, ev, t_out, rtol, consume)
    return out
