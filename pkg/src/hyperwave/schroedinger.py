"""Fractional Schroedinger propagator and the operator experiments.

The propagator is the spectral multiplier e^(i t (lam^2 + rho^2)^(a/2)),
a > 1, applied through the inverse-transform quadrature. On top of it:

* the localized space-time field (both cutoffs applied),
* the time-derivative split into multiplier and cutoff-derivative parts,
* the discretized maximal operator (sup over a time grid),
* mixed space-time Sobolev norms via temporal Fourier analysis,
* the convergence / maximal-ratio / endpoint-ratio experiment drivers.
"""

import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.interpolate import CubicSpline

from . import cutoff as cutoff_mod
from . import space as space_mod
from . import specfun, spherical, transform
from .errors import AliasingWarning, ConfigError
from .util import gauss_panels

_PHASE_BLOCK = 4_000_000  # cap on n_t * n_lam elements per phase chunk
_MASS_TOL = 1e-12  # relative spectral L2 mass allowed beyond the cutoff


def _require_order(a):
    if not a > 1.0:
        raise ConfigError(
            f"fractional order a = {a} is not allowed: the maximal estimate "
            "requires a > 1"
        )


def phase_exponent(params, lam, a):
    """Dispersion relation u(lam) = (lam^2 + rho^2)^(a/2)."""
    lam = np.asarray(lam, dtype=float)
    return (lam**2 + params.rho**2) ** (0.5 * a)


def group_speed(params, lam, a):
    """u'(lam) = a lam (lam^2 + rho^2)^(a/2 - 1): packet speed at frequency lam."""
    lam = np.asarray(lam, dtype=float)
    return a * lam * (lam**2 + params.rho**2) ** (0.5 * a - 1.0)


def multiplier(params, lam, t, a):
    """Unimodular propagator symbol e^(i t u(lam)); rejects a <= 1."""
    _require_order(a)
    return np.exp(1j * t * phase_exponent(params, lam, a))


def spectral_mass_cutoff(params, member, rel_tol=_MASS_TOL):
    """Lambda beyond which the member's spectral L2 mass is below rel_tol."""
    lam = np.linspace(0.0, 2.287 * member.lam_c, 4001)
    dens = specfun.plancherel_density(
        params, np.maximum(lam, 1e-3),
        n_scale=space_mod.ensure_calibrated(params).n_scale,
    )
    w = np.abs(transform.spectral_bump_values(member.q, member.lam_c, lam)) ** 2 * dens
    total = np.trapezoid(w, lam)
    tail = total - np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(lam))])
    idx = np.nonzero(tail <= rel_tol**2 * total)[0]
    return float(lam[idx[0]]) if idx.size else float(lam[-1])


def phase_resolving_rule(params, lam_hi, a, t_max, x_max, order=8):
    """Panel rule on [0, lam_hi] resolving phi_lam(x) e^(i t u(lam)).

    Panel widths follow the local rule width <= pi/(4 (x_max + t u'(lam))),
    so panels refine toward large lambda where the multiplier oscillates
    fastest. Total panel count is the integral of the required density.
    """
    lam_dense = np.linspace(0.0, lam_hi, 4097)
    dens = (4.0 / math.pi) * (x_max + t_max * group_speed(params, lam_dense, a))
    dens = np.maximum(dens, 1.0 / 0.25)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(lam_dense))])
    n_panels = max(8, int(math.ceil(cum[-1])))
    edges = np.interp(np.linspace(0.0, cum[-1], n_panels + 1), cum, lam_dense)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _inverse_weights(params, nodes, weights, fh_nodes, cal):
    dens = specfun.plancherel_density(params, nodes, n_scale=cal.n_scale)
    return fh_nodes * dens * weights * cal.c_inverse


def propagate(fh, t, a, radial_grid=None, rtol=1e-10):
    """S_t f: the inverse quadrature with the extra unimodular multiplier.

    At t = 0 this reproduces ``transform.inverse`` exactly (same rule, unit
    phase). Returned values are complex for t != 0.
    """
    _require_order(a)
    transform._check_decay(fh.grid, fh.values, "spectral profile")
    cal = space_mod.ensure_calibrated(fh.space)
    if radial_grid is None:
        radial_grid = transform.default_radial_grid()
    radial_grid = np.asarray(radial_grid, dtype=float)
    lam_hi = transform.active_extent(fh.grid, fh.values)
    x_max = float(radial_grid[-1])
    freq = x_max + abs(t) * float(group_speed(fh.space, lam_hi, a))
    width = transform.panel_width(freq, transform.DEFAULT_LMAX / transform.DEFAULT_SPECTRAL_PANELS)
    n_panels = int(math.ceil(lam_hi / width))
    nodes, weights = gauss_panels(0.0, lam_hi, n_panels, order=transform.PANEL_ORDER)
    sampled = transform._sample(fh.grid, fh.values, nodes)
    wcoef = _inverse_weights(fh.space, nodes, weights, sampled, cal)
    if t != 0.0:
        wcoef = wcoef * np.exp(1j * t * phase_exponent(fh.space, nodes, a))
    vals = spherical.phi_contract_spectrum(fh.space, nodes, wcoef[None, :], radial_grid,
                                           rtol)[0]
    if t == 0.0 and np.max(np.abs(vals.imag)) <= 1e-10 * max(np.max(np.abs(vals.real)), 1e-300):
        vals = vals.real
    return transform.RadialProfile(grid=radial_grid, values=vals, space=fh.space)


@dataclass(eq=False)
class SpaceTimeField:
    """Samples of the localized field on a (time x radius) product grid."""

    radius_grid: np.ndarray
    time_grid: np.ndarray
    values: np.ndarray  # (n_t, n_x) complex
    a: float
    space: space_mod.SpaceParams
    spatial_spec: cutoff_mod.BumpSpec
    temporal_spec: cutoff_mod.BumpSpec
    radius_weights: np.ndarray | None = dc_field(default=None)

    def __post_init__(self):
        self.radius_grid = np.asarray(self.radius_grid, dtype=float)
        self.time_grid = np.asarray(self.time_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.time_grid.size, self.radius_grid.size):
            raise ValueError("field shape must be (n_time, n_radius)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite field values")
        if np.any(self.time_grid < 0) or np.any(self.time_grid > self.temporal_spec.outer_radius):
            raise ValueError("time grid must lie inside the temporal support")


def _spectral_of(f):
    """Accept a radial or spectral profile; return the spectral side."""
    if isinstance(f, transform.SpectralProfile):
        return f
    if isinstance(f, transform.RadialProfile):
        return transform.forward(f)
    raise TypeError("expected a RadialProfile or SpectralProfile")


def _phase_matrix_apply(times, u_nodes, amatrix, sign=1.0, extra=None):
    """sum_lam e^(i sign t u) [extra(lam)] amatrix[lam, x] -> (n_t, n_x)."""
    n_t, n_lam = times.size, u_nodes.size
    out = np.zeros((n_t, amatrix.shape[1]), dtype=complex)
    step = max(1, _PHASE_BLOCK // max(n_t, 1))
    for j0 in range(0, n_lam, step):
        j1 = min(j0 + step, n_lam)
        phases = np.exp((1j * sign) * np.outer(times, u_nodes[j0:j1]))
        block = amatrix[j0:j1]
        if extra is not None:
            block = block * extra[j0:j1, None]
        out += phases @ block
    return out


def localized_field(f, a, radius_grid=None, time_grid=None, n_radius_panels=None,
                    n_times=512, spatial_spec=None, temporal_spec=None, rtol=1e-10):
    """Sf(x, t) = alpha0(x) psi0(t) S_t f(x) on a product grid.

    Default grids: radius = panel nodes over the spatial support (weights
    stored for later integration), time = n_times uniform samples of
    [0, outer) so the temporal Fourier analysis can run directly.
    """
    _require_order(a)
    fh = _spectral_of(f)
    params = fh.space
    cal = space_mod.ensure_calibrated(params)
    spatial_spec = spatial_spec or cutoff_mod.default_spatial()
    temporal_spec = temporal_spec or cutoff_mod.default_temporal()
    t_outer = temporal_spec.outer_radius
    x_outer = spatial_spec.outer_radius

    if time_grid is None:
        time_grid = np.arange(int(n_times)) * (t_outer / int(n_times))
    time_grid = np.asarray(time_grid, dtype=float)

    lam_hi = transform.active_extent(fh.grid, fh.values)
    radius_weights = None
    if radius_grid is None:
        if n_radius_panels is None:
            width = transform.panel_width(2.0 * lam_hi, 0.25)
            n_radius_panels = max(24, int(math.ceil(x_outer / width)))
        x_nodes, x_w = gauss_panels(0.0, x_outer, n_radius_panels, order=transform.PANEL_ORDER)
        radius_grid = np.concatenate([[0.0], x_nodes])
        radius_weights = np.concatenate([[0.0], x_w])
    radius_grid = np.asarray(radius_grid, dtype=float)

    t_max = float(np.max(time_grid)) if time_grid.size else 0.0
    nodes, weights = phase_resolving_rule(params, lam_hi, a, t_max, float(radius_grid[-1]))
    sampled = transform._sample(fh.grid, fh.values, nodes)
    wcoef = _inverse_weights(params, nodes, weights, sampled, cal)
    amatrix = spherical.phi_table(params, nodes, radius_grid, rtol) * wcoef[:, None]
    u_nodes = phase_exponent(params, nodes, a)
    field = _phase_matrix_apply(time_grid, u_nodes, amatrix)
    field *= cutoff_mod.bump(temporal_spec, time_grid)[:, None]
    field *= cutoff_mod.bump(spatial_spec, radius_grid)[None, :]
    return SpaceTimeField(radius_grid=radius_grid, time_grid=time_grid, values=field,
                          a=a, space=params, spatial_spec=spatial_spec,
                          temporal_spec=temporal_spec, radius_weights=radius_weights)


def time_derivative_split(f, a, x, t, spatial_spec=None, temporal_spec=None, rtol=1e-10):
    """(S1, S2) with S1 + S2 = d/dt [alpha0 psi0 S_t f] at one point.

    S1 carries the differentiated multiplier (i u e^(i t u)), S2 the
    differentiated temporal cutoff.
    """
    _require_order(a)
    fh = _spectral_of(f)
    params = fh.space
    cal = space_mod.ensure_calibrated(params)
    spatial_spec = spatial_spec or cutoff_mod.default_spatial()
    temporal_spec = temporal_spec or cutoff_mod.default_temporal()
    x = float(x)
    t = float(t)
    lam_hi = transform.active_extent(fh.grid, fh.values)
    freq = x + abs(t) * float(group_speed(params, lam_hi, a))
    width = transform.panel_width(freq, 0.0625)
    nodes, weights = gauss_panels(0.0, lam_hi, int(math.ceil(lam_hi / width)),
                                  order=transform.PANEL_ORDER)
    sampled = transform._sample(fh.grid, fh.values, nodes)
    wcoef = _inverse_weights(params, nodes, weights, sampled, cal)
    u_nodes = phase_exponent(params, nodes, a)
    phase = np.exp(1j * t * u_nodes)
    stack = np.vstack([wcoef * phase * (1j * u_nodes), wcoef * phase])
    vals = spherical.phi_contract_spectrum(params, nodes, stack, np.array([x]), rtol)[:, 0]
    alpha = cutoff_mod.bump(spatial_spec, x)
    s1 = alpha * cutoff_mod.bump(temporal_spec, t) * vals[0]
    s2 = alpha * cutoff_mod.bump_prime(temporal_spec, t) * vals[1]
    return complex(s1), complex(s2)


def maximal_field(f, a, time_grid=None, radius_grid=None, n_times=512, rtol=1e-10):
    """Pointwise max over the time grid of |S_t f|: a certified lower bound
    for the sup over 0 < t < 1, monotone under time-grid refinement."""
    _require_order(a)
    fh = _spectral_of(f)
    params = fh.space
    cal = space_mod.ensure_calibrated(params)
    if time_grid is None:
        time_grid = default_maximal_times(n_times)
    time_grid = np.asarray(time_grid, dtype=float)
    if time_grid.size == 0 or np.any(time_grid <= 0.0) or np.any(time_grid >= 1.0):
        raise ValueError("time grid must be non-empty and inside (0, 1)")
    if radius_grid is None:
        radius_grid = np.linspace(0.0, 1.0, 129)
    radius_grid = np.asarray(radius_grid, dtype=float)

    lam_hi = transform.active_extent(fh.grid, fh.values)
    nodes, weights = phase_resolving_rule(params, lam_hi, a, float(np.max(time_grid)),
                                          float(radius_grid[-1]))
    sampled = transform._sample(fh.grid, fh.values, nodes)
    wcoef = _inverse_weights(params, nodes, weights, sampled, cal)
    u_nodes = phase_exponent(params, nodes, a)

    best = np.zeros(radius_grid.size)
    n_lam = nodes.size
    lam_step = max(256, _PHASE_BLOCK // max(time_grid.size, 1))
    # accumulate S(t, x) in lambda chunks, then fold the max over time
    acc = np.zeros((time_grid.size, radius_grid.size), dtype=complex)
    for j0 in range(0, n_lam, lam_step):
        j1 = min(j0 + lam_step, n_lam)
        amat = spherical.phi_table(params, nodes[j0:j1], radius_grid, rtol) * \
            wcoef[j0:j1, None]
        phases = np.exp(1j * np.outer(time_grid, u_nodes[j0:j1]))
        acc += phases @ amat
    best = np.max(np.abs(acc), axis=0)
    return transform.RadialProfile(grid=radius_grid, values=best, space=params)


def default_maximal_times(n_times=512):
    """Log-spaced discretization of (0, 1) for the maximal operator."""
    return np.geomspace(1e-4, 1.0 - 1e-4, int(n_times))


def mixed_sobolev_norm(field, r, pad_factor=4):
    """L2-in-space of the temporal H^r norm of the field.

    Per radius, the time samples are reflected to negative times by complex
    conjugation (the field of real data satisfies S(-t) = conj(S(t))),
    zero-padded to ``pad_factor`` times the support, and transformed with a
    unitary-convention discrete Fourier analysis, so r = 0 reproduces the
    space-time L2 norm. Warns when the top octave of the temporal spectrum
    carries more than 1% of the mass as an aliasing signal.
    """
    if r < 0:
        raise ValueError("temporal regularity r must be >= 0")
    tg = field.time_grid
    n = tg.size
    if n < 8:
        raise ValueError("need at least 8 time samples")
    dt = tg[1] - tg[0]
    if not np.allclose(np.diff(tg), dt, rtol=1e-9, atol=1e-12) or abs(tg[0]) > 1e-12:
        raise ValueError("mixed norm needs a uniform time grid starting at 0")

    # reflect: samples on [-T, T) with S(-t) = conj(S(t))
    refl = np.concatenate([np.conj(field.values[:0:-1]), field.values], axis=0)
    n_sig = refl.shape[0]  # 2n - 1 samples
    n_fft = int(2 ** math.ceil(math.log2(pad_factor * n_sig)))
    spec = np.fft.fft(refl, n=n_fft, axis=0) * (dt / math.sqrt(2.0 * math.pi))
    tau = 2.0 * math.pi * np.fft.fftfreq(n_fft, d=dt)
    dtau = 2.0 * math.pi / (n_fft * dt)

    power = np.abs(spec) ** 2
    top = np.abs(tau) >= 0.5 * np.max(np.abs(tau))
    mass = power.sum(axis=0)
    top_mass = power[top].sum(axis=0)
    frac = float(np.max(top_mass / np.maximum(mass, 1e-300)))
    if frac > 0.01:
        warnings.warn(
            f"temporal spectrum has {frac:.1%} of its mass in the top octave; "
            "increase the time resolution",
            AliasingWarning,
            stacklevel=2,
        )

    hr_sq = ((1.0 + tau**2) ** r)[:, None] * power
    per_x = hr_sq.sum(axis=0) * dtau
    if field.radius_weights is not None:
        x_w = field.radius_weights
        x_nodes = field.radius_grid
        dens = np.where(x_nodes > 0, space_mod.density(field.space, x_nodes), 0.0)
        total = float(np.dot(x_w, dens * per_x))
    else:
        dens = np.where(field.radius_grid > 0,
                        space_mod.density(field.space, field.radius_grid), 0.0)
        total = float(np.trapezoid(per_x * dens, field.radius_grid))
    return math.sqrt(max(total, 0.0))


# --- experiment drivers -----------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    t: float
    l2_error_on_ball: float
    sup_error_on_ball: float


def converge_study(params, a, s, member=None, times=(1e-1, 1e-2, 1e-3), ball=1.0,
                   lam_panels_scale=1.0, rtol=1e-10):
    """||S_t f - f|| on the ball for shrinking t.

    The study notes that the family members have rapidly decaying rather
    than compactly supported radial parts, a slightly wider class than the
    pointwise-convergence statement assumes.
    """
    _require_order(a)
    if not params.rho_ge_one:
        raise ConfigError("experiments run on spaces with rho >= 1 only")
    cal = space_mod.ensure_calibrated(params)
    if member is None:
        member = transform.family_member("q3_L8")
    lam_hi = spectral_mass_cutoff(params, member)
    x_nodes, x_w = gauss_panels(0.0, ball, max(16, int(math.ceil(ball / transform.panel_width(2 * lam_hi, 0.25)))),
                                order=transform.PANEL_ORDER)
    t_max = max(times)
    freq = ball + t_max * float(group_speed(params, lam_hi, a))
    width = transform.panel_width(freq, 0.0625) / lam_panels_scale
    nodes, weights = gauss_panels(0.0, lam_hi, int(math.ceil(lam_hi / width)),
                                  order=transform.PANEL_ORDER)
    fh_nodes = transform.spectral_bump_values(member.q, member.lam_c, nodes)
    wcoef = _inverse_weights(params, nodes, weights, fh_nodes, cal)
    u_nodes = phase_exponent(params, nodes, a)
    dens = space_mod.density(params, x_nodes)

    rows = []
    phimat = spherical.phi_table(params, nodes, x_nodes, rtol) * wcoef[:, None]
    for t in times:
        diff = (np.exp(1j * t * u_nodes) - 1.0) @ phimat
        l2 = math.sqrt(float(np.dot(x_w * dens, np.abs(diff) ** 2)))
        rows.append(ConvergenceRow(t=float(t), l2_error_on_ball=l2,
                                   sup_error_on_ball=float(np.max(np.abs(diff)))))
    return rows


@dataclass(frozen=True)
class MaximalRow:
    profile_id: str
    hs_norm: float
    maximal_l2: float
    ratio: float


def maximal_study(params, a, s, members=None, n_times=512, lam_cutoff_scale=1.0,
                  ball=1.0, rtol=1e-10):
    """||S* f||_{L2(ball)} / ||f||_{H^s} over the family.

    The time sup is discretized on a log grid in (0, 1); refining the grid
    can only increase the discrete sup, so ratios are certified lower
    bounds. ``lam_cutoff_scale`` and ``n_times`` expose the doubling knobs.
    """
    _require_order(a)
    if not params.rho_ge_one:
        raise ConfigError("experiments run on spaces with rho >= 1 only")
    cal = space_mod.ensure_calibrated(params)
    if members is None:
        members = transform.default_family()
    times = default_maximal_times(n_times)
    rows = []
    for member in members:
        lam_hi = spectral_mass_cutoff(params, member) * lam_cutoff_scale
        nodes, weights = phase_resolving_rule(params, lam_hi, a, float(times[-1]), ball)
        fh_nodes = transform.spectral_bump_values(member.q, member.lam_c, nodes)
        wcoef = _inverse_weights(params, nodes, weights, fh_nodes, cal)
        u_nodes = phase_exponent(params, nodes, a)
        x_panels = max(16, int(math.ceil(ball / transform.panel_width(2 * lam_hi, 0.25))))
        x_nodes, x_w = gauss_panels(0.0, ball, x_panels, order=transform.PANEL_ORDER)
        acc = np.zeros((times.size, x_nodes.size), dtype=complex)
        lam_step = max(256, _PHASE_BLOCK // times.size)
        for j0 in range(0, nodes.size, lam_step):
            j1 = min(j0 + lam_step, nodes.size)
            amat = spherical.phi_table(params, nodes[j0:j1], x_nodes, rtol) * \
                wcoef[j0:j1, None]
            acc += np.exp(1j * np.outer(times, u_nodes[j0:j1])) @ amat
        star = np.max(np.abs(acc), axis=0)
        dens = space_mod.density(params, x_nodes)
        max_l2 = math.sqrt(float(np.dot(x_w * dens, star**2)))
        grid = transform.default_spectral_grid(lam_max=max(lam_hi * 1.05, 8.0),
                                               n_panels=max(64, int(16 * lam_hi)))
        fh = transform.family_spectral(params, member, grid=grid)
        hs = transform.sobolev_norm(fh, s)
        rows.append(MaximalRow(profile_id=member.profile_id, hs_norm=hs,
                               maximal_l2=max_l2, ratio=max_l2 / hs))
    return rows


@dataclass(frozen=True)
class EndpointRow:
    profile_id: str
    ratio_h0: float  # ||Sf||_{L2(H^0)} / ||f||_{H^{-s}}
    ratio_h1: float  # ||Sf||_{L2(H^1)} / ||f||_{H^{-s+a}}


def endpoint_ratios(params, a, members=None, s=None, n_times=None, rtol=1e-10):
    """Endpoint mixed-norm ratios over the family; s defaults to (a-1)/2."""
    _require_order(a)
    if s is None:
        s = 0.5 * (a - 1.0)
    if members is None:
        members = [m for m in transform.default_family() if m.lam_c <= 8.0]
    cal = space_mod.ensure_calibrated(params)
    del cal
    rows = []
    for member in members:
        lam_hi = spectral_mass_cutoff(params, member)
        u_max = float(phase_exponent(params, lam_hi, a))
        n_t = n_times or int(2 ** math.ceil(math.log2(max(512.0, 1.5 * u_max * 2.0 / math.pi))))
        grid = transform.default_spectral_grid(lam_max=max(lam_hi * 1.05, 8.0),
                                               n_panels=max(64, int(16 * lam_hi)))
        fh = transform.family_spectral(params, member, grid=grid)
        field = localized_field(fh, a, n_times=n_t)
        h0 = mixed_sobolev_norm(field, 0.0)
        h1 = mixed_sobolev_norm(field, 1.0)
        rows.append(EndpointRow(
            profile_id=member.profile_id,
            ratio_h0=h0 / transform.sobolev_norm(fh, -s),
            ratio_h1=h1 / transform.sobolev_norm(fh, -s + a),
        ))
    return rows


def unitarity_ratio(params, a, member, t, rtol=1e-10):
    """||S_t f||_2 / ||f||_2 with both norms computed on the radial side.

    The spatial domain is sized from the group speed of the active spectrum
    so the dispersed packet stays inside it.
    """
    _require_order(a)
    cal = space_mod.ensure_calibrated(params)
    lam_hi = spectral_mass_cutoff(params, member, rel_tol=1e-9)
    speed = float(group_speed(params, lam_hi, a))
    x_max = 1.3 * speed * t + 20.0
    freq = x_max + t * speed
    width = transform.panel_width(freq, 0.0625)
    nodes, weights = gauss_panels(0.0, lam_hi, int(math.ceil(lam_hi / width)),
                                  order=transform.PANEL_ORDER)
    fh_nodes = transform.spectral_bump_values(member.q, member.lam_c, nodes)
    wcoef = _inverse_weights(params, nodes, weights, fh_nodes, cal)
    phase = np.exp(1j * t * phase_exponent(params, nodes, a))

    x_panels = int(math.ceil(x_max / transform.panel_width(2.0 * lam_hi, 0.25)))
    x_nodes, x_w = gauss_panels(0.0, x_max, x_panels, order=transform.PANEL_ORDER)
    both = np.vstack([wcoef * phase, wcoef.astype(complex)])
    vals = spherical.phi_contract_spectrum(params, nodes, both, x_nodes, rtol)
    dens = space_mod.density(params, x_nodes)
    n_prop = math.sqrt(float(np.dot(x_w * dens, np.abs(vals[0]) ** 2)))
    n_zero = math.sqrt(float(np.dot(x_w * dens, np.abs(vals[1]) ** 2)))
    return n_prop / n_zero
