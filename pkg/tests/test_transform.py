import math

import numpy as np
import pytest

from hyperwave import space, specfun, spherical, transform
from hyperwave.errors import DivergenceWarning, TruncationError

SQRT_PI = 1.772453850905516027
SQRT_2_OVER_PI = 0.797884560802865356


def _small_spectral(params, values_fn, lam_max=16.0, n_panels=192):
    grid = transform.default_spectral_grid(lam_max=lam_max, n_panels=n_panels)
    return transform.SpectralProfile(grid=grid, values=values_fn(grid).astype(complex),
                                     space=params)


class TestCalibration:
    def test_h3r_closed_form_constants(self, h3):
        cal = transform.calibrate_normalization(h3)
        assert cal.n_scale == pytest.approx(SQRT_PI, rel=1e-12)
        assert cal.c_forward == pytest.approx(SQRT_2_OVER_PI, rel=1e-9)
        assert cal.c_inverse == cal.c_forward

    def test_idempotent(self, h3):
        first = transform.calibrate_normalization(h3)
        second = transform.calibrate_normalization(h3)
        assert second is first  # stored constants, bitwise identical

    def test_h2c_amplitude_fit(self, h2c):
        # independent closed form: N = 2^rho Gamma(n/2) (= 4 for this space)
        cal = transform.calibrate_normalization(h2c)
        assert cal.n_scale == pytest.approx(4.0, rel=1e-6)
        assert cal.roundtrip_residual < 1e-3

    def test_h2c_held_out_plancherel(self, h2c):
        # Plancherel ratio on a second bump the calibration never saw
        grid = transform.default_radial_grid(tmax=5.0, n_panels=128)
        f = transform.RadialProfile(grid=grid, values=grid**2 * np.exp(-1.5 * grid**2),
                                    space=h2c)
        fh = transform.forward(f, spectral_grid=transform.default_spectral_grid(24.0, 256))
        lhs = transform.l2_norm_radial(f) ** 2
        rhs = transform.sobolev_norm(fh, 0.0) ** 2
        assert rhs / lhs == pytest.approx(1.0, abs=1e-3)


class TestProfiles:
    def test_radial_validation(self, h3):
        with pytest.raises(ValueError):
            transform.RadialProfile(grid=np.linspace(0, 1, 4), values=np.zeros(4), space=h3)
        with pytest.raises(ValueError):
            transform.RadialProfile(grid=np.linspace(0.1, 1, 16), values=np.zeros(16),
                                    space=h3)
        with pytest.raises(ValueError):
            transform.RadialProfile(grid=np.linspace(0, 1, 16), values=np.zeros(15),
                                    space=h3)

    def test_spectral_validation(self, h3):
        with pytest.raises(ValueError):
            transform.SpectralProfile(grid=np.linspace(-1, 1, 16), values=np.zeros(16),
                                      space=h3)
        bad = np.full(16, np.nan)
        with pytest.raises(ValueError):
            transform.SpectralProfile(grid=np.linspace(0, 1, 16), values=bad, space=h3)


class TestForward:
    def test_linearity(self, h3, small_radial):
        f = small_radial
        g = transform.RadialProfile(grid=f.grid, values=np.exp(-1.2 * f.grid**2),
                                    space=h3)
        spectral_grid = transform.default_spectral_grid(12.0, 128)
        combo = transform.RadialProfile(grid=f.grid,
                                        values=2.0 * f.values - 3.0 * g.values, space=h3)
        lhs = transform.forward(combo, spectral_grid=spectral_grid).values
        rhs = (2.0 * transform.forward(f, spectral_grid=spectral_grid).values
               - 3.0 * transform.forward(g, spectral_grid=spectral_grid).values)
        scale = np.max(np.abs(lhs))
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * scale

    def test_zero_frequency_positive(self, h3, small_radial):
        fh = transform.forward(small_radial,
                               spectral_grid=transform.default_spectral_grid(12.0, 128))
        assert fh.values[0].real > 0.0
        assert abs(fh.values[0].imag) == 0.0

    def test_complex_input_rejected(self, h3, small_radial):
        bad = transform.RadialProfile(grid=small_radial.grid,
                                      values=small_radial.values.astype(complex),
                                      space=h3)
        with pytest.raises(ValueError):
            transform.forward(bad)

    def test_truncation_error(self, h3):
        grid = transform.default_radial_grid(tmax=4.0, n_panels=64)
        slow = transform.RadialProfile(grid=grid, values=np.exp(-grid**2 / 50.0), space=h3)
        with pytest.raises(TruncationError):
            transform.forward(slow)


class TestInverse:
    def test_heat_profile_positive_decreasing(self, h3):
        fh = _small_spectral(h3, lambda lam: np.exp(-(lam**2 + h3.rho**2)))
        f = transform.inverse(fh, radial_grid=np.concatenate([[0.0], np.linspace(0.02, 2.0, 100)]))
        vals = np.real(f.values)
        assert np.all(vals > 0.0)
        assert np.all(np.diff(vals) < 0.0)

    def test_value_at_zero_is_weighted_mass(self, h3):
        # f(0) = C_S * int fhat |c|^-2 since phi = 1 at the origin
        fh = _small_spectral(h3, lambda lam: np.exp(-0.5 * lam**2))
        f = transform.inverse(fh, radial_grid=transform.default_radial_grid(6.0, 64))
        cal = transform.calibrate_normalization(h3)
        nodes, weights = transform.spectral_quad_rule(lam_max=16.0, tmax=0.0)
        dens = specfun.plancherel_density(h3, nodes)
        expected = cal.c_inverse * float(
            np.dot(weights * dens, np.exp(-0.5 * nodes**2)))
        assert np.real(f.values[0]) == pytest.approx(expected, rel=1e-8)

    def test_round_trip_small_grids(self, h3):
        member = transform.FamilyMember("q3_L4", q=3.0, lam_c=4.0)
        fh = transform.family_spectral(
            h3, member, grid=transform.default_spectral_grid(16.0, 256))
        radial_grid = transform.default_radial_grid(tmax=8.0, n_panels=560)
        f = transform.inverse(fh, radial_grid=radial_grid)
        fh2 = transform.forward(f, spectral_grid=fh.grid)
        f2 = transform.inverse(fh2, radial_grid=radial_grid)
        rel = np.linalg.norm(np.real(f2.values) - np.real(f.values)) / \
            np.linalg.norm(np.real(f.values))
        assert rel < 1e-4

    def test_spectral_truncation_error(self, h3):
        grid = transform.default_spectral_grid(8.0, 64)
        slow = transform.SpectralProfile(grid=grid, values=(1.0 + grid**2) ** -1.0,
                                         space=h3)
        with pytest.raises(TruncationError):
            transform.inverse(slow)


class TestRefinement:
    def test_order_of_convergence(self, h3):
        # deliberately coarse panels (the oscillation rule is relaxed) so the
        # quadrature error dominates; halving the width must cut it by >= 4x.
        # The reference is the rule-compliant forward, which isolates the
        # quadrature error from the fixed support-truncation floor.
        member = transform.FamilyMember("q3_L4", q=3.0, lam_c=4.0)
        spectral_grid = transform.default_spectral_grid(16.0, 256)
        fh = transform.family_spectral(h3, member, grid=spectral_grid)
        radial_grid = transform.default_radial_grid(tmax=8.0, n_panels=560)
        f = transform.inverse(fh, radial_grid=radial_grid)
        converged = transform.forward(f, spectral_grid=spectral_grid)
        errs = []
        for n_panels in (6, 12):
            fh2 = transform.forward(f, spectral_grid=spectral_grid, n_panels=n_panels)
            err = np.linalg.norm(np.abs(fh2.values - converged.values)) / \
                np.linalg.norm(np.abs(converged.values))
            errs.append(err)
        assert errs[0] / errs[1] >= 4.0


class TestNormsAndPairings:
    def test_parseval_bilinear(self, h3, small_radial):
        f = small_radial
        g = transform.RadialProfile(grid=f.grid, values=np.exp(-1.4 * f.grid**2) * f.grid,
                                    space=h3)
        sg = transform.default_spectral_grid(20.0, 256)
        fh = transform.forward(f, spectral_grid=sg)
        gh = transform.forward(g, spectral_grid=sg)
        lhs = transform.l2_inner_radial(f, g)
        rhs = transform.spectral_inner(fh, gh).real
        assert rhs == pytest.approx(lhs, rel=1e-4)

    def test_sobolev_zero_order_is_l2(self, h3, small_radial):
        fh = transform.forward(small_radial,
                               spectral_grid=transform.default_spectral_grid(20.0, 256))
        assert transform.sobolev_norm(fh, 0.0) == pytest.approx(
            transform.l2_norm_radial(small_radial), rel=1e-6)

    def test_homogeneity(self, h3):
        fh = _small_spectral(h3, lambda lam: np.exp(-0.7 * lam**2))
        doubled = transform.SpectralProfile(grid=fh.grid, values=2.0 * fh.values,
                                            space=h3)
        for s in (0.0, 0.6, 1.3):
            assert transform.sobolev_norm(doubled, s) == pytest.approx(
                2.0 * transform.sobolev_norm(fh, s), rel=1e-12)

    def test_monotone_in_s(self, h3):
        fh = _small_spectral(h3, lambda lam: np.exp(-0.7 * lam**2))
        n0 = transform.sobolev_norm(fh, 0.0)
        n_half = transform.sobolev_norm(fh, 0.5)
        n1 = transform.sobolev_norm(fh, 1.0)
        assert n1 >= n_half >= n0

    def test_divergence_warning(self, h3):
        grid = transform.default_spectral_grid(16.0, 192)
        heavy = transform.SpectralProfile(
            grid=grid, values=((1.0 + grid**2) ** -0.3).astype(complex), space=h3)
        with pytest.warns(DivergenceWarning):
            transform.sobolev_norm(heavy, 0.0)


class TestFamily:
    def test_twelve_members_with_ids(self):
        members = transform.default_family()
        assert len(members) == 12
        assert len({m.profile_id for m in members}) == 12
        assert transform.family_member("q2.1_L8").q == 2.1

    def test_membership_rule(self, h3):
        # f in H^s iff 2q > 2s + n for the un-cut bump
        assert transform.member_in_sobolev(h3, transform.family_member("q3_L8"), 0.6)
        assert not transform.member_in_sobolev(h3, transform.family_member("q2.1_L8"), 0.6)

    def test_bump_values(self):
        vals = transform.spectral_bump_values(2.0, 4.0, np.array([0.0, 1.0]))
        assert vals[0] == pytest.approx(math.exp(0.0))
        assert vals[1] == pytest.approx(0.5 * math.exp(-(0.25**8)))

    def test_unknown_member(self):
        with pytest.raises(KeyError):
            transform.family_member("q9_L9")
