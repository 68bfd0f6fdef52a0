import math

import numpy as np
import pytest
import scipy.special as sps

from hyperwave import space, specfun
from hyperwave.errors import PoleError

LOG_SQRT_PI = 0.572364942924700087
PI_OVER_SINH_PI = 0.272029054982133163
ABS_SIN10_OVER_10 = 0.054402111088936981
BOUND_HALF_AT_10 = 0.125331413731550025  # sqrt(pi/2)/10


class TestLogGamma:
    def test_at_one(self):
        assert specfun.log_gamma_complex(1.0) == pytest.approx(0.0, abs=1e-14)

    def test_at_half(self):
        assert complex(specfun.log_gamma_complex(0.5)).real == pytest.approx(
            LOG_SQRT_PI, rel=1e-13)

    def test_gamma_imag_axis_identity(self):
        # |Gamma(i lam)|^2 = pi / (lam sinh(pi lam)), series-checked identity
        assert specfun.gamma_abs_sq_imag_axis(1.0) == pytest.approx(
            PI_OVER_SINH_PI, rel=1e-12)
        lam = np.linspace(0.1, 50.0, 173)
        product = specfun.gamma_abs_sq_imag_axis(lam) * lam * np.sinh(math.pi * lam)
        assert np.max(np.abs(product - math.pi)) < 1e-10

    def test_poles_rejected(self):
        for z in (0.0, -1.0, -7.0):
            with pytest.raises(PoleError):
                specfun.log_gamma_complex(z)

    def test_matches_scipy_on_grid(self):
        rng = np.random.default_rng(42)
        z = rng.uniform(0.05, 30, 64) + 1j * rng.uniform(-30, 30, 64)
        ours = specfun.log_gamma_complex(z)
        ref = sps.loggamma(z)
        assert np.max(np.abs(ours - ref) / np.maximum(np.abs(ref), 1.0)) < 1e-12

    def test_imag_axis_matches_scipy(self):
        lam = np.linspace(0.1, 100, 57)
        ours = specfun.log_gamma_complex(1j * lam)
        ref = sps.loggamma(1j * lam)
        assert np.max(np.abs(ours - ref)) < 1e-11


class TestNormalizedBessel:
    def test_half_order_closed_form(self):
        z = np.linspace(0.05, 40, 301)
        ref = np.sin(z) / z
        assert np.max(np.abs(specfun.normalized_bessel(0.5, z) - ref)) < 1e-12

    def test_half_order_at_pi_vanishes(self):
        assert abs(specfun.normalized_bessel(0.5, math.pi)) < 1e-14

    def test_value_at_zero(self):
        assert specfun.normalized_bessel(0.5, 0.0) == pytest.approx(1.0, rel=1e-14)
        # general order: series limit Gamma(mu+1/2) sqrt(pi) / (2 Gamma(mu+1))
        for mu in (0.0, 1.0, 3.5, 7.0):
            expected = math.exp(sps.gammaln(mu + 0.5) - sps.gammaln(mu + 1.0)) * \
                math.sqrt(math.pi) / 2.0
            assert specfun.normalized_bessel(mu, 0.0) == pytest.approx(expected, rel=1e-13)

    def test_decay_bound_half_order(self):
        value = abs(specfun.normalized_bessel(0.5, 10.0))
        assert value == pytest.approx(ABS_SIN10_OVER_10, rel=1e-12)
        assert value <= BOUND_HALF_AT_10

    def test_decay_bound_sampled_orders(self):
        # |J_norm(mu, t)| <= Gamma(mu+1/2) Gamma(1/2) 2^(mu-1) / t^(mu+1/2), t >= 1
        for mu in (0.5, 1.0, 2.5, 5.0):
            pref = math.exp(sps.gammaln(mu + 0.5)) * math.sqrt(math.pi) * 2 ** (mu - 1)
            for t in (1.0, 2.0, 10.0, 50.0):
                assert abs(specfun.normalized_bessel(mu, t)) <= pref / t ** (mu + 0.5) * (1 + 1e-12)

    @pytest.mark.parametrize("mu", [0.0, 0.5, 1.0, 3.5, 7.0, 15.0, 30.0])
    def test_series_region_matches_scipy(self, mu):
        z = np.linspace(0.01, 20.0, 211)
        ours = specfun.normalized_bessel(mu, z)
        pref = math.exp(sps.gammaln(mu + 0.5)) * math.sqrt(math.pi) * 2 ** (mu - 1)
        ref = sps.jv(mu, z) / z**mu * pref
        assert np.max(np.abs(ours - ref)) < 1e-10

    @pytest.mark.parametrize("mu", [0.0, 0.5, 1.0, 3.5, 7.0, 15.0])
    def test_switchover_overlap(self, mu):
        cut = max(12.0, 2.0 * mu)
        z = np.linspace(0.97 * cut, 1.03 * cut, 33)
        series = specfun._bessel_series(mu, z)
        asym = specfun._bessel_asymptotic(mu, z)
        assert np.max(np.abs(series - asym)) < 1e-9

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            specfun.normalized_bessel(-0.5, 1.0)
        with pytest.raises(ValueError):
            specfun.normalized_bessel(0.5, -1.0)


class TestJacobiParams:
    @pytest.mark.parametrize("m1,m2", [(2, 0), (2, 1), (4, 3), (8, 7)])
    def test_invariants(self, m1, m2):
        sp = space.make_space(m1, m2)
        jac = specfun.JacobiParams.from_space(sp)
        assert jac.alpha >= jac.beta
        assert jac.alpha + jac.beta + 1.0 == pytest.approx(sp.rho, abs=1e-14)


class TestCFunction:
    def test_h3r_inverse_lambda_law(self, h3):
        # |c| is proportional to 1/lambda on H3R
        c1 = abs(specfun.c_function(h3, 1.0))
        c2 = abs(specfun.c_function(h3, 2.0))
        assert c2 / c1 == pytest.approx(0.5, rel=1e-12)

    def test_rejects_nonpositive_lambda(self, h3):
        for lam in (0.0, -1.0):
            with pytest.raises(PoleError):
                specfun.c_function(h3, lam, n_scale=1.0)

    def test_density_positive(self, h3, h2c):
        lam = np.geomspace(1e-3, 1e3, 101)
        for sp in (h3, h2c):
            dens = specfun.plancherel_density(sp, lam)
            assert np.all(dens > 0)

    def test_density_vanishes_like_lambda_sq_at_zero(self, h2c):
        # log-log slope of |c|^-2 near 0 is 2 (simple pole of Gamma(i lam))
        lams = np.geomspace(1e-3, 1e-2, 9)
        dens = specfun.plancherel_density(h2c, lams, n_scale=1.0)
        slope = np.polyfit(np.log(lams), np.log(dens), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.01)

    def test_h3r_density_exact_square_law(self, h3):
        lam = np.array([0.3, 1.0, 5.0, 40.0])
        dens = specfun.plancherel_density(h3, lam)
        ratio = specfun.plancherel_density(h3, 2.0 * lam) / dens
        assert np.allclose(ratio, 4.0, rtol=1e-11)

    def test_h2c_asymptotic_slope(self, h2c):
        # log-log slope of the density at large lambda approaches n-1 = 3
        lams = np.array([900.0, 1000.0, 1100.0])
        dens = specfun.plancherel_density(h2c, lams)
        slope = np.polyfit(np.log(lams), np.log(dens), 1)[0]
        assert slope == pytest.approx(3.0, abs=0.05)

    def test_envelope_bounded(self, h3, h2c):
        lam = np.geomspace(0.01, 1000.0, 400)
        for sp in (h3, h2c):
            dens = specfun.plancherel_density(sp, lam)
            ratio = dens / (lam**2 * (1.0 + lam) ** (sp.n - 3))
            assert np.all(np.isfinite(ratio))
            assert ratio.max() < 1e3
