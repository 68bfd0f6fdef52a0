import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from hyperwave import space, specfun, spherical
from hyperwave.errors import ConfigError

from conftest import closed_form_h3

SIN1_OVER_SINH1 = 0.716022915360433871
TWO_OVER_SINH2 = 0.551441129543566416
SIN1_OVER_2SINH_HALF = 0.807406031043195938


class TestOdePath:
    def test_value_at_zero_is_one(self, h3, h2c):
        grid = np.array([0.0, 0.5, 1.0])
        for sp in (h3, h2c):
            for lam in (0.0, 1.0, 17.0):
                assert spherical.phi_ode(sp, lam, grid)[0] == 1.0

    def test_h3r_frozen_values(self, h3):
        grid = np.array([0.0, 0.5, 1.0, 2.0])
        vals = spherical.phi_ode(h3, 1.0, grid)
        assert vals[2] == pytest.approx(SIN1_OVER_SINH1, abs=1e-10)
        vals0 = spherical.phi_ode(h3, 0.0, grid)
        assert vals0[3] == pytest.approx(TWO_OVER_SINH2, abs=1e-10)

    def test_h3r_closed_form_sweep(self, h3):
        lams = np.array([0.5, 2.0, 20.0, 120.0])
        ts = np.linspace(0.0, 5.0, 320)
        table = spherical.phi_table(h3, lams, ts)
        ref = closed_form_h3(lams[:, None], ts[None, :])
        assert np.max(np.abs(table - ref)) < 1e-9

    def test_grid_validation(self, h3):
        with pytest.raises(ValueError):
            spherical.phi_ode(h3, 1.0, np.array([0.1, 0.2]))
        with pytest.raises(ValueError):
            spherical.phi_ode(h3, 1.0, np.array([0.0, 0.2, 0.2]))


class TestDispatcher:
    def test_frozen_value(self, h3):
        assert spherical.phi(h3, 2.0, 0.5) == pytest.approx(SIN1_OVER_2SINH_HALF, abs=1e-9)

    def test_even_in_lambda_exact(self, h3, h2c):
        rng = np.random.default_rng(3)
        for sp in (h3, h2c):
            for lam in rng.uniform(0.1, 30.0, 10):
                for t in rng.uniform(0.0, 5.0, 10):
                    assert spherical.phi(sp, lam, t) == spherical.phi(sp, -lam, t)

    def test_bounded_by_one(self, h3, h2c, h2h):
        rng = np.random.default_rng(5)
        for sp in (h3, h2c, h2h):
            lams = rng.uniform(0.0, 40.0, 8)
            ts = rng.uniform(0.0, 6.0, 64)
            for lam in lams:
                assert np.max(np.abs(spherical.phi(sp, lam, np.sort(ts)))) <= 1.0

    def test_negative_radius_rejected(self, h3):
        with pytest.raises(ValueError):
            spherical.phi(h3, 1.0, -0.5)

    def test_cache_extends_for_large_radius(self, h3):
        val = spherical.phi(h3, 1.5, 11.0)
        ref = closed_form_h3(np.array(1.5), np.array(11.0))
        assert val == pytest.approx(float(ref), abs=1e-9)

    def test_thread_safety(self, h3):
        spherical.clear_phi_cache()

        def worker(seed):
            rng = np.random.default_rng(seed)
            out = []
            for _ in range(20):
                lam = float(rng.choice([1.0, 2.0, 3.0]))
                t = float(rng.uniform(0.1, 4.0))
                out.append((lam, t, spherical.phi(h3, lam, t)))
            return out

        with ThreadPoolExecutor(max_workers=8) as pool:
            results = [item for chunk in pool.map(worker, range(8)) for item in chunk]
        for lam, t, value in results:
            assert value == pytest.approx(float(closed_form_h3(np.array(lam), np.array(t))),
                                          abs=1e-8)


class TestLocalBessel:
    def test_domain(self, h3):
        with pytest.raises(ValueError):
            spherical.phi_local_bessel(h3, 1.0, 0.0)
        with pytest.raises(ValueError):
            spherical.phi_local_bessel(h3, 1.0, 1.5)
        with pytest.raises(ConfigError):
            spherical.phi_local_bessel(h3, 1.0, 0.5, M=1)

    def test_small_radius_limit(self, h3, h2c):
        for sp in (h3, h2c):
            rep = spherical.phi_local_bessel(sp, 3.0, 1e-4)
            assert rep.value == pytest.approx(1.0, abs=1e-6)

    def test_h3r_error_within_estimate(self, h3):
        rep = spherical.phi_local_bessel(h3, 5.0, 0.1)
        ode = spherical.phi(h3, 5.0, 0.1)
        assert abs(rep.value - ode) <= rep.est_error
        assert rep.path == "local_bessel"

    def test_large_lambda_branch(self, h3):
        # lam*t = 5 > 1 engages the extra decay factor in the estimate
        rep_small = spherical.phi_local_bessel(h3, 5.0, 0.1)
        rep_large = spherical.phi_local_bessel(h3, 50.0, 0.1)
        n = h3.n
        expected_ratio = (50.0 * 0.1) ** (-((n - 1) / 2.0 + 1.0))
        assert rep_large.est_error == pytest.approx(rep_small.est_error * expected_ratio,
                                                    rel=1e-9)
        ode = spherical.phi(h3, 50.0, 0.1)
        assert abs(rep_large.value - ode) <= rep_large.est_error

    @pytest.mark.parametrize("lam", [0.7, 3.0, 12.0, 45.0])
    def test_h2c_error_within_estimate(self, h2c, lam):
        for t in (0.05, 0.2, 0.6, 1.0):
            rep = spherical.phi_local_bessel(h2c, lam, t)
            ode = spherical.phi(h2c, lam, t)
            assert abs(rep.value - ode) <= rep.est_error


class TestAsymptotic:
    def test_domain(self, h3):
        with pytest.raises(ValueError):
            spherical.phi_asymptotic_leading(h3, 0.5, 2.0)
        with pytest.raises(ValueError):
            spherical.phi_asymptotic_leading(h3, 2.0, 0.5)

    def test_h3r_relative_error(self, h3):
        rep = spherical.phi_asymptotic_leading(h3, 10.0, 3.0)
        ode = spherical.phi(h3, 10.0, 3.0)
        assert abs(rep.value - ode) / abs(ode) < 1e-2
        assert abs(rep.value - ode) <= rep.est_error

    def test_envelope(self, h3, h2c):
        for sp in (h3, h2c):
            for lam in (2.0, 8.0):
                for t in (1.0, 2.5, 4.0):
                    rep = spherical.phi_asymptotic_leading(sp, lam, t)
                    cap = 2.0 * abs(specfun.c_function(sp, lam)) * math.exp(-sp.rho * t)
                    assert abs(rep.value) <= cap * (1.0 + 1e-9)

    def test_converges_to_ode_in_t(self, h2c):
        lam = 6.0
        errs = []
        for t in (1.5, 3.0, 4.5):
            rep = spherical.phi_asymptotic_leading(h2c, lam, t)
            errs.append(abs(rep.value - spherical.phi(h2c, lam, t)))
        assert errs[2] < errs[1] < errs[0]

    def test_c_magnitude_decay_trend(self, h2c):
        # fitted slope of log|c| matches the -(n-1)/2 spectral decay rate
        lams = np.geomspace(20.0, 400.0, 24)
        mags = np.abs(specfun.c_function(h2c, lams))
        slope = np.polyfit(np.log(lams), np.log(mags), 1)[0]
        assert slope == pytest.approx(-(h2c.n - 1) / 2.0, abs=0.1)


class TestEigenEquation:
    @pytest.mark.parametrize("lam", [0.5, 5.0])
    def test_residual_h3r(self, h3, lam):
        ev = lam**2 + h3.rho**2
        res = spherical.eigen_residual(h3, lam, np.linspace(0.05, 5.0, 25))
        assert res <= 1e-6 * ev

    def test_residual_h2c(self, h2c):
        ev = 25.0 + h2c.rho**2
        res = spherical.eigen_residual(h2c, 5.0, np.linspace(0.05, 5.0, 25))
        assert res <= 1e-6 * ev


class TestSmallTimeDecay:
    def test_bounded_quantity(self, h3, h2c):
        # sup |phi|(lam t)^((n-1)/2) over lam in [2,50], 1/lam <= t <= 1
        for sp in (h3, h2c):
            lams = np.geomspace(2.0, 50.0, 24)
            ts = np.geomspace(1.0 / 60.0, 1.0, 700)
            table = np.abs(spherical.phi_table(sp, lams, ts))
            weight = (np.outer(lams, ts)) ** ((sp.n - 1) / 2.0)
            mask = ts[None, :] >= (1.0 / lams)[:, None]
            quantity = np.where(mask, table * weight, 0.0)
            assert quantity.max() < 3.0
