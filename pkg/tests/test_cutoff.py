import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperwave import cutoff
from hyperwave.util import gauss_panels


class TestBump:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            cutoff.BumpSpec(inner_radius=2.0, outer_radius=1.0, kind="spatial")
        with pytest.raises(ValueError):
            cutoff.BumpSpec(inner_radius=0.0, outer_radius=1.0, kind="spatial")
        with pytest.raises(ValueError):
            cutoff.BumpSpec(inner_radius=1.0, outer_radius=2.0, kind="frequency")

    def test_plateau_and_support(self):
        spec = cutoff.default_temporal()
        for t in (0.0, 0.3, 1.0, -0.9):
            assert cutoff.bump(spec, t) == 1.0
        for t in (2.0, 2.5, -3.0):
            assert cutoff.bump(spec, t) == 0.0

    def test_even(self):
        spec = cutoff.default_temporal()
        t = np.linspace(0.0, 3.0, 301)
        assert np.array_equal(cutoff.bump(spec, t), cutoff.bump(spec, -t))

    @given(st.floats(min_value=-10.0, max_value=10.0, allow_nan=False))
    def test_range(self, t):
        spec = cutoff.default_spatial()
        assert 0.0 <= cutoff.bump(spec, t) <= 1.0

    def test_monotone_on_transition(self):
        spec = cutoff.default_temporal()
        t = np.linspace(1.0, 2.0, 200)
        vals = cutoff.bump(spec, t)
        assert np.all(np.diff(vals) <= 1e-15)

    def test_derivative_matches_finite_difference(self):
        spec = cutoff.default_temporal()
        t = np.linspace(-2.5, 2.5, 401)
        h = 1e-6
        fd = (cutoff.bump(spec, t + h) - cutoff.bump(spec, t - h)) / (2.0 * h)
        assert np.max(np.abs(fd - cutoff.bump_prime(spec, t))) < 1e-8

    def test_derivative_zero_on_plateau_and_outside(self):
        spec = cutoff.default_temporal()
        assert cutoff.bump_prime(spec, 0.5) == 0.0
        assert cutoff.bump_prime(spec, 2.5) == 0.0


class TestPsiHat:
    def test_zero_frequency_mass(self):
        spec = cutoff.default_temporal()
        nodes, weights = gauss_panels(0.0, spec.outer_radius, 256)
        mass = 2.0 * float(np.dot(weights, cutoff.squared_bump(spec, nodes)))
        assert cutoff.psi_hat(spec, 0.0) == pytest.approx(mass, rel=1e-10)
        assert mass > 0.0

    def test_even(self):
        spec = cutoff.default_temporal()
        for xi in (0.4, 3.0, 55.0):
            assert cutoff.psi_hat(spec, xi) == cutoff.psi_hat(spec, -xi)

    def test_maximum_at_zero(self):
        spec = cutoff.default_temporal()
        xi = np.linspace(0.0, 300.0, 4000)
        vals = np.abs(cutoff.psi_hat(spec, xi))
        assert vals.max() <= cutoff.psi_hat(spec, 0.0) + 1e-12

    def test_rapid_decay_eighth_power(self):
        spec = cutoff.default_temporal()
        xi = np.linspace(10.0, 100.0, 400)
        weighted = np.abs(cutoff.psi_hat(spec, xi)) * xi**8
        sup_cached = weighted.max()
        assert np.isfinite(sup_cached)
        # stable against the direct (uncached, refined) quadrature oracle
        probes = xi[np.argsort(weighted)[-8:]]
        sup_direct = max(abs(cutoff.psi_hat_direct(spec, x)) * x**8 for x in probes)
        assert sup_direct == pytest.approx(sup_cached, rel=1e-3)

    def test_cache_interpolation_error(self):
        spec = cutoff.default_temporal()
        rng = np.random.default_rng(11)
        probes = np.concatenate([
            rng.uniform(0.0, 4.0, 12),
            rng.uniform(4.0, 100.0, 24),
            rng.uniform(100.0, 315.0, 12),
        ])
        worst = max(abs(cutoff.psi_hat(spec, x) - cutoff.psi_hat_direct(spec, x))
                    for x in probes)
        assert worst < 1e-8

    def test_zero_beyond_cache(self):
        spec = cutoff.default_temporal()
        assert cutoff.psi_hat(spec, 2.0e4) == 0.0

    def test_requires_temporal(self):
        with pytest.raises(ValueError):
            cutoff.psi_hat(cutoff.default_spatial(), 1.0)
        with pytest.raises(ValueError):
            cutoff.psi_hat_direct(cutoff.default_spatial(), 1.0)

    def test_table_reused(self):
        spec = cutoff.default_temporal()
        assert cutoff.psi_hat_table(spec) is cutoff.psi_hat_table(spec)
