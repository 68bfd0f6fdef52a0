import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperwave import space
from hyperwave.errors import RangeError

# frozen with mpmath at 30 digits
SINH1_SQ = 1.38109784554181573
SINH_HALF_SQ_SINH1 = 0.319114505139853963
TWO_COTH_1 = 2.62607057099866261
TWO_COTH_001 = 2000.00066666662222


def test_make_space_h3r():
    sp = space.make_space(2, 0)
    assert sp.n == 3
    assert sp.rho == 1.0
    assert sp.rho_ge_one
    assert sp.is_geometric


def test_make_space_low_rho_flagged():
    sp = space.make_space(1, 0)
    assert sp.n == 2
    assert sp.rho == 0.5
    assert not sp.rho_ge_one


def test_make_space_cayley():
    sp = space.make_space(8, 7)
    assert sp.n == 16
    assert sp.rho == 11.0
    assert sp.is_geometric


@pytest.mark.parametrize("m1", [0, -1, -5])
def test_make_space_rejects_bad_m1(m1):
    with pytest.raises(ValueError):
        space.make_space(m1, 0)


def test_make_space_rejects_negative_m2():
    with pytest.raises(ValueError):
        space.make_space(2, -1)


def test_non_geometric_pairs_accepted_but_flagged():
    assert not space.make_space(3, 1).is_geometric
    assert not space.make_space(5, 3).is_geometric
    assert not space.make_space(7, 7).is_geometric
    assert space.make_space(4, 3).is_geometric
    assert space.make_space(6, 1).is_geometric


def test_presets():
    assert space.preset("H3R").key() == (2, 0)
    assert space.preset("H2C").key() == (2, 1)
    assert space.preset("H2H").key() == (4, 3)
    assert space.preset("CayP").key() == (8, 7)
    assert space.preset("HnR", dim=5).key() == (4, 0)
    assert space.preset("H5R").key() == (4, 0)
    with pytest.raises(ValueError):
        space.preset("HnR")
    with pytest.raises(ValueError):
        space.preset("X2Z")


def test_density_zero_at_origin():
    sp = space.make_space(2, 0)
    assert space.density(sp, 0.0) == 0.0


def test_density_frozen_values():
    assert space.density(space.make_space(2, 0), 1.0) == pytest.approx(SINH1_SQ, rel=1e-14)
    assert space.density(space.make_space(2, 1), 0.5) == pytest.approx(
        SINH_HALF_SQ_SINH1, rel=1e-14)


def test_density_overflow_reported():
    with pytest.raises(RangeError):
        space.density(space.make_space(2, 0), 400.0)


def test_log_density_derivative_frozen():
    sp = space.make_space(2, 0)
    assert space.log_density_derivative(sp, 1.0) == pytest.approx(TWO_COTH_1, rel=1e-14)
    assert space.log_density_derivative(sp, 0.001) == pytest.approx(TWO_COTH_001, rel=1e-13)


def test_log_density_derivative_pole():
    sp = space.make_space(2, 0)
    with pytest.raises(ValueError):
        space.log_density_derivative(sp, 0.0)


def test_log_density_derivative_limit_large_t():
    sp = space.make_space(2, 0)
    assert space.log_density_derivative(sp, 40.0) == pytest.approx(2.0 * sp.rho, rel=1e-12)


@pytest.mark.parametrize("m1,m2", [(2, 0), (2, 1), (4, 3), (8, 7), (3, 2)])
def test_density_power_limit(m1, m2):
    sp = space.make_space(m1, m2)
    for t in (1e-8, 1e-6, 1e-4):
        assert space.density_over_power(sp, t) == pytest.approx(2.0**m2, rel=1e-7)


@pytest.mark.parametrize("m1,m2", [(2, 0), (2, 1), (4, 3)])
def test_t_times_log_derivative_limit(m1, m2):
    sp = space.make_space(m1, m2)
    for t in (1e-6, 1e-4):
        assert t * space.log_density_derivative(sp, t) == pytest.approx(sp.n - 1, rel=1e-7)


@given(
    t1=st.floats(min_value=1e-3, max_value=20.0),
    t2=st.floats(min_value=1e-3, max_value=20.0),
)
def test_density_strictly_increasing(t1, t2):
    sp = space.make_space(2, 1)
    lo, hi = min(t1, t2), max(t1, t2)
    if hi - lo < 1e-9:
        return
    assert space.density(sp, hi) > space.density(sp, lo) > 0.0


def test_ball_volume_positive(h3):
    assert space.ball_volume(h3, 1.0) > 0.0
