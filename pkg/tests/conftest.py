import numpy as np
import pytest

from hyperwave import space, transform


@pytest.fixture(scope="session")
def h3():
    params = space.preset("H3R")
    transform.calibrate_normalization(params)
    return params


@pytest.fixture(scope="session")
def h2c():
    params = space.preset("H2C")
    transform.calibrate_normalization(params)
    return params


@pytest.fixture(scope="session")
def h2h():
    params = space.preset("H2H")
    transform.calibrate_normalization(params)
    return params


@pytest.fixture(scope="session")
def small_radial(h3):
    """Cheap, well-resolved radial profile for transform tests."""
    grid = transform.default_radial_grid(tmax=5.0, n_panels=96)
    values = np.exp(-2.0 * grid**2) * (1.0 + 0.5 * grid**2)
    return transform.RadialProfile(grid=grid, values=values, space=h3)


def closed_form_h3(lam, t):
    """Spherical function on H3R: sin(lam t)/(lam sinh t), limits included."""
    lam = np.asarray(lam, dtype=float)
    t = np.asarray(t, dtype=float)
    out = np.ones(np.broadcast_shapes(lam.shape, t.shape))
    lam_b = np.broadcast_to(lam, out.shape)
    t_b = np.broadcast_to(t, out.shape)
    pos = t_b > 0
    lam_pos = lam_b[pos]
    t_pos = t_b[pos]
    num = np.where(lam_pos > 0, np.sin(lam_pos * t_pos), t_pos)
    den = np.where(lam_pos > 0, lam_pos * np.sinh(t_pos), np.sinh(t_pos))
    out[pos] = num / den
    return out
