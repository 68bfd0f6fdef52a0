"""Rank-one symmetric space described by its two root multiplicities.

The space enters the analysis only through the radial volume density
``D(t) = sinh(t)^m1 * sinh(2t)^m2`` and derived quantities; everything is
parameterized by the pair ``(m1, m2)``.
"""

import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import RangeError
from .util import logsinh

# log D(t) values beyond ~700 overflow exp(); density() reports a range error.
_LOG_OVERFLOW = 700.0


@dataclass(frozen=True)
class SpaceParams:
    """Immutable description of a rank-one space.

    n = m1 + m2 + 1 and rho = (m1 + 2*m2)/2 are derived, never passed in.
    ``rho_ge_one`` marks spaces on which the sharper decay estimates apply;
    experiment drivers only accept flagged-OK spaces.
    """

    m1: int
    m2: int
    n: int = field(init=False)
    rho: float = field(init=False)
    preset_name: str | None = None

    def __post_init__(self):
        if int(self.m1) != self.m1 or self.m1 <= 0:
            raise ValueError(f"m1 must be a positive integer, got {self.m1}")
        if int(self.m2) != self.m2 or self.m2 < 0:
            raise ValueError(f"m2 must be a non-negative integer, got {self.m2}")
        object.__setattr__(self, "m1", int(self.m1))
        object.__setattr__(self, "m2", int(self.m2))
        object.__setattr__(self, "n", self.m1 + self.m2 + 1)
        object.__setattr__(self, "rho", (self.m1 + 2 * self.m2) / 2.0)

    @property
    def rho_ge_one(self):
        return self.rho >= 1.0

    @property
    def is_geometric(self):
        """Whether (m1, m2) arises from an actual rank-one symmetric space."""
        m1, m2 = self.m1, self.m2
        if m2 == 0:
            return True  # real hyperbolic H^{m1+1}
        if m2 == 1:
            return m1 >= 2 and m1 % 2 == 0  # complex hyperbolic
        if m2 == 3:
            return m1 >= 4 and m1 % 4 == 0  # quaternionic hyperbolic
        return (m1, m2) == (8, 7)  # Cayley plane

    def key(self):
        return (self.m1, self.m2)

    def __repr__(self):
        tag = self.preset_name or f"m1={self.m1},m2={self.m2}"
        return f"SpaceParams({tag}, n={self.n}, rho={self.rho})"


def make_space(m1, m2, preset_name=None):
    """Build SpaceParams from the root multiplicities.

    Rejects m1 <= 0. Non-geometric pairs are accepted (generalized
    Jacobi-type parameters) but flagged via ``is_geometric``.
    """
    return SpaceParams(m1=m1, m2=m2, preset_name=preset_name)


_PRESETS = {
    "H3R": (2, 0),
    "H2C": (2, 1),
    "H2H": (4, 3),
    "CayP": (8, 7),
}


def preset(name, dim=None):
    """Space for a named preset: H3R, H2C, H2H, CayP, or HnR with ``dim`` n.

    ``HkR`` with a literal integer k (e.g. ``H5R``) is also accepted.
    """
    if name in _PRESETS:
        m1, m2 = _PRESETS[name]
        return make_space(m1, m2, preset_name=name)
    if name == "HnR":
        if dim is None:
            raise ValueError("preset HnR needs the dimension argument")
        if dim < 2:
            raise ValueError("HnR needs dimension >= 2")
        return make_space(dim - 1, 0, preset_name=f"H{dim}R")
    if name.startswith("H") and name.endswith("R"):
        try:
            dim = int(name[1:-1])
        except ValueError:
            raise ValueError(f"unknown space preset {name!r}") from None
        return preset("HnR", dim=dim)
    raise ValueError(f"unknown space preset {name!r}")


def preset_names():
    return list(_PRESETS) + ["HnR"]


def density(params, t):
    """Radial volume density D(t) = sinh(t)^m1 * sinh(2t)^m2.

    Exact 0 at t = 0. Computed through the factored form
    t^(n-1) * 2^m2 * (sinh t / t)^m1 * (sinh 2t / 2t)^m2 so that small-t
    values keep full relative accuracy.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("density needs t >= 0")
    ld = log_density(params, np.where(t > 0, t, 1.0))
    if np.any((np.asarray(ld) > _LOG_OVERFLOW) & (t > 0)):
        raise RangeError("density overflows for this radius")
    out = np.where(t > 0, np.exp(ld), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def log_density(params, t):
    """log D(t) for t > 0, stable for both tiny and large t."""
    t = np.asarray(t, dtype=float)
    return params.m1 * logsinh(t) + params.m2 * logsinh(2.0 * t)


def density_over_power(params, t):
    """D(t) / t^(n-1); tends to 2^m2 as t -> 0+. Valid for t >= 0."""
    t = np.asarray(t, dtype=float)
    ts = np.where(t > 0, t, 1.0)
    ratio1 = np.where(t > 0, np.sinh(ts) / ts, 1.0)
    ratio2 = np.where(t > 0, np.sinh(2.0 * ts) / (2.0 * ts), 1.0)
    out = (2.0 ** params.m2) * ratio1 ** params.m1 * ratio2 ** params.m2
    if out.ndim == 0:
        return float(out)
    return out


def log_density_derivative(params, t):
    """D'(t)/D(t) = m1 coth(t) + 2 m2 coth(2t); pole of order one at t = 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("log_density_derivative needs t > 0")
    out = params.m1 / np.tanh(t) + 2.0 * params.m2 / np.tanh(2.0 * t)
    if out.ndim == 0:
        return float(out)
    return out


# --- calibration context -------------------------------------------------
#
# The transform module computes per-space normalization constants; they are
# stored here so that specfun can read them without a circular import.

_calibrations = {}
_calibration_lock = threading.Lock()


def register_calibration(params, calibration):
    with _calibration_lock:
        _calibrations[params.key()] = calibration


def calibration_for(params):
    return _calibrations.get(params.key())


def ensure_calibrated(params):
    """Return the calibration for ``params``, computing it on first use."""
    cal = calibration_for(params)
    if cal is None:
        from . import transform  # deferred: transform depends on this module

        cal = transform.calibrate_normalization(params)
    return cal


def clear_calibrations():
    """Drop all cached calibration constants (mainly for tests)."""
    with _calibration_lock:
        _calibrations.clear()


def ball_volume(params, radius):
    """Measure of the ball {r <= radius}: integral of D over [0, radius]."""
    from .util import gauss_panels

    nodes, weights = gauss_panels(0.0, float(radius), 16)
    return float(np.dot(weights, density(params, nodes)))
