"""Scalar building blocks of the reduced return map.

The forced cycle is reduced to a map ``G`` on the half-cylinder
``{(y, s): y > 0, s mod 2pi}``::

    G(y, s) = (y**(d*d) + gamma * y**(d*d - d) * (1 + k*sin s),  s - ln(y)/K)

and its fixed points after a phase shift ``ln(tau)/K`` are the zeros of the
circle family ``g(tau, s)``.  Everything here is a pure function of its
arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL
from .errors import DomainError, NonPositiveImageError

TWO_PI = 2.0 * math.pi
PHI = (1.0 + math.sqrt(5.0)) / 2.0


def wrap_angle(s):
    """Reduce an angle to [0, 2pi)."""
    r = math.fmod(s, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    # fmod of a tiny negative can round up to exactly 2pi
    return 0.0 if r >= TWO_PI else r


def circular_distance(a, b):
    d = abs(wrap_angle(a) - wrap_angle(b))
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class MapParams:
    """Parameters of the reduced map: saddle value, forcing amplitude and shape, K."""

    delta: float
    gamma: float
    k: float
    K: float

    def __post_init__(self):
        if not self.delta > 1.0:
            raise DomainError(f"delta must exceed 1, got {self.delta}")
        if not self.K > 0.0:
            raise DomainError(f"K must be positive, got {self.K}")
        if not self.gamma >= 0.0:
            raise DomainError(f"gamma must be non-negative, got {self.gamma}")
        if not self.k >= 0.0:
            raise DomainError(f"k must be non-negative, got {self.k}")

    def with_gamma(self, gamma):
        return MapParams(self.delta, gamma, self.k, self.K)


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the forced ODE.

    ``delta`` and ``K`` are derived; ``k`` of the reduced map is *not*, it has
    to be supplied separately when building :class:`MapParams`.
    """

    alpha: float
    beta: float
    gamma: float = 0.0
    omega: float = 1.0
    constraints: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a, b = self.alpha, self.beta
        checks = {
            "beta<0<alpha": b < 0.0 < a,
            "|beta|<alpha": abs(b) < a,
            "(alpha-beta)^2<4alpha": (a - b) ** 2 < 4.0 * a,
            "beta!=alpha-2": b != a - 2.0,
            "gamma>=0": self.gamma >= 0.0,
            "omega>0": self.omega > 0.0,
        }
        object.__setattr__(self, "constraints", checks)
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            raise DomainError("ModelParams violates: " + ", ".join(failed))

    @property
    def delta(self):
        return (self.alpha - self.beta) / (self.alpha + self.beta)

    @property
    def K(self):
        return (self.alpha + self.beta) ** 2 / (2.0 * self.alpha)

    @property
    def forcing_period(self):
        return math.pi / self.omega

    def map_params(self, k, gamma=None):
        return MapParams(self.delta, self.gamma if gamma is None else gamma, k, self.K)


@dataclass(frozen=True)
class CylinderPoint:
    y: float
    s: float

    def __post_init__(self):
        if not self.y > 0.0:
            raise DomainError(f"cylinder point needs y > 0, got {self.y}")
        object.__setattr__(self, "s", wrap_angle(self.s))


@dataclass(frozen=True)
class Jet2:
    """Value of g and its two first partials."""

    value: float
    d_ds: float
    d_dtau: float


def _check_tau(tau, tol=DEFAULT_TOL):
    t = np.asarray(tau, dtype=float)
    if np.any(~(t >= tol.tau_min)) or np.any(t > 1.0):
        raise DomainError(f"tau must lie in [{tol.tau_min:g}, 1], got {tau}")
    return t


def _pow(t, q):
    # exp(q ln t): well behaved for negative q and t near 0
    return np.exp(q * np.log(t))


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def p_delta(delta):
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta}")
    return -delta * delta + delta + 1.0


def F_delta(delta, tau):
    """tau**p(delta) - tau**delta on (0, 1]; accepts arrays."""
    t = _check_tau(tau)
    p = p_delta(delta)
    return _out(_pow(t, p) - _pow(t, delta))


def dF_delta(delta, tau):
    t = _check_tau(tau)
    p = p_delta(delta)
    return _out(p * _pow(t, p - 1.0) - delta * _pow(t, delta - 1.0))


def _require_weak(delta):
    if not 1.0 < delta < PHI:
        raise DomainError(f"need 1 < delta < golden ratio, got {delta}")


def tau_m(delta):
    """Location of the interior maximum of F_delta (only for delta < PHI)."""
    _require_weak(delta)
    return (p_delta(delta) / delta) ** (1.0 / (delta * delta - 1.0))


def M_F(delta):
    _require_weak(delta)
    p = p_delta(delta)
    r = p / delta
    e = delta * delta - 1.0
    return r ** (p / e) - r ** (delta / e)


def h_delta(delta, y):
    if not delta > 1.0:
        raise DomainError(f"delta must exceed 1, got {delta}")
    t = _check_tau(y)
    p = p_delta(delta)
    # (t^p - d^2 t^d) / (d^2 - d), split so nothing cancels as delta -> 1
    td = _pow(t, delta)
    return _out((_pow(t, p) - td) / (delta * delta - delta) - (1.0 + delta) / delta * td)


def h_delta_zero(delta):
    """The unique zero of h_delta in (0, 1)."""
    return delta ** (2.0 / (1.0 - delta * delta))


def eval_g(mp: MapParams, tau, s):
    t = float(_check_tau(tau))
    d2 = mp.delta * mp.delta
    e = d2 - mp.delta
    sn, cs = math.sin(s), math.cos(s)
    forcing = 1.0 + mp.k * sn
    t_d2 = math.exp(d2 * math.log(t))
    t_e = math.exp(e * math.log(t))
    value = t_d2 + mp.gamma * t_e * forcing - t
    d_ds = mp.gamma * mp.k * t_e * cs
    d_dtau = d2 * t_d2 / t + mp.gamma * e * t_e / t * forcing - 1.0
    return Jet2(value, d_ds, d_dtau)


def eval_G(mp: MapParams, pt: CylinderPoint) -> CylinderPoint:
    y, s = pt.y, pt.s
    d2 = mp.delta * mp.delta
    ly = math.log(y)
    y_new = math.exp(d2 * ly) + mp.gamma * math.exp((d2 - mp.delta) * ly) * (1.0 + mp.k * math.sin(s))
    if not y_new > 0.0:
        raise NonPositiveImageError(f"image y={y_new!r} of ({y}, {s}) is not positive")
    return CylinderPoint(y_new, s - ly / mp.K)


def eval_G_tau(mp: MapParams, tau, pt: CylinderPoint) -> CylinderPoint:
    if not 0.0 < tau <= 1.0:
        raise DomainError(f"tau must lie in (0, 1], got {tau}")
    img = eval_G(mp, pt)
    return CylinderPoint(img.y, img.s + math.log(tau) / mp.K)


def jacobian_G_tau(mp: MapParams, pt: CylinderPoint) -> np.ndarray:
    """Derivative of G (the tau shift is constant, so also of G_tau)."""
    y, s = pt.y, pt.s
    d = mp.delta
    d2 = d * d
    ly = math.log(y)
    p = p_delta(d)
    a11 = d2 * math.exp((d2 - 1.0) * ly) + mp.gamma * (d2 - d) * math.exp(-p * ly) * (1.0 + mp.k * math.sin(s))
    a12 = mp.gamma * mp.k * math.exp((d2 - d) * ly) * math.cos(s)
    return np.array([[a11, a12], [-1.0 / (mp.K * y), 1.0]])


def lambda2_at_fold(mp: MapParams, y_star, eps):
    """Non-unit eigenvalue of the (triangular) Jacobian at a fold, sin s* = eps."""
    if eps not in (1, -1):
        raise DomainError(f"eps must be +1 or -1, got {eps}")
    y = float(_check_tau(y_star))
    d = mp.delta
    d2 = d * d
    p = p_delta(d)
    return d2 * y ** (d2 - 1.0) + mp.gamma * (d2 - d) * y ** (-p) * (1.0 + eps * mp.k)


def det_condition_f(mp: MapParams, tau, s):
    """Zero exactly when det D G_tau(tau, s) = 1."""
    t = float(_check_tau(tau))
    d = mp.delta
    e = d * d - d
    p = p_delta(d)
    return (mp.gamma * mp.k * (math.cos(s) / mp.K + e * math.sin(s))
            - t ** p + d * d * t ** d + mp.gamma * e)


def df_dgamma(mp: MapParams, tau, s):
    """Partial of det_condition_f in gamma with s held fixed."""
    _check_tau(tau)
    e = mp.delta * mp.delta - mp.delta
    return mp.k * (math.cos(s) / mp.K + e * math.sin(s)) + e


def hopf_trace(mp: MapParams, tau, s):
    """Trace of D G_tau on the det = 1 set: 2 - (gamma k / K) tau**-p cos s."""
    t = float(_check_tau(tau))
    p = p_delta(mp.delta)
    return 2.0 - mp.gamma * mp.k / mp.K * t ** (-p) * math.cos(s)
