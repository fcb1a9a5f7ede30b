"""Direct integration of the forced ODE on the sphere and stroboscopic-map shooting.

The forcing ``gamma (1 - x) sin(2 omega t)`` has period pi/omega, so the
stroboscopic map flows exactly that long (or n times that long) from t0 = 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .core import ModelParams
from .errors import DomainError, IntegrationError, NoConvergenceError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class State3:
    x: float
    y: float
    z: float
    t: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z, self.t)):
            raise DomainError(f"state has non-finite components: {self}")

    @classmethod
    def from_array(cls, arr, t=0.0):
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(t))

    def array(self):
        return np.array([self.x, self.y, self.z])

    @property
    def radius(self):
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


def _rhs(mp: ModelParams):
    a, b, g, w2 = mp.alpha, mp.beta, mp.gamma, 2.0 * mp.omega

    def f(t, u):
        x, y, z = u
        xx, yy, zz = x * x, y * y, z * z
        c = 1.0 - xx - yy - zz
        return np.array([
            x * c - a * x * z + b * x * zz + g * (1.0 - x) * math.sin(w2 * t),
            y * c + a * y * z + b * y * zz,
            z * c - a * (yy - xx) - b * z * (xx + yy),
        ])

    return f


def vector_field(mp: ModelParams, st: State3) -> np.ndarray:
    return np.array(_rhs(mp)(st.t, st.array()))


def jacobian_fd(mp: ModelParams, st: State3, h=1e-6) -> np.ndarray:
    """Central-difference Jacobian of the vector field in (x, y, z)."""
    f = _rhs(mp)
    u = st.array()
    J = np.empty((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        J[:, j] = (np.array(f(st.t, u + e)) - np.array(f(st.t, u - e))) / (2.0 * h)
    return J


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # shape (len(t), 3)

    def final(self) -> State3:
        return State3.from_array(self.states[-1], self.t[-1])


def _check_tol(tol):
    if not 1e-12 <= tol <= 1e-6:
        raise DomainError(f"tol must lie in [1e-12, 1e-6], got {tol}")


def integrate(mp: ModelParams, st0: State3, t_end, tol=1e-10, t_eval=None) -> Trajectory:
    """DOP853 from st0.t to t_end; samples at ``t_eval`` (default: just the endpoints)."""
    _check_tol(tol)
    if not t_end >= st0.t:
        raise DomainError(f"t_end {t_end} precedes start time {st0.t}")
    if t_eval is None:
        t_eval = np.array([st0.t, t_end])
    if t_end == st0.t:
        return Trajectory(np.array([st0.t]), st0.array()[None, :])
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(_rhs(mp), (st0.t, t_end), st0.array(), method="DOP853",
                        rtol=tol, atol=tol, t_eval=t_eval)
    if sol.status < 0:
        ts = np.asarray(sol.t)
        t_fail = float(ts[-1]) if ts.size else st0.t
        raise IntegrationError(sol.message, t=t_fail)
    states = sol.y.T
    if not np.all(np.isfinite(states)):
        raise IntegrationError("non-finite state", t=float(sol.t[-1]))
    return Trajectory(sol.t, states)


def stroboscopic_map(mp: ModelParams, st0: State3, n=1, tol=1e-10) -> State3:
    """Flow st0 forward n forcing periods n*pi/omega."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    return integrate(mp, st0, st0.t + n * mp.forcing_period, tol).final()


@dataclass
class StroboOrbit:
    samples: list
    n: int
    multipliers: tuple
    spectrum: np.ndarray
    residual: float
    iterations: int

    @property
    def attracting(self):
        return bool(np.all(np.abs(self.spectrum) < 1.0))


def _strobo_residual(mp, u, n, tol):
    img = stroboscopic_map(mp, State3.from_array(u), n, tol).array()
    return img - u


def _monodromy(mp, u, n, tol, h):
    J = np.empty((3, 3))
    base = stroboscopic_map(mp, State3.from_array(u), n, tol).array()
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        J[:, j] = (stroboscopic_map(mp, State3.from_array(u + e), n, tol).array() - base) / h
    return J, base


def find_locked_orbit(mp: ModelParams, seed: State3, n=1, tol=1e-11, fd_step=1e-7,
                      residual_tol=1e-8, max_iter=30) -> StroboOrbit:
    """Newton on X -> Phi_{n pi/omega}(X) - X, from t0 = 0.

    Raises NoConvergenceError after ``max_iter`` steps or once an iterate
    leaves the shell |r - 1| < 0.5 around the sphere.
    """
    u = seed.array()
    for it in range(max_iter + 1):
        if abs(np.linalg.norm(u) - 1.0) >= 0.5:
            raise NoConvergenceError(f"Newton iterate left the shell around the sphere: {u}")
        J, img = _monodromy(mp, u, n, tol, fd_step)
        r = img - u
        res = float(np.linalg.norm(r))
        if res < residual_tol:
            spectrum = np.linalg.eigvals(J)
            order = np.argsort(-np.abs(spectrum))
            spectrum = spectrum[order]
            # drop the multiplier closest to the radial direction for the 2D view
            radial = _radial_multiplier(J, u)
            pair = tuple(complex(m) for m in _remove_closest(spectrum, radial))
            samples = [State3.from_array(u, 0.0)]
            st = samples[0]
            for j in range(n):
                st = stroboscopic_map(mp, st, 1, tol)
                samples.append(st)
            return StroboOrbit(samples, n, pair, spectrum, res, it)
        if it == max_iter:
            break
        step = np.linalg.solve(J - np.eye(3), -r)
        u = u + step
    raise NoConvergenceError(f"no convergence after {max_iter} Newton steps (residual {res:.3e})")


def _radial_multiplier(J, u):
    e = u / np.linalg.norm(u)
    return float(e @ J @ e)


def _remove_closest(spectrum, value):
    i = int(np.argmin(np.abs(spectrum - value)))
    return [m for j, m in enumerate(spectrum) if j != i]


def default_seed(eps=0.05):
    return State3(eps, eps, math.sqrt(1.0 - 2.0 * eps * eps), 0.0)


def relax(mp: ModelParams, st: State3, periods=40, tol=1e-10) -> State3:
    """Iterate the stroboscopic map to let a seed settle onto an attractor."""
    out = integrate(mp, State3(st.x, st.y, st.z, 0.0), periods * mp.forcing_period, tol)
    return State3.from_array(out.states[-1], 0.0)


def scan_locked_orbits(alpha, beta, gamma, omegas, n=1, periods=40, seed=None, tol=1e-11):
    """For each omega: relax from the seed, then shoot.  Returns (omega, orbit or error)."""
    seed = seed or default_seed()
    out = []
    for w in omegas:
        mp = ModelParams(alpha, beta, gamma, float(w))
        try:
            start = relax(mp, seed, periods * n, min(tol * 10, 1e-6))
            orb = find_locked_orbit(mp, start, n, tol)
            out.append((float(w), orb))
        except (NoConvergenceError, IntegrationError) as exc:
            log.debug("omega=%g: %s", w, exc)
            out.append((float(w), exc))
    return out
