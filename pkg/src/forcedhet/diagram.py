"""Zero set of the circle family g on the cylinder, folds and region labels.

Zeros of g satisfy ``gamma (1 + k sin s) = F_delta(tau)``, so for every tau
the solutions are ``s = asin(u)`` and ``pi - asin(u)`` with
``u = (F_delta(tau)/gamma - 1)/k``.  Folds sit where ``u = +-1``.  The tracer
therefore builds the diagram band by band: a band is a maximal tau-interval
where ``|u| <= 1``, its ends are either folds or the edges of the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .config import DEFAULT_TOL, Tolerances
from .core import (
    PHI,
    TWO_PI,
    F_delta,
    M_F,
    MapParams,
    dF_delta,
    eval_g,
    tau_m,
    wrap_angle,
)
from .errors import DegenerateGridError, DomainError

S_UP = 0.5 * math.pi
S_DOWN = 1.5 * math.pi


class Criticality(str, Enum):
    SUPER = "supercritical"
    SUB = "subcritical"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class FoldPoint:
    tau: float
    s_star: float
    eps: int
    criticality: Criticality
    level: float
    # boundary folds only occur for k = 1, where a fold sits on tau = 1 or tau -> 0
    at_boundary: bool = False


@dataclass
class DiagramCurve:
    points: list
    closed: bool
    winding: int
    folds: list = field(default_factory=list)
    fold_points: list = field(default_factory=list)
    touches_tau0: bool = False
    touches_tau1: bool = False


@dataclass(frozen=True)
class RegionLabel:
    tag: str
    delta: float
    gamma: float
    k: float


@dataclass
class Diagram:
    params: MapParams
    curves: list
    folds: list
    region: RegionLabel

    def topology(self):
        """(curve count, fold count, sorted (closed, winding) pairs)."""
        shapes = sorted((c.closed, c.winding) for c in self.curves)
        return len(self.curves), len(self.folds), tuple(shapes)

    @property
    def consistent(self):
        row = THEOREM_ROWS.get(self.region.tag)
        return row is None or self.topology() == row


def _row(n_curves, n_folds, shapes):
    return n_curves, n_folds, tuple(sorted(shapes))


# (curve count, fold count, (closed, winding) per curve) for every open region
THEOREM_ROWS = {
    "A": _row(2, 0, [(False, 0), (False, 0)]),
    "B": _row(2, 2, [(False, 0), (False, 0)]),
    "C": _row(1, 1, [(False, 0)]),
    "W": _row(0, 0, []),
    "X": _row(1, 2, [(True, 0)]),
    "Y": _row(2, 4, [(True, 1), (True, 1)]),
    "Z": _row(1, 2, [(True, 1)]),
    "a": _row(1, 2, [(True, 0)]),
    "b": _row(2, 4, [(True, 1), (True, 1)]),
    "c": _row(1, 2, [(True, 1)]),
    "K0_NoZeros": _row(0, 0, []),
    "K0_TwoCircles": _row(2, 0, [(True, 1), (True, 1)]),
    "K0_OneCircle": _row(1, 0, [(True, 1)]),
    "Unforced": _row(1, 0, [(True, 1)]),
}


def _is_zero_k(k, tol):
    return abs(k) <= tol.boundary


def _is_unit_k(k, tol):
    return abs(k - 1.0) <= tol.boundary


def _near(x, threshold, tol):
    return abs(x - threshold) <= tol.boundary * abs(threshold)


def classify_region(delta, gamma, k, tol: Tolerances = DEFAULT_TOL) -> RegionLabel:
    if not delta > 1.0:
        raise DomainError(f"delta must exceed 1, got {delta}")
    if gamma < 0.0 or k < 0.0:
        raise DomainError("gamma and k must be non-negative")

    def label(tag):
        return RegionLabel(tag, delta, gamma, k)

    if gamma == 0.0:
        return label("Unforced")
    at_phi = abs(delta - PHI) < tol.boundary
    if _is_zero_k(k, tol):
        if at_phi:
            # F_Phi decreases from 1 to 0
            return label("K0_NoZeros" if gamma > 1.0 else "K0_OneCircle")
        if delta > PHI:
            return label("K0_OneCircle")
        m = M_F(delta)
        if _near(gamma, m, tol):
            return label("K0_OneCircle")
        return label("K0_TwoCircles" if gamma < m else "K0_NoZeros")
    if at_phi:
        return label("Boundary_DeltaPhi")
    unit = _is_unit_k(k, tol)
    if delta > PHI:
        return label("c" if unit else ("C" if k > 1.0 else "Z"))

    m = M_F(delta)
    g_plus = m / (1.0 + k)
    if unit:
        if _near(gamma, g_plus, tol):
            return label("Boundary_ab")
        return label("a" if gamma > g_plus else "b")
    if k > 1.0:
        if _near(gamma, g_plus, tol):
            return label("Boundary_AB")
        return label("A" if gamma > g_plus else "B")
    g_minus = m / (1.0 - k)
    if _near(gamma, g_minus, tol):
        return label("Boundary_WX")
    if _near(gamma, g_plus, tol):
        return label("Boundary_XY")
    if gamma > g_minus:
        return label("W")
    return label("X" if gamma > g_plus else "Y")


@dataclass(frozen=True)
class Thresholds:
    gamma_plus: float
    gamma_minus: float | None
    delta_phi: float = PHI


def transition_thresholds(delta, k) -> Thresholds:
    if not 1.0 < delta < PHI:
        raise DomainError(f"gamma thresholds need 1 < delta < golden ratio, got {delta}")
    m = M_F(delta)
    return Thresholds(m / (1.0 + k), m / (1.0 - k) if k < 1.0 else None)


def _criticality(eps, slope):
    if slope == 0.0:
        return Criticality.DEGENERATE
    sub = (eps == 1 and slope > 0.0) or (eps == -1 and slope < 0.0)
    return Criticality.SUB if sub else Criticality.SUPER


def level_roots(delta, level, tol: Tolerances = DEFAULT_TOL):
    """All tau in [tau_min, 1] with F_delta(tau) = level, ascending.

    A level touching the interior maximum returns tau_m once.
    """
    lo = tol.tau_min
    if level <= 0.0:
        return []

    def fn(t):
        return F_delta(delta, t) - level

    def solve(a, b):
        return brentq(fn, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)

    if delta < PHI:
        tm = tau_m(delta)
        if tm > lo:
            m = M_F(delta)
            if _near(level, m, tol):
                return [tm]
            if level > m:
                return []
            roots = []
            if F_delta(delta, lo) < level:
                roots.append(solve(lo, tm))
            roots.append(solve(tm, 1.0))
            return roots
    # monotonically decreasing on [lo, 1]
    if level < F_delta(delta, lo):
        return [solve(lo, 1.0)]
    return []


def find_folds(mp: MapParams, tol: Tolerances = DEFAULT_TOL):
    if not (mp.gamma > 0.0 and mp.k > 0.0):
        raise DomainError("fold search needs gamma > 0 and k > 0")
    folds = []
    unit = _is_unit_k(mp.k, tol)
    levels = [(1, S_UP, mp.gamma * (1.0 + mp.k))]
    if mp.k < 1.0 and not unit:
        levels.append((-1, S_DOWN, mp.gamma * (1.0 - mp.k)))
    for eps, s_star, level in levels:
        for t in level_roots(mp.delta, level, tol):
            slope = 0.0 if (mp.delta < PHI and t == tau_m(mp.delta)) else dF_delta(mp.delta, t)
            folds.append(FoldPoint(t, s_star, eps, _criticality(eps, slope), level))
    if unit:
        # the lower level is 0 = F(1), and also F(0+) when delta < PHI
        folds.append(FoldPoint(1.0, S_DOWN, -1, _criticality(-1, dF_delta(mp.delta, 1.0)), 0.0, True))
        if mp.delta < PHI - tol.boundary:
            folds.append(FoldPoint(tol.tau_min, S_DOWN, -1, Criticality.SUPER, 0.0, True))
    folds.sort(key=lambda f: f.tau)
    return folds


def tau_grid(n_tau, tol: Tolerances = DEFAULT_TOL):
    return np.geomspace(tol.tau_min, 1.0, n_tau)


def _u(mp, tau):
    return (F_delta(mp.delta, tau) / mp.gamma - 1.0) / mp.k


def _polish(mp, tau, s):
    """One Newton step in s, kept only if it lowers |g|."""
    jet = eval_g(mp, tau, s)
    if jet.d_ds == 0.0:
        return s
    s_new = s - jet.value / jet.d_ds
    if abs(eval_g(mp, tau, s_new).value) < abs(jet.value):
        return wrap_angle(s_new)
    return s


def _winding(points):
    total = 0.0
    for (_, s0), (_, s1) in zip(points, points[1:]):
        d = math.remainder(s1 - s0, TWO_PI)
        total += d
    return abs(int(round(total / TWO_PI)))


def _circle(tau, n_s=360):
    pts = [(tau, TWO_PI * j / n_s) for j in range(n_s)]
    pts.append(pts[0])
    return DiagramCurve(pts, True, 1, touches_tau1=(tau == 1.0))


def _band_samples(mp, a, b, open_lo, open_hi, grid, fold_taus):
    inner = grid[(grid > a) & (grid < b)]
    extra = []
    span = np.geomspace(1e-9, 1e-2, 8)
    for tf in fold_taus:
        extra.extend(tf * (1.0 + span))
        extra.extend(tf * (1.0 - span))
    taus = [t for t in np.concatenate([inner, np.asarray(extra)]) if a < t < b]
    if open_lo:
        taus.append(a)
    if open_hi:
        taus.append(b)
    taus = np.unique(np.asarray(taus, dtype=float))
    u = np.clip(_u(mp, taus), -1.0, 1.0)
    asn = np.arcsin(u)
    right = [(float(t), _polish(mp, float(t), wrap_angle(float(x)))) for t, x in zip(taus, asn)]
    left = [(float(t), _polish(mp, float(t), wrap_angle(math.pi - float(x)))) for t, x in zip(taus, asn)]
    return right, left


def trace_diagram(mp: MapParams, n_tau=4096, tol: Tolerances = DEFAULT_TOL) -> Diagram:
    if n_tau < 100:
        raise DegenerateGridError(f"n_tau must be at least 100, got {n_tau}")
    region = classify_region(mp.delta, mp.gamma, mp.k, tol)
    if mp.gamma == 0.0:
        return Diagram(mp, [_circle(1.0)], [], region)
    if _is_zero_k(mp.k, tol):
        curves = [_circle(t) for t in level_roots(mp.delta, mp.gamma, tol)]
        return Diagram(mp, curves, [], region)

    grid = tau_grid(n_tau, tol)
    folds = find_folds(mp, tol)
    interior = [f for f in folds if not f.at_boundary]
    for f0, f1 in zip(interior, interior[1:]):
        if not np.any((grid > f0.tau) & (grid < f1.tau)):
            raise DegenerateGridError(
                f"no grid point between folds at tau={f0.tau:.6g} and {f1.tau:.6g}; increase n_tau")

    lo_fold = next((f for f in folds if f.at_boundary and f.tau == tol.tau_min), None)
    hi_fold = next((f for f in folds if f.at_boundary and f.tau == 1.0), None)
    breaks = [tol.tau_min] + [f.tau for f in interior] + [1.0]
    fold_at = {f.tau: i for i, f in enumerate(folds)}

    curves = []
    for a, b in zip(breaks, breaks[1:]):
        if b <= a:
            continue
        mid = math.sqrt(a * b)
        if abs(_u(mp, mid)) > 1.0:
            continue
        fold_lo = fold_at.get(a) if (a != tol.tau_min or lo_fold) else None
        fold_hi = fold_at.get(b) if (b != 1.0 or hi_fold) else None
        fold_taus = [t for t in (a, b) if fold_at.get(t) is not None]
        right, left = _band_samples(mp, a, b, fold_lo is None, fold_hi is None, grid, fold_taus)
        touches0 = a == tol.tau_min
        touches1 = b == 1.0

        def fold_pt(i):
            f = folds[i]
            return (f.tau, f.s_star)

        if fold_lo is not None and fold_hi is not None:
            pts = [fold_pt(fold_lo)] + right + [fold_pt(fold_hi)] + left[::-1] + [fold_pt(fold_lo)]
            curve = DiagramCurve(pts, True, _winding(pts), [fold_lo, fold_hi],
                                 [0, len(right) + 1, len(pts) - 1], touches0, touches1)
            curves.append(curve)
        elif fold_hi is not None:
            pts = right + [fold_pt(fold_hi)] + left[::-1]
            curves.append(DiagramCurve(pts, False, 0, [fold_hi], [len(right)], touches0, touches1))
        elif fold_lo is not None:
            pts = right[::-1] + [fold_pt(fold_lo)] + left
            curves.append(DiagramCurve(pts, False, 0, [fold_lo], [len(right)], touches0, touches1))
        else:
            curves.append(DiagramCurve(right, False, 0, [], [], touches0, touches1))
            curves.append(DiagramCurve(left, False, 0, [], [], touches0, touches1))
    return Diagram(mp, curves, folds, region)


def count_solutions(mp: MapParams, tau, n_s=20000):
    """Number of zeros of s -> g(tau, s), counted by sign changes on a periodic grid."""
    s = np.linspace(0.0, TWO_PI, n_s, endpoint=False)
    t = float(tau)
    d2 = mp.delta * mp.delta
    vals = t ** d2 + mp.gamma * t ** (d2 - mp.delta) * (1.0 + mp.k * np.sin(s)) - t
    return int(np.count_nonzero(np.sign(vals) != np.sign(np.roll(vals, -1))))
