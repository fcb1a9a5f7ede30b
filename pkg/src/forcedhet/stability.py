"""Stability of fixed points of G_tau, Bogdanov-Takens and Hopf loci, saddle manifolds.

At a fixed point ``(tau, s)`` the upper-left Jacobian entry only depends on
tau (``d^2 - d + d tau^(d^2-1)``), and the two points of a diagram slice
differ only in the sign of ``cos s``.  That is what makes the fold-branch
classification cheap: the branch with ``cos s > 0`` has the larger
determinant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.spatial import cKDTree

from .config import DEFAULT_TOL, Tolerances
from .core import (
    PHI,
    TWO_PI,
    CylinderPoint,
    F_delta,
    M_F,
    MapParams,
    det_condition_f,
    eval_g,
    eval_G_tau,
    jacobian_G_tau,
    lambda2_at_fold,
    tau_m,
    wrap_angle,
)
from .diagram import S_DOWN, S_UP, Criticality, FoldPoint, find_folds
from .errors import (
    DomainError,
    ForcedHetError,
    InverseMapError,
    NonPositiveImageError,
    NotAFixedPointError,
    NotASaddleError,
    WindowTooLargeError,
)

log = logging.getLogger(__name__)


class Stability(str, Enum):
    ATTRACTING = "attracting"
    SADDLE = "saddle"
    REPELLING = "repelling"
    NONHYPERBOLIC = "nonhyperbolic"


@dataclass(frozen=True)
class FixedPointInfo:
    tau: float
    s: float
    eigenvalues: tuple
    cls: Stability
    det: float
    trace: float
    jacobian: np.ndarray = field(repr=False, compare=False, default=None)


def eigenvalues_2x2(trace, det):
    """Roots of x^2 - trace x + det, largest modulus first."""
    disc = trace * trace - 4.0 * det
    if disc >= 0.0:
        r = math.sqrt(disc)
        # avoid cancellation in the smaller root
        big = 0.5 * (trace + math.copysign(r, trace)) if trace != 0.0 else 0.5 * r
        small = det / big if big != 0.0 else -big
        pair = sorted((big, small), key=abs, reverse=True)
        return complex(pair[0]), complex(pair[1])
    im = 0.5 * math.sqrt(-disc)
    return complex(0.5 * trace, im), complex(0.5 * trace, -im)


def stability_class(eigs, tol: Tolerances = DEFAULT_TOL) -> Stability:
    mods = [abs(e) for e in eigs]
    inside = [m < 1.0 - tol.eigen for m in mods]
    outside = [m > 1.0 + tol.eigen for m in mods]
    if all(inside):
        return Stability.ATTRACTING
    if all(outside):
        return Stability.REPELLING
    if any(inside) and any(outside):
        return Stability.SADDLE
    return Stability.NONHYPERBOLIC


def classify_fixed_point(mp: MapParams, tau, s, tol: Tolerances = DEFAULT_TOL) -> FixedPointInfo:
    res = eval_g(mp, tau, s).value
    if not abs(res) < tol.fixed_point:
        raise NotAFixedPointError(f"g({tau}, {s}) = {res:.3e} is not a diagram point")
    J = jacobian_G_tau(mp, CylinderPoint(tau, s))
    tr = float(J[0, 0] + J[1, 1])
    det = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    eigs = eigenvalues_2x2(tr, det)
    return FixedPointInfo(float(tau), wrap_angle(s), eigs, stability_class(eigs, tol), det, tr, J)


def _signed_offset(s, s_star):
    return math.remainder(s - s_star, TWO_PI)


def branch_points(mp: MapParams, tau):
    """The (up to two) diagram points at a given tau, or [] if the slice is empty."""
    u = (F_delta(mp.delta, tau) / mp.gamma - 1.0) / mp.k
    if abs(u) > 1.0:
        return []
    a = math.asin(u)
    return [wrap_angle(a), wrap_angle(math.pi - a)]


@dataclass(frozen=True)
class BranchStability:
    branch_larger_s: Stability
    branch_smaller_s: Stability
    tau: float
    s_larger: float
    s_smaller: float


def fold_branch_stability(mp: MapParams, fold: FoldPoint, window=1e-3,
                          tol: Tolerances = DEFAULT_TOL) -> BranchStability:
    """Classify both branches born at a fold, a relative distance ``window`` away from it."""
    if fold.criticality is Criticality.DEGENERATE or fold.at_boundary:
        raise DomainError("branch stability needs an interior non-degenerate fold")
    side = 1.0 if fold.criticality is Criticality.SUPER else -1.0
    tau = fold.tau * (1.0 + side * window)
    others = [f.tau for f in find_folds(mp, tol) if f.tau != fold.tau]
    lo, hi = sorted((fold.tau, tau))
    if tau > 1.0 or tau < tol.tau_min or any(lo <= t <= hi for t in others):
        raise WindowTooLargeError(f"window {window:g} crosses another fold or leaves (0, 1]")
    pts = branch_points(mp, tau)
    if len(pts) != 2:
        raise WindowTooLargeError(f"no diagram points at tau={tau:.6g}")
    pts.sort(key=lambda s: _signed_offset(s, fold.s_star))
    smaller, larger = pts
    return BranchStability(
        classify_fixed_point(mp, tau, larger, tol).cls,
        classify_fixed_point(mp, tau, smaller, tol).cls,
        tau, larger, smaller,
    )


@dataclass(frozen=True)
class BTPoint:
    tau: float
    s_star: float
    eps: int
    gamma: float
    delta: float
    k: float
    K: float
    residual: float
    jacobian: np.ndarray = field(repr=False, compare=False, default=None)


def find_bt_points(delta, k, K=1.0, tol: Tolerances = DEFAULT_TOL):
    """Double-eigenvalue-1 points where two folds merge at the maximum of F_delta.

    Their location does not depend on K; K only enters the Jacobian that is
    returned for inspection.
    """
    if not 1.0 < delta < PHI:
        raise DomainError(f"BT points need 1 < delta < golden ratio, got {delta}")
    if not k > 0.0:
        raise DomainError(f"BT points need k > 0, got {k}")
    t = tau_m(delta)
    m = M_F(delta)
    signs = [1] + ([-1] if k < 1.0 else [])
    out = []
    for eps in signs:
        gamma = m / (1.0 + eps * k)
        s_star = S_UP if eps == 1 else S_DOWN
        mp = MapParams(delta, gamma, k, K)
        residual = abs(lambda2_at_fold(mp, t, eps) - 1.0)
        J = jacobian_G_tau(mp, CylinderPoint(t, s_star))
        if residual >= tol.eigen or J[1, 0] == 0.0:
            raise ForcedHetError(f"BT certification failed at eps={eps}: residual {residual:.3e}")
        out.append(BTPoint(t, s_star, eps, gamma, delta, k, K, residual, J))
    return out


class HopfSide(str, Enum):
    SUPER = "super"
    SUB = "sub"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class HopfPoint:
    tau: float
    s: float
    gamma: float
    delta: float
    k: float
    K: float
    eps: int
    theta: float
    det: float
    trace: float
    side: HopfSide = HopfSide.UNDETERMINED


@dataclass
class HopfLocus:
    points: list
    failures: list

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def _hopf_newton(delta, k, K, tau, s, gamma, maxit=60):
    e = delta * delta - delta
    F = F_delta(delta, tau)

    def resid(s_, g_):
        mp_ = MapParams(delta, max(g_, 0.0), k, K)
        return np.array([g_ * (1.0 + k * math.sin(s_)) - F, det_condition_f(mp_, tau, s_)])

    r = resid(s, gamma)
    for _ in range(maxit):
        if np.max(np.abs(r)) < 1e-15:
            break
        sn, cs = math.sin(s), math.cos(s)
        J = np.array([
            [gamma * k * cs, 1.0 + k * sn],
            [gamma * k * (-sn / K + e * cs), k * (cs / K + e * sn) + e],
        ])
        step = np.linalg.solve(J, -r)
        lam = 1.0
        norm0 = np.linalg.norm(r)
        while lam > 1e-6:
            s_try, g_try = s + lam * step[0], gamma + lam * step[1]
            if g_try > 0.0:
                r_try = resid(s_try, g_try)
                if np.linalg.norm(r_try) < norm0:
                    break
            lam *= 0.5
        else:
            return None
        s, gamma, r = s_try, g_try, r_try
    if np.max(np.abs(r)) > 1e-12:
        return None
    return wrap_angle(s), gamma


def solve_hopf_locus(delta, k, tau_grid, K, classify_side=False, margin=1e-9,
                     tol: Tolerances = DEFAULT_TOL) -> HopfLocus:
    """Points with g = 0 and eigenvalues exp(+-i theta) near each BT point.

    For each tau the pair (s, gamma) is solved by damped Newton, seeded at the
    fold of the BT branch at that tau.  Only points with |trace| < 2 - margin
    are kept; entries where Newton fails are collected in ``failures``.
    """
    bts = find_bt_points(delta, k, K, tol)
    points, failures = [], []
    for bt in bts:
        for tau in tau_grid:
            tau = float(tau)
            gamma0 = F_delta(delta, tau) / (1.0 + bt.eps * k)
            sol = _hopf_newton(delta, k, K, tau, bt.s_star, gamma0)
            if sol is None:
                failures.append((tau, bt.eps, "no convergence"))
                continue
            s, gamma = sol
            mp = MapParams(delta, gamma, k, K)
            info = classify_fixed_point(mp, tau, s, tol)
            if not abs(info.trace) < 2.0 - margin:
                continue
            theta = math.acos(0.5 * info.trace)
            side = hopf_side(mp, tau, s) if classify_side else HopfSide.UNDETERMINED
            points.append(HopfPoint(tau, s, gamma, delta, k, K, bt.eps, theta,
                                    info.det, info.trace, side))
    return HopfLocus(points, failures)


def inverse_G_tau(mp: MapParams, tau, target: CylinderPoint, guess: CylinderPoint,
                  tol=1e-12, maxit=50) -> CylinderPoint:
    """Preimage of ``target`` under G_tau by 2D Newton, started from ``guess``."""
    y, s = guess.y, guess.s
    for _ in range(maxit):
        try:
            img = eval_G_tau(mp, tau, CylinderPoint(y, s))
        except (NonPositiveImageError, DomainError) as exc:
            raise InverseMapError(str(exc)) from exc
        r = np.array([img.y - target.y, math.remainder(img.s - target.s, TWO_PI)])
        if abs(r[0]) <= tol * max(1.0, abs(target.y)) and abs(r[1]) <= tol:
            return CylinderPoint(y, s)
        J = jacobian_G_tau(mp, CylinderPoint(y, s))
        dy, ds = np.linalg.solve(J, -r)
        y_new = y + dy
        while y_new <= 0.0:
            dy *= 0.5
            ds *= 0.5
            y_new = y + dy
        y, s = y_new, s + ds
    raise InverseMapError(f"inverse map did not converge for target {target}")


def _orbit_annulus(step, start, center, scale, n_iter, bound=0.3):
    """Iterate ``step``; return True if the orbit settles in an annulus around ``center``."""
    p = start
    radii = []
    for i in range(n_iter):
        try:
            p = step(p)
        except ForcedHetError:
            return False
        r = math.hypot((p.y - center.y) / scale, math.remainder(p.s - center.s, TWO_PI))
        if r > bound or r < 1e-13:
            return False
        if i >= n_iter // 2:
            radii.append(r)
    return bool(radii) and min(radii) > 0.05 * max(radii)


def hopf_side(mp: MapParams, tau_h, s_h, rel_step=1e-3, n_iter=100_000) -> HopfSide:
    """Which side in tau carries the invariant circle, found by long iteration.

    The circle is looked for where the focus is unstable, with the map itself
    (attracting circle) or with its inverse (repelling circle).
    """
    for sign in (1.0, -1.0):
        tau = tau_h * (1.0 + sign * rel_step)
        if not 0.0 < tau <= 1.0:
            continue
        pts = branch_points(mp, tau)
        if not pts:
            continue
        s = min(pts, key=lambda x: abs(math.remainder(x - s_h, TWO_PI)))
        info = classify_fixed_point(mp, tau, s)
        rho = abs(info.eigenvalues[0])
        if info.eigenvalues[0].imag == 0.0 or abs(rho - 1.0) < 1e-12:
            continue
        center = CylinderPoint(tau, s)
        n = int(min(n_iter, max(2000, 40.0 / abs(rho - 1.0))))
        start = CylinderPoint(tau * (1.0 + 1e-6), s + 1e-6)
        if rho > 1.0:
            def step(p):
                return eval_G_tau(mp, tau, p)
        else:
            def step(p):
                return inverse_G_tau(mp, tau, p, p)
            n = min(n, 20_000)
        if _orbit_annulus(step, start, center, tau, n):
            return HopfSide.SUPER if sign > 0 else HopfSide.SUB
    return HopfSide.UNDETERMINED


class Branch(str, Enum):
    UNSTABLE_PLUS = "unstable+"
    UNSTABLE_MINUS = "unstable-"
    STABLE_PLUS = "stable+"
    STABLE_MINUS = "stable-"


@dataclass
class ManifoldTrace:
    saddle: FixedPointInfo
    branch: Branch
    points: list
    min_crossing_gap: float = math.inf
    crossings: int = 0
    terminated: str = ""
    direction: tuple = (0.0, 0.0)


def _eigvec(J, lam):
    a, b = J[0, 0] - lam, J[0, 1]
    c, d = J[1, 0], J[1, 1] - lam
    v = np.array([-b, a]) if abs(a) + abs(b) > abs(c) + abs(d) else np.array([-d, c])
    return v / np.linalg.norm(v)


def _local(saddle, y, s):
    return np.array([y - saddle.tau, math.remainder(s - saddle.s, TWO_PI)])


def _trace_branch(mp, tau, saddle, v, lam, forward, steps, seed_dist, n_seed, y_min):
    q = CylinderPoint(saddle.tau, saddle.s)
    ratio = abs(lam) if forward else 1.0 / abs(lam)
    seeds = [seed_dist * ratio ** (j / n_seed) for j in range(n_seed)]
    current = [CylinderPoint(q.y + d * v[0], q.s + d * v[1]) for d in seeds]
    points = [(p.y, p.s) for p in current]
    reason = ""
    for _ in range(steps):
        nxt = []
        for p in current:
            try:
                if forward:
                    img = eval_G_tau(mp, tau, p)
                else:
                    img = inverse_G_tau(mp, tau, p, p)
            except InverseMapError:
                reason = "inverse map failed"
                break
            except ForcedHetError:
                reason = "left domain"
                break
            if not y_min < img.y <= 1.0:
                reason = "left domain"
                break
            nxt.append(img)
        points.extend((p.y, p.s) for p in nxt)
        if reason:
            break
        current = nxt
    return points, reason


def _segments(points, saddle, n_seed, exclude):
    """Segments joining consecutive iterates of each seed, away from the saddle."""
    loc = np.array([_local(saddle, y, s) for y, s in points])
    if len(loc) <= n_seed:
        return np.empty((0, 2, 2))
    # points are stored seed-major per iterate, so consecutive seeds form the curve
    segs = np.stack([loc[:-1], loc[1:]], axis=1)
    r = np.hypot(segs[:, :, 0] / saddle.tau, segs[:, :, 1]).min(axis=1)
    # drop segments near the saddle and those that jump across the s wrap
    keep = (r > exclude) & (np.abs(segs[:, 1, 1] - segs[:, 0, 1]) < math.pi)
    return segs[keep]


def _cross(u, w):
    return u[..., 0] * w[..., 1] - u[..., 1] * w[..., 0]


def _cross_stats(a_segs, b_segs, scale, far_from_saddle, k_near=12):
    """(number of intersections, signed distance of a-vertices to b closest to zero).

    Only the ``k_near`` b-segments whose midpoints are nearest to each
    a-segment are examined, which is what makes long traces affordable.  The
    gap is made negative whenever an intersection is found.
    """
    if len(a_segs) == 0 or len(b_segs) == 0:
        return 0, math.inf
    sc = np.array([1.0 / scale, 1.0])
    A0, A1 = a_segs[:, 0] * sc, a_segs[:, 1] * sc
    B0, B1 = b_segs[:, 0] * sc, b_segs[:, 1] * sc
    seg = B1 - B0
    L2 = np.maximum(np.sum(seg * seg, axis=1), 1e-300)
    kk = min(k_near, len(B0))
    _, idx = cKDTree(0.5 * (B0 + B1)).query(0.5 * (A0 + A1), k=kk)
    idx = idx.reshape(len(A0), kk)
    b0, b1, sg = B0[idx], B1[idx], seg[idx]
    da = (A1 - A0)[:, None, :]
    o1 = _cross(sg, A0[:, None, :] - b0)
    o2 = _cross(sg, A1[:, None, :] - b0)
    o3 = _cross(da, b0 - A0[:, None, :])
    o4 = _cross(da, b1 - A0[:, None, :])
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    # count each (a, b) pair once even if b is a candidate for several reasons
    hits = len({(i, j) for i, j in zip(*np.nonzero(hit)) for j in [idx[i, j]]})
    t = np.clip(np.sum((A0[:, None, :] - b0) * sg, axis=2) / L2[idx], 0.0, 1.0)
    dist = np.linalg.norm(A0[:, None, :] - (b0 + t[..., None] * sg), axis=2)
    near = np.argmin(dist, axis=1)
    rows = np.arange(len(A0))
    signed = np.sign(o1[rows, near]) * dist[rows, near]
    far = np.hypot(A0[:, 0], A0[:, 1]) > far_from_saddle
    if not np.any(far):
        return hits, (-math.inf if hits else math.inf)
    signed = signed[far]
    gap = float(signed[np.argmin(np.abs(signed))])
    if hits:
        gap = -abs(gap)
    return hits, gap


def trace_invariant_manifolds(mp: MapParams, tau, saddle: FixedPointInfo, steps=30,
                              seed_dist=1e-6, n_seed=40, y_min=1e-9, exclude=1e-3):
    """Stable and unstable manifold branches of a saddle of G_tau, as polylines."""
    if saddle.cls is not Stability.SADDLE:
        raise NotASaddleError(f"fixed point at ({saddle.tau}, {saddle.s}) is {saddle.cls.value}")
    J = saddle.jacobian
    if J is None:
        J = jacobian_G_tau(mp, CylinderPoint(saddle.tau, saddle.s))
    lam_u, lam_s = sorted((e.real for e in saddle.eigenvalues), key=abs, reverse=True)
    vu, vs = _eigvec(J, lam_u), _eigvec(J, lam_s)
    traces = []
    for branch, v, lam, fwd in (
        (Branch.UNSTABLE_PLUS, vu, lam_u, True),
        (Branch.UNSTABLE_MINUS, -vu, lam_u, True),
        (Branch.STABLE_PLUS, vs, lam_s, False),
        (Branch.STABLE_MINUS, -vs, lam_s, False),
    ):
        pts, reason = _trace_branch(mp, tau, saddle, v, lam, fwd, steps, seed_dist, n_seed, y_min)
        traces.append(ManifoldTrace(saddle, branch, pts, terminated=reason, direction=tuple(v)))

    scale = saddle.tau
    segs = {t.branch: _segments(t.points, saddle, n_seed, exclude) for t in traces}
    for t in traces:
        unstable = t.branch in (Branch.UNSTABLE_PLUS, Branch.UNSTABLE_MINUS)
        others = [o for o in traces if (o.branch in (Branch.UNSTABLE_PLUS, Branch.UNSTABLE_MINUS)) != unstable]
        other = np.concatenate([segs[o.branch] for o in others]) if others else np.empty((0, 2, 2))
        t.crossings, t.min_crossing_gap = _cross_stats(segs[t.branch], other, scale, 10.0 * exclude)
    return traces
