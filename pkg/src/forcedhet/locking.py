"""Frequency locking: from tau-extents of the diagram to forcing-frequency windows.

A fixed point of G_tau is a periodic solution of period -ln(tau)/K, so a 1:n
locked solution needs ``omega = -n K pi / ln(tau)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .core import PHI, F_delta, MapParams
from .diagram import Criticality, classify_region, find_folds, transition_thresholds
from .errors import DomainError, WindowTooLargeError
from .stability import Stability, find_bt_points, fold_branch_stability, solve_hopf_locus


class WindowSource(str, Enum):
    FOLD_INTERVAL = "fold_interval"
    FULL_AXIS = "full_axis"


class StabilityNote(str, Enum):
    ONE_ATTRACTING_NEAR_FOLD = "one_attracting_near_fold"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class OmegaWindow:
    n: int
    omega_lo: float
    omega_hi: float
    source: WindowSource
    stability_note: StabilityNote
    tau_lo: float = field(default=0.0, compare=False)
    tau_hi: float = field(default=1.0, compare=False)


def _omega_unit(K, tau):
    return -K * math.pi / math.log(tau)


def tau_to_omega(K, tau, n=1):
    if not K > 0.0:
        raise DomainError(f"K must be positive, got {K}")
    if not 0.0 < tau < 1.0:
        raise DomainError(f"tau must lie in (0, 1), got {tau}")
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    return n * _omega_unit(K, tau)


def omega_to_tau(K, omega, n=1):
    return math.exp(-n * K * math.pi / omega)


def _exists(mp, tau):
    u = (F_delta(mp.delta, tau) / mp.gamma - 1.0) / mp.k
    return abs(u) <= 1.0


def existence_intervals(mp: MapParams, tol: Tolerances = DEFAULT_TOL):
    """Maximal tau-intervals carrying diagram points, bounded by folds, 0 or 1.

    The lower end is reported as 0 when the interval reaches down to tau_min.
    """
    if mp.gamma == 0.0 or mp.k == 0.0:
        # isolated levels only: no interval of tau carries solutions
        return []
    folds = find_folds(mp, tol)
    cuts = sorted({f.tau for f in folds if not f.at_boundary})
    edges = [tol.tau_min] + cuts + [1.0]
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        if not b > a:
            continue
        if _exists(mp, math.sqrt(a * b)):
            if out and out[-1][1] == a:
                out[-1] = (out[-1][0], b)
            else:
                out.append((a, b))
    return [(0.0 if a == tol.tau_min else a, b) for a, b in out]


def _note(mp, interval, folds, tol):
    """one_attracting_near_fold when a bounding fold has an attracting branch."""
    for f in folds:
        if f.at_boundary or f.criticality is Criticality.DEGENERATE:
            continue
        if f.tau not in interval:
            continue
        try:
            br = fold_branch_stability(mp, f, 1e-3, tol)
        except WindowTooLargeError:
            continue
        if Stability.ATTRACTING in (br.branch_larger_s, br.branch_smaller_s):
            return StabilityNote.ONE_ATTRACTING_NEAR_FOLD
    return StabilityNote.UNKNOWN


def lock_windows(mp: MapParams, n_max=1, tol: Tolerances = DEFAULT_TOL):
    """Forcing-frequency windows with 1:n locked solutions, n = 1..n_max."""
    intervals = existence_intervals(mp, tol)
    folds = find_folds(mp, tol) if intervals else []
    base = []
    for a, b in intervals:
        lo = 0.0 if a == 0.0 else _omega_unit(mp.K, a)
        hi = math.inf if b == 1.0 else _omega_unit(mp.K, b)
        src = WindowSource.FULL_AXIS if (a == 0.0 and b == 1.0) else WindowSource.FOLD_INTERVAL
        base.append((lo, hi, src, _note(mp, (a, b), folds, tol), a, b))
    out = []
    for n in range(1, n_max + 1):
        for lo, hi, src, note, a, b in base:
            out.append(OmegaWindow(n, n * lo, n * hi, src, note, a, b))
    return out


@dataclass
class TorusCandidate:
    region: str
    gamma_lo: float
    gamma_hi: float
    anchor_gamma: float
    fold_eps: int
    computed_hopf_gammas: list
    computed_regions: list


@dataclass
class TorusChaosReport:
    delta: float
    k: float
    gamma_plus: float
    gamma_minus: float | None
    bt_points: list
    candidates: list

    def lines(self):
        gm = "none" if self.gamma_minus is None else f"{self.gamma_minus:.10g}"
        out = [
            f"delta = {self.delta:.10g}, k = {self.k:.10g}",
            f"gamma_plus = {self.gamma_plus:.10g}, gamma_minus = {gm}",
        ]
        for bt in self.bt_points:
            out.append(f"BT point eps={bt.eps:+d}: tau = {bt.tau:.10g}, gamma = {bt.gamma:.10g}")
        for c in self.candidates:
            regions = ",".join(sorted(set(c.computed_regions))) or "none"
            out.append(
                f"torus candidate in region {c.region}: gamma in ({c.gamma_lo:.10g}, {c.gamma_hi:.10g}) "
                f"near {c.anchor_gamma:.10g} (fold sin s* = {c.fold_eps:+d}); "
                f"{len(c.computed_hopf_gammas)} Hopf points found, in regions {regions}"
            )
        out.append("tangency strip (suspended horseshoe): thin wedge next to each Hopf curve, "
                   "bounded by two homoclinic tangencies; probe it with the manifold tracer")
        return out

    def __str__(self):
        return "\n".join(self.lines())


def torus_and_chaos_report(delta, k, K=1.0, n_tau=12, tol: Tolerances = DEFAULT_TOL):
    """Where invariant tori and horseshoes are predicted near the BT points.

    Besides the predicted gamma ranges, a short Hopf locus on the sub-tau_m
    side of each BT point is solved and the region of every point recorded.
    """
    if not 1.0 < delta < PHI:
        raise DomainError(f"torus report needs 1 < delta < golden ratio, got {delta}")
    if not k > 0.0 or abs(k - 1.0) <= tol.boundary:
        raise DomainError(f"torus report needs k > 0 and k != 1, got {k}")
    th = transition_thresholds(delta, k)
    bts = find_bt_points(delta, k, K, tol)
    t_m = bts[0].tau
    grid = t_m * (1.0 - np.geomspace(1e-3, 0.5, n_tau))
    locus = solve_hopf_locus(delta, k, grid, K, tol=tol)

    def hopf(eps, region):
        pts = [(p.gamma, classify_region(delta, p.gamma, k, tol).tag) for p in locus if p.eps == eps]
        pts = [(g, r) for g, r in pts if r == region]
        return [g for g, _ in pts], [r for _, r in pts]

    cands = []
    if k > 1.0:
        cands.append(TorusCandidate("B", 0.0, th.gamma_plus, th.gamma_plus, 1, *hopf(1, "B")))
    else:
        cands.append(TorusCandidate("Y", 0.0, th.gamma_plus, th.gamma_plus, -1, *hopf(1, "Y")))
        cands.append(TorusCandidate("X", th.gamma_plus, th.gamma_minus, th.gamma_plus, 1, *hopf(1, "X")))
        cands.append(TorusCandidate("X", th.gamma_plus, th.gamma_minus, th.gamma_minus, 1, *hopf(-1, "X")))
    return TorusChaosReport(delta, k, th.gamma_plus, th.gamma_minus, bts, cands)


def predicted_window_count(tag):
    """Number of 1:1 windows each open region should produce."""
    return {"A": 1, "B": 2, "C": 1, "W": 0, "X": 1, "Y": 2, "Z": 1,
            "a": 1, "b": 2, "c": 1}.get(tag)
