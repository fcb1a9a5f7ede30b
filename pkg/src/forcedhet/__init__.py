"""Bifurcation toolkit for the reduced cylinder map of a periodically forced heteroclinic cycle."""

from .core import CylinderPoint, MapParams, ModelParams, PHI
from .diagram import classify_region, find_folds, trace_diagram
from .locking import lock_windows, tau_to_omega
from .stability import classify_fixed_point, find_bt_points, solve_hopf_locus

__all__ = [
    "CylinderPoint", "MapParams", "ModelParams", "PHI",
    "classify_region", "find_folds", "trace_diagram",
    "lock_windows", "tau_to_omega",
    "classify_fixed_point", "find_bt_points", "solve_hopf_locus",
]
