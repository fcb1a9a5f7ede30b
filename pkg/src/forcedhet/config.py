"""Numerical tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    root: float = 1e-12
    eigen: float = 1e-10
    fd_step: float = 1e-6
    boundary: float = 1e-9
    tau_min: float = 1e-12
    fixed_point: float = 1e-8
    residual: float = 1e-10


DEFAULT_TOL = Tolerances()
