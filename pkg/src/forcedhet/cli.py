"""Command-line front end.

    forcedhet trace --delta 2 --gamma 0.5 --k 0.5 --out d.csv --svg d.svg
    forcedhet lock --alpha 2 --beta -0.5 --gamma 0.5 --k 0.5 --n-max 3
    forcedhet sweep --k 0.5 --out atlas.csv --svg atlas.svg

Parameters may also come from a file of ``key = value`` lines (``#`` starts a
comment) passed with ``--config``; flags win over the file.  Relative output
paths are resolved against ``$FORCEDHET_OUT_DIR`` when it is set.

Exit status: 0 success, 1 result produced but degraded, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import export
from .core import PHI, MapParams, ModelParams, tau_m
from .diagram import classify_region, find_folds, trace_diagram, transition_thresholds
from .errors import DomainError, ForcedHetError, NoConvergenceError
from .locking import lock_windows, torus_and_chaos_report
from .odesim import State3, default_seed, find_locked_orbit, integrate, relax
from .render import atlas_svg, render_svg, write_svg
from .stability import (
    Stability,
    branch_points,
    classify_fixed_point,
    find_bt_points,
    fold_branch_stability,
    solve_hopf_locus,
    trace_invariant_manifolds,
)

log = logging.getLogger("forcedhet")

OUT_DIR_ENV = "FORCEDHET_OUT_DIR"

COMMANDS = ("classify", "trace", "folds", "stability", "hopf", "bt", "manifolds",
            "lock", "report", "simulate", "locked-orbit", "sweep")

# key -> (type, help)
KEYS = {
    "delta": (float, "saddle value delta > 1"),
    "gamma": (float, "forcing amplitude"),
    "k": (float, "forcing shape constant of the reduced map"),
    "K": (float, "return-time constant K (default 1, or derived from alpha/beta)"),
    "alpha": (float, "ODE parameter alpha"),
    "beta": (float, "ODE parameter beta"),
    "omega": (float, "forcing frequency"),
    "tau": (str, "comma-separated tau values"),
    "tau_grid": (str, "tau grid: comma list or lo:hi:count"),
    "n_tau": (int, "tau grid size for tracing"),
    "n_max": (int, "largest frequency ratio 1:n"),
    "window": (float, "relative tau offset from a fold"),
    "steps": (int, "manifold iteration count"),
    "hopf_side": (int, "1 to estimate Hopf side by long iteration"),
    "t_end": (float, "integration end time"),
    "tol": (float, "integrator tolerance"),
    "n_samples": (int, "trajectory samples"),
    "n": (int, "frequency ratio for the stroboscopic map"),
    "x0": (float, "initial x"),
    "y0": (float, "initial y"),
    "z0": (float, "initial z"),
    "relax_periods": (int, "forcing periods to relax before Newton"),
    "delta_min": (float, "sweep lower delta"),
    "delta_max": (float, "sweep upper delta"),
    "gamma_min": (float, "sweep lower gamma"),
    "gamma_max": (float, "sweep upper gamma"),
    "n_delta": (int, "sweep delta cells"),
    "n_gamma": (int, "sweep gamma cells"),
    "out": (str, "CSV output path (default stdout)"),
    "svg": (str, "SVG output path"),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.params.get(key, default)

    def need(self, *keys):
        missing = [k for k in keys if k not in self.params]
        if missing:
            raise UsageError(f"{self.command}: missing required parameter(s): {', '.join(missing)}")
        return [self.params[k] for k in keys]


def parse_config_text(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KEYS:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        typ = KEYS[key][0]
        try:
            values[key] = typ(val)
        except ValueError:
            raise UsageError(f"config line {lineno}: bad value {val!r} for {key}") from None
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="forcedhet", description="Bifurcation toolkit for a periodically forced heteroclinic cycle.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="file of 'key = value' lines")
    p.add_argument("-v", "--verbose", action="store_true")
    for key, (typ, hlp) in KEYS.items():
        p.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=None, help=hlp)
    return p


def parse_config(argv, config_text=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    params = parse_config_text(config_text) if config_text else {}
    for key in KEYS:
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    cfg = RunConfig(args.command, params)
    _validate(cfg)
    return cfg


def _validate(cfg):
    p = cfg.params
    from_ode = "alpha" in p or "beta" in p
    if from_ode and "delta" in p:
        raise UsageError("give delta either directly or through alpha/beta, not both")
    if from_ode and "K" in p:
        raise UsageError("give K either directly or through alpha/beta, not both")
    if from_ode:
        if not ("alpha" in p and "beta" in p):
            raise UsageError("alpha and beta must be given together")
        try:
            mp = ModelParams(p["alpha"], p["beta"], p.get("gamma", 0.0) or 0.0, p.get("omega", 1.0))
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        if cfg.command not in ("simulate", "locked-orbit"):
            p["delta"] = mp.delta
            p["K"] = mp.K
    if "delta" in p and not p["delta"] > 1.0:
        raise UsageError(f"delta must exceed 1, got {p['delta']}")
    for key in ("gamma", "k"):
        if key in p and p[key] < 0.0:
            raise UsageError(f"{key} must be non-negative, got {p[key]}")
    for key in ("K", "omega"):
        if key in p and not p[key] > 0.0:
            raise UsageError(f"{key} must be positive, got {p[key]}")
    for key in ("n_tau", "n_max", "steps", "n", "n_samples", "n_delta", "n_gamma"):
        if key in p and p[key] < 1:
            raise UsageError(f"{key} must be a positive integer, got {p[key]}")
    if "tol" in p and not 1e-12 <= p["tol"] <= 1e-6:
        raise UsageError(f"tol must lie in [1e-12, 1e-6], got {p['tol']}")


def _floats(text, key):
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            return list(np.linspace(float(lo), float(hi), int(n)))
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse {key} = {text!r}") from None


def _resolve(path):
    path = Path(path)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _emit(cfg, header, rows, stream):
    if cfg.get("out"):
        export.write_csv(_resolve(cfg.get("out")), header, rows)
    else:
        stream.write(export.csv_text(header, rows))


def _map_params(cfg):
    delta, gamma, k = cfg.need("delta", "gamma", "k")
    return MapParams(delta, gamma, k, cfg.get("K", 1.0))


def cmd_classify(cfg, out):
    delta, gamma, k = cfg.need("delta", "gamma", "k")
    out.write(classify_region(delta, gamma, k).tag + "\n")
    return 0


def cmd_trace(cfg, out):
    mp = _map_params(cfg)
    d = trace_diagram(mp, cfg.get("n_tau", 4096))
    _emit(cfg, export.DIAGRAM_HEADER, export.diagram_rows(d), out)
    if cfg.get("svg"):
        render_svg(d, _resolve(cfg.get("svg")))
    return 0 if d.consistent else 1


def cmd_folds(cfg, out):
    mp = _map_params(cfg)
    _emit(cfg, export.FOLD_HEADER, export.fold_rows(find_folds(mp)), out)
    return 0


def cmd_stability(cfg, out):
    mp = _map_params(cfg)
    infos = []
    status = 0
    if cfg.get("tau"):
        taus = _floats(cfg.get("tau"), "tau")
    else:
        taus = []
        for f in find_folds(mp):
            if f.at_boundary:
                continue
            try:
                br = fold_branch_stability(mp, f, cfg.get("window", 1e-3))
            except ForcedHetError as exc:
                log.warning("fold at tau=%.6g: %s", f.tau, exc)
                status = 1
                continue
            log.info("fold tau=%.10g eps=%+d %s: larger s %s, smaller s %s", f.tau, f.eps,
                     f.criticality.value, br.branch_larger_s.value, br.branch_smaller_s.value)
            taus.append(br.tau)
    for tau in taus:
        for s in branch_points(mp, tau):
            infos.append(classify_fixed_point(mp, tau, s))
    _emit(cfg, export.STABILITY_HEADER, export.stability_rows(infos), out)
    return status


def _tau_grid(cfg, delta):
    if cfg.get("tau_grid"):
        return _floats(cfg.get("tau_grid"), "tau_grid")
    t = tau_m(delta)
    return list(t * (1.0 - np.geomspace(1e-3, 0.5, 20)))


def cmd_hopf(cfg, out):
    delta, k = cfg.need("delta", "k")
    if not delta < PHI:
        raise UsageError("hopf needs delta below the golden ratio")
    locus = solve_hopf_locus(delta, k, _tau_grid(cfg, delta), cfg.get("K", 1.0),
                             classify_side=bool(cfg.get("hopf_side", 0)))
    _emit(cfg, export.HOPF_HEADER, export.hopf_rows(locus.points), out)
    for tau, eps, why in locus.failures:
        log.warning("Hopf tau=%.10g eps=%+d: %s", tau, eps, why)
    return 1 if locus.failures else 0


def cmd_bt(cfg, out):
    delta, k = cfg.need("delta", "k")
    _emit(cfg, export.BT_HEADER, export.bt_rows(find_bt_points(delta, k, cfg.get("K", 1.0))), out)
    return 0


def cmd_manifolds(cfg, out):
    mp = _map_params(cfg)
    (tau_text,) = cfg.need("tau")
    tau = _floats(str(tau_text), "tau")[0]
    saddles = [i for i in (classify_fixed_point(mp, tau, s) for s in branch_points(mp, tau))
               if i.cls is Stability.SADDLE]
    if not saddles:
        log.error("no saddle fixed point at tau=%g", tau)
        return 1
    traces = trace_invariant_manifolds(mp, tau, saddles[0], cfg.get("steps", 100))
    _emit(cfg, export.MANIFOLD_HEADER, export.manifold_rows(traces), out)
    if cfg.get("svg"):
        render_svg(traces, _resolve(cfg.get("svg")), tau)
    return 1 if any(t.terminated == "inverse map failed" for t in traces) else 0


def cmd_lock(cfg, out):
    mp = _map_params(cfg)
    _emit(cfg, export.WINDOW_HEADER, export.window_rows(lock_windows(mp, cfg.get("n_max", 1))), out)
    return 0


def cmd_report(cfg, out):
    delta, k = cfg.need("delta", "k")
    if not 1.0 < delta < PHI:
        raise UsageError("report needs 1 < delta < golden ratio")
    out.write(str(torus_and_chaos_report(delta, k, cfg.get("K", 1.0))) + "\n")
    return 0


def _model(cfg):
    alpha, beta = cfg.need("alpha", "beta")
    return ModelParams(alpha, beta, cfg.get("gamma", 0.0), cfg.get("omega", 1.0))


def _start(cfg):
    if any(k in cfg.params for k in ("x0", "y0", "z0")):
        return State3(cfg.get("x0", 0.0), cfg.get("y0", 0.0), cfg.get("z0", 0.0))
    return default_seed()


def cmd_simulate(cfg, out):
    mp = _model(cfg)
    t_end = cfg.get("t_end", 100.0)
    t_eval = np.linspace(0.0, t_end, cfg.get("n_samples", 1001))
    traj = integrate(mp, _start(cfg), t_end, cfg.get("tol", 1e-10), t_eval)
    _emit(cfg, export.TRAJECTORY_HEADER, export.trajectory_rows(traj), out)
    return 0


def cmd_locked_orbit(cfg, out):
    mp = _model(cfg)
    n = cfg.get("n", 1)
    tol = cfg.get("tol", 1e-11)
    start = relax(mp, _start(cfg), cfg.get("relax_periods", 40) * n, max(tol * 10, 1e-10))
    try:
        orb = find_locked_orbit(mp, start, n, tol)
    except NoConvergenceError as exc:
        log.error("%s", exc)
        return 1
    _emit(cfg, export.STROBO_HEADER, export.strobo_rows(orb), out)
    log.info("multiplier moduli: %s", ", ".join(f"{abs(m):.6g}" for m in orb.spectrum))
    return 0


def cmd_sweep(cfg, out):
    (k,) = cfg.need("k")
    d0, d1 = cfg.get("delta_min", 1.05), cfg.get("delta_max", 2.0)
    g0, g1 = cfg.get("gamma_min", 0.01), cfg.get("gamma_max", 1.5)
    if not 1.0 < d0 < d1:
        raise UsageError("sweep needs 1 < delta_min < delta_max")
    if not 0.0 <= g0 < g1:
        raise UsageError("sweep needs 0 <= gamma_min < gamma_max")
    ds = np.linspace(d0, d1, cfg.get("n_delta", 40))
    gs = np.linspace(g0, g1, cfg.get("n_gamma", 40))
    cells = [(float(d), float(g), classify_region(float(d), float(g), k).tag) for d in ds for g in gs]
    _emit(cfg, export.ATLAS_HEADER, ((d, g, k, t) for d, g, t in cells), out)
    if cfg.get("svg"):
        curves = []
        weak = np.linspace(d0, min(d1, PHI), 200)[:-1]
        weak = weak[weak > 1.0]
        if len(weak):
            th = [transition_thresholds(float(d), k) for d in weak]
            curves.append(("gamma_plus", [(float(d), t.gamma_plus) for d, t in zip(weak, th)]))
            if th[0].gamma_minus is not None:
                curves.append(("gamma_minus", [(float(d), t.gamma_minus) for d, t in zip(weak, th)]))
        if d0 < PHI < d1:
            curves.append(("delta = golden ratio", [(PHI, g0), (PHI, g1)]))
        write_svg(atlas_svg(cells, (d0, d1), (g0, g1), curves, f"region atlas, k = {k:g}"),
                  _resolve(cfg.get("svg")))
    return 0


DISPATCH = {
    "classify": cmd_classify, "trace": cmd_trace, "folds": cmd_folds,
    "stability": cmd_stability, "hopf": cmd_hopf, "bt": cmd_bt,
    "manifolds": cmd_manifolds, "lock": cmd_lock, "report": cmd_report,
    "simulate": cmd_simulate, "locked-orbit": cmd_locked_orbit, "sweep": cmd_sweep,
}


def main(argv=None, out=None):
    argv = sys.argv[1:] if argv is None else argv
    out = out or sys.stdout
    try:
        pre = build_parser().parse_known_args(argv)[0] if "--config" in argv else None
        text = None
        if pre is not None and pre.config:
            try:
                text = Path(pre.config).read_text()
            except OSError as exc:
                raise UsageError(f"cannot read config {pre.config}: {exc}") from None
        cfg = parse_config(argv, text)
        verbose = "-v" in argv or "--verbose" in argv
        logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return DISPATCH[cfg.command](cfg, out)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except DomainError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except ForcedHetError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
