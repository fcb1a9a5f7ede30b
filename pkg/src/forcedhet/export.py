"""CSV writers.  Floats use 17 significant digits so reruns are byte-identical."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path


def fmt(x):
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    if isinstance(x, complex):
        return f"{format(x.real, '.17g')}{'+' if x.imag >= 0 else '-'}{format(abs(x.imag), '.17g')}j"
    if hasattr(x, "value"):
        return str(x.value)
    try:
        return format(float(x), ".17g")
    except (TypeError, ValueError):
        return str(x)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def write_csv(path, header, rows):
    path = Path(path)
    try:
        path.write_text(csv_text(header, rows))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def diagram_rows(diagram):
    fold_by_tau = {f.tau: f for f in diagram.folds}
    for cid, c in enumerate(diagram.curves):
        marks = set(c.fold_points)
        for i, (tau, s) in enumerate(c.points):
            f = fold_by_tau.get(tau) if i in marks else None
            yield (cid, float(tau), float(s), f is not None, f.criticality if f else "")


DIAGRAM_HEADER = ["curve_id", "tau", "s", "is_fold", "criticality"]


def fold_rows(folds):
    for f in folds:
        yield (f.tau, f.s_star, f.eps, f.criticality, f.level, f.at_boundary)


FOLD_HEADER = ["tau", "s_star", "eps", "criticality", "level", "at_boundary"]

HOPF_HEADER = ["delta", "k", "gamma", "tau", "s", "theta", "eps", "det", "trace", "side"]


def hopf_rows(points):
    for p in points:
        yield (p.delta, p.k, p.gamma, p.tau, p.s, p.theta, p.eps, p.det, p.trace, p.side)


BT_HEADER = ["delta", "k", "gamma", "tau", "s", "residual", "eps"]


def bt_rows(points):
    for b in points:
        yield (b.delta, b.k, b.gamma, b.tau, b.s_star, b.residual, b.eps)


MANIFOLD_HEADER = ["branch", "index", "y", "s", "crossings", "min_crossing_gap"]


def manifold_rows(traces):
    for t in traces:
        for i, (y, s) in enumerate(t.points):
            yield (t.branch, i, float(y), float(s), t.crossings, t.min_crossing_gap)


WINDOW_HEADER = ["n", "omega_lo", "omega_hi", "source", "stability_note"]


def window_rows(windows):
    for w in windows:
        yield (w.n, w.omega_lo, w.omega_hi, w.source, w.stability_note)


TRAJECTORY_HEADER = ["t", "x", "y", "z"]


def trajectory_rows(traj):
    for t, (x, y, z) in zip(traj.t, traj.states):
        yield (float(t), float(x), float(y), float(z))


STROBO_HEADER = ["index", "t", "x", "y", "z", "multiplier_1", "multiplier_2", "residual"]


def strobo_rows(orbit):
    m1, m2 = orbit.multipliers
    for i, st in enumerate(orbit.samples):
        yield (i, st.t, st.x, st.y, st.z, m1, m2, orbit.residual)


STABILITY_HEADER = ["tau", "s", "class", "eig1", "eig2", "det", "trace"]


def stability_rows(infos):
    for p in infos:
        yield (p.tau, p.s, p.cls, p.eigenvalues[0], p.eigenvalues[1], p.det, p.trace)


ATLAS_HEADER = ["delta", "gamma", "k", "region"]
