"""Minimal hand-written SVG: tau up the vertical axis, s across [0, 2pi)."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .core import TWO_PI
from .diagram import Criticality

W, H, PAD = 480, 360, 40


def _x(s):
    return PAD + (s / TWO_PI) * (W - 2 * PAD)


def _y(tau):
    return H - PAD - tau * (H - 2 * PAD)


def _frame(title, xlabel="s", ylabel="tau"):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="{PAD}" y="{PAD}" width="{W - 2 * PAD}" height="{H - 2 * PAD}" fill="none" stroke="black"/>',
        f'<text x="{W / 2}" y="{PAD / 2}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{W / 2}" y="{H - 8}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="12" y="{H / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 12 {H / 2})">{escape(ylabel)}</text>',
    ]


def _pieces(points):
    """Split a polyline wherever it jumps across the s wrap."""
    run = []
    for tau, s in points:
        if run and abs(s - run[-1][1]) > math.pi:
            yield run
            run = []
        run.append((tau, s))
    if run:
        yield run


def _polyline(run, dashed=False, colour="black"):
    pts = " ".join(f"{_x(s):.3f},{_y(t):.3f}" for t, s in run)
    dash = ' stroke-dasharray="5,3"' if dashed else ""
    return f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="1.5"{dash}/>'


def diagram_svg(diagram):
    lines = _frame(f"region {diagram.region.tag}")
    for c in diagram.curves:
        for run in _pieces(c.points):
            lines.append(_polyline(run))
    for f in diagram.folds:
        # filled marker for supercritical, hollow and dashed ring for subcritical
        if f.criticality is Criticality.SUB:
            lines.append(f'<circle cx="{_x(f.s_star):.3f}" cy="{_y(f.tau):.3f}" r="4" fill="white" '
                         f'stroke="red" stroke-dasharray="2,2"/>')
        else:
            lines.append(f'<circle cx="{_x(f.s_star):.3f}" cy="{_y(f.tau):.3f}" r="4" fill="red"/>')
    if not diagram.curves:
        lines.append(f'<text x="{W / 2}" y="{H / 2}" text-anchor="middle" font-size="12">'
                     f'no zeros of g (region {escape(diagram.region.tag)})</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def manifolds_svg(traces, tau):
    lines = _frame(f"saddle manifolds at tau = {tau:.6g}", "s", "y")
    colours = {"unstable+": "red", "unstable-": "orange", "stable+": "blue", "stable-": "teal"}
    for t in traces:
        pts = [(y, s) for y, s in t.points]
        for run in _pieces(pts):
            lines.append(_polyline(run, colour=colours.get(t.branch.value, "black")))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def atlas_svg(cells, delta_range, gamma_range, curves, title):
    """Region atlas: one coloured rect per cell plus threshold polylines."""
    (d0, d1), (g0, g1) = delta_range, gamma_range
    palette = {}
    base = ["#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5"]

    def px(d):
        return PAD + (d - d0) / (d1 - d0) * (W - 2 * PAD)

    def py(g):
        return H - PAD - (g - g0) / (g1 - g0) * (H - 2 * PAD)

    lines = _frame(title, "delta", "gamma")
    ds = sorted({c[0] for c in cells})
    gs = sorted({c[1] for c in cells})
    cw = (W - 2 * PAD) / max(len(ds), 1)
    ch = (H - 2 * PAD) / max(len(gs), 1)
    for d, g, tag in cells:
        colour = palette.setdefault(tag, base[len(palette) % len(base)] if not tag.startswith("Boundary") else "#444444")
        lines.append(f'<rect x="{px(d) - cw / 2:.3f}" y="{py(g) - ch / 2:.3f}" width="{cw:.3f}" '
                     f'height="{ch:.3f}" fill="{colour}" stroke="none"><title>{escape(tag)}</title></rect>')
    for name, pts in curves:
        pts = [(d, g) for d, g in pts if g0 <= g <= g1]
        if len(pts) > 1:
            coords = " ".join(f"{px(d):.3f},{py(g):.3f}" for d, g in pts)
            lines.append(f'<polyline points="{coords}" fill="none" stroke="black" stroke-width="1.5">'
                         f'<title>{escape(name)}</title></polyline>')
    y = PAD + 12
    for tag, colour in palette.items():
        lines.append(f'<text x="{W - PAD + 4}" y="{y}" font-size="10" fill="{colour}">{escape(tag)}</text>')
        y += 12
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(text, path):
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def render_svg(obj, path, tau=None):
    """Write a diagram, or a list of manifold traces, as SVG."""
    if isinstance(obj, list):
        if not obj:
            raise ValueError("nothing to render")
        return write_svg(manifolds_svg(obj, obj[0].saddle.tau if tau is None else tau), path)
    return write_svg(diagram_svg(obj), path)
