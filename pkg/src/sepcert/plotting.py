"""Matplotlib rendering of planar scenes to static SVG files.

Floats appear here and only here: the decision path never sees them.
Output is deterministic for fixed inputs: fixed 800x600 viewport, a
fixed hash salt for SVG ids, no date metadata, and a declared
world-window mapping in the figure title.
"""

from __future__ import annotations

import math
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .dd import vertices_of_polytope  # noqa: E402
from .polyhedra import ExactRegion, OracleRegion, Polyhedron  # noqa: E402
from .scenes import Scene  # noqa: E402

DEFAULT_WINDOW = (Fraction(-3), Fraction(3), Fraction(-2), Fraction(2))

_REGION_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple")


class PlotError(ValueError):
    pass


def _window_box(window) -> Polyhedron:
    x0, x1, y0, y1 = (Fraction(w) for w in window)
    rows = [((Fraction(1), Fraction(0)), x1), ((Fraction(-1), Fraction(0)), -x0),
            ((Fraction(0), Fraction(1)), y1), ((Fraction(0), Fraction(-1)), -y0)]
    return Polyhedron.make(2, rows)


def _clip_polygon(piece: Polyhedron, box: Polyhedron):
    clipped = piece.intersect(box.rows)
    verts, recession = vertices_of_polytope(clipped.rows, 2)
    if recession or len(verts) < 3:
        return None
    pts = [(float(v[0]), float(v[1])) for v in verts]
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    pts.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
    return pts


def _arrow(ax, base, vec, color, label=None):
    bx, by = float(base[0]), float(base[1])
    vx, vy = float(vec[0]), float(vec[1])
    if vx == 0 and vy == 0:
        return
    ax.annotate("", xy=(bx + vx, by + vy), xytext=(bx, by),
                arrowprops=dict(arrowstyle="->", color=color, lw=1.6))
    if label:
        ax.text(bx + vx, by + vy, label, color=color, fontsize=8)


def _parse_float_vec(node):
    return tuple(float(Fraction(c)) for c in node)


def render_scene(scene: Scene, out_path, window=DEFAULT_WINDOW,
                 report: dict | None = None) -> None:
    """Render region pieces, reference points, and (when a report is
    given) shift and dual-vector arrows, to a static 800x600 SVG."""
    if scene.dim != 2:
        raise PlotError("rendering is planar only")
    plt.rcParams["svg.hashsalt"] = f"sepcert:{scene.name}"
    # 72 pt/inch makes the SVG viewBox exactly "0 0 800 600".
    fig, ax = plt.subplots(figsize=(800 / 72, 600 / 72), dpi=72)
    box = _window_box(window)
    x0, x1, y0, y1 = (float(Fraction(w)) for w in window)

    for idx, (name, region) in enumerate(sorted(scene.regions.items())):
        color = _REGION_COLORS[idx % len(_REGION_COLORS)]
        if isinstance(region, ExactRegion):
            for piece in region.pieces:
                poly = _clip_polygon(piece, box)
                if poly:
                    ax.fill([p[0] for p in poly], [p[1] for p in poly],
                            alpha=0.25, color=color, lw=0)
            ax.plot([], [], color=color, alpha=0.5, lw=6, label=name)
        else:
            pts = [p for p in region.member_grid() if box.contains(p)]
            ax.plot([float(p[0]) for p in pts], [float(p[1]) for p in pts],
                    ls="none", marker="s", ms=2.2, color=color, alpha=0.5,
                    label=f"{name} ({region.label}, step {region.step})")

    for name, point in sorted(scene.points.items()):
        px, py = float(point[0]), float(point[1])
        ax.plot([px], [py], marker="o", ms=5, color="black")
        ax.annotate(name, (px, py), textcoords="offset points", xytext=(4, 4),
                    fontsize=9)

    if report is not None:
        _draw_certificates(ax, scene, report)

    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal", adjustable="box")
    ax.grid(True, lw=0.3, alpha=0.4)
    ax.legend(loc="upper right", fontsize=8)
    title = (f"{scene.name}  window=[{window[0]},{window[1]}]x"
             f"[{window[2]},{window[3]}]")
    ax.set_title(title, fontsize=10)
    fig.savefig(out_path, format="svg", metadata={"Date": None, "Title": title})
    plt.close(fig)


def _draw_certificates(ax, scene: Scene, report: dict) -> None:
    for rec in report.get("results", ()):
        cert = rec.get("certificate")
        if not isinstance(cert, dict):
            continue
        args = rec.get("args", {})
        base_a = scene.points.get(args.get("a", "a"))
        base_b = scene.points.get(args.get("b", "b"))
        _draw_one_certificate(ax, cert, base_a, base_b)


def _draw_one_certificate(ax, cert: dict, base_a, base_b) -> None:
    kind = cert.get("type")
    if kind == "witness_family" and cert.get("entries"):
        _draw_one_certificate(ax, cert["entries"][0]["witness"], base_a, base_b)
    elif kind == "approx_stationary":
        _draw_one_certificate(ax, cert["witnesses"], base_a, base_b)
    elif kind == "shift_witness":
        a = _parse_float_vec(cert["aprime"]) if cert.get("aprime") else (
            tuple(float(c) for c in base_a) if base_a else (0.0, 0.0))
        b = _parse_float_vec(cert["bprime"]) if cert.get("bprime") else (
            tuple(float(c) for c in base_b) if base_b else (0.0, 0.0))
        _arrow(ax, a, _parse_float_vec(cert["u"]), "crimson", "u")
        _arrow(ax, b, _parse_float_vec(cert["v"]), "darkgreen", "v")
    elif kind == "dual_pair":
        _arrow(ax, _parse_float_vec(cert["aprime"]),
               _parse_float_vec(cert["astar"]), "navy", "a*")
        _arrow(ax, _parse_float_vec(cert["bprime"]),
               _parse_float_vec(cert["bstar"]), "teal", "b*")
    elif kind == "separation_limit" and cert.get("zero_pair"):
        zp = cert["zero_pair"]
        _arrow(ax, _parse_float_vec(zp["point_a"]), _parse_float_vec(zp["astar"]),
               "navy", "z")
