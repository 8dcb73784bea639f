"""Minimal SVG snapshots of a system.

Each particle is a circle whose ring colour gives its signal state (root
black, stressed red, inhibited but not stressed yellow, otherwise green)
and whose fill darkness grows with its battery level relative to capacity.
Faint lines mark parent pointers.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .lattice import AxialCoord, neighbor, parse_coord, to_cartesian
from .system import Role, SystemState

RING_ROOT = "#000000"
RING_STRESS = "#d62728"
RING_INHIBIT = "#e6c200"
RING_CLEAR = "#2ca02c"

SCALE = 20.0
RADIUS = 7.0


def ring_color(p: dict) -> str:
    if p["role"] == Role.ROOT.value:
        return RING_ROOT
    if p["stress"]:
        return RING_STRESS
    if p["inhibit"]:
        return RING_INHIBIT
    return RING_CLEAR


def fill_color(e_bat: float, kappa: float) -> str:
    """Grey level from white (empty) to dark blue-grey (full)."""
    frac = min(1.0, max(0.0, e_bat / kappa)) if kappa > 0 else 0.0
    level = round(255 - 200 * frac)
    return f"#{level:02x}{level:02x}{min(255, level + 40):02x}"


def render_snapshot(snap: dict, title: str = "") -> str:
    """SVG text for a snapshot as produced by ``SystemState.snapshot``."""
    kappa = snap["parameters"]["kappa"]
    live = [(parse_coord(k), p) for k, p in snap["particles"].items() if not p["crashed"]]
    live.sort(key=lambda item: item[0])
    if not live:
        return '<svg xmlns="http://www.w3.org/2000/svg" width="10" height="10"></svg>\n'
    pts = {c: to_cartesian(c) for c, _ in live}
    xs = [x for x, _ in pts.values()]
    ys = [y for _, y in pts.values()]
    pad = 1.0
    x0, y0 = min(xs) - pad, min(ys) - pad
    width = (max(xs) - min(xs) + 2 * pad) * SCALE
    height = (max(ys) - min(ys) + 2 * pad) * SCALE

    def xy(c):
        x, y = pts[c]
        return (x - x0) * SCALE, (y - y0) * SCALE

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1f}" height="{height:.1f}" '
           f'viewBox="0 0 {width:.1f} {height:.1f}">']
    if title:
        out.append(f"<title>{escape(title)}</title>")
    for c, p in live:
        if p["parent"] is None:
            continue
        u = neighbor(c, p["parent"])
        if u in pts:
            (ax, ay), (bx, by) = xy(c), xy(u)
            out.append(f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}" '
                       'stroke="#999999" stroke-width="1"/>')
    for c, p in live:
        x, y = xy(c)
        out.append(f'<circle data-coord="{c[0]},{c[1]}" cx="{x:.2f}" cy="{y:.2f}" r="{RADIUS}" '
                   f'fill="{fill_color(p["e_bat"], kappa)}" stroke="{ring_color(p)}" stroke-width="2.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(s: SystemState, title: str = "") -> str:
    return render_snapshot(s.snapshot(), title)


def frame_coords(svg_text: str) -> set[AxialCoord]:
    """Particle coordinates drawn in a frame, read back from the ``data-coord`` attributes."""
    out = set()
    for chunk in svg_text.split('data-coord="')[1:]:
        q, r = chunk.split('"', 1)[0].split(",")
        out.add(AxialCoord(int(q), int(r)))
    return out
