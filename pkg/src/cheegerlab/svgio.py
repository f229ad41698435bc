"""SVG serialization of boundary chains.

Chains are written as plain path data (M/L/A/Z, absolute coordinates) in
problem coordinates; a group transform flips the y axis for display so
that the drawing matches the mathematical orientation.  The parser
inverts exactly the subset of SVG that the writer emits, which is what
makes the written area recomputable.
"""
from __future__ import annotations

import math
import os
import tempfile
import xml.etree.ElementTree as ET

import numpy as np

from .geometry import Arc, ArcPolygon, Segment

_SVG_NS = "http://www.w3.org/2000/svg"


def atomic_write_text(path: str, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a torn file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    # shortest round-trip decimal; normalize negative zero for determinism
    if x == 0.0:
        x = 0.0
    return repr(float(x))


def path_data(chain: ArcPolygon) -> str:
    """SVG path `d` attribute for a closed chain."""
    x0, y0 = chain.elements[0].start
    parts = [f"M {_fmt(x0)} {_fmt(y0)}"]
    for el in chain.elements:
        if isinstance(el, Segment):
            parts.append(f"L {_fmt(el.b[0])} {_fmt(el.b[1])}")
            continue
        # an SVG arc command cannot span a full turn; split halfway
        pieces = [el]
        if abs(el.sweep) > math.pi * (2.0 - 1e-12):
            half = 0.5 * el.sweep
            pieces = [
                Arc(el.center, el.radius, el.theta0, half),
                Arc(el.center, el.radius, el.theta0 + half, half),
            ]
        for arc in pieces:
            large = 1 if abs(arc.sweep) > math.pi else 0
            sweep_flag = 1 if arc.sweep > 0 else 0
            ex, ey = arc.end
            parts.append(
                f"A {_fmt(arc.radius)} {_fmt(arc.radius)} 0 "
                f"{large} {sweep_flag} {_fmt(ex)} {_fmt(ey)}"
            )
    parts.append("Z")
    return " ".join(parts)


def parse_path(d: str) -> ArcPolygon:
    """Rebuild a chain from path data written by path_data."""
    tokens = d.replace(",", " ").split()
    elements = []
    cur = None
    i = 0
    try:
        while i < len(tokens):
            cmd = tokens[i]
            if cmd == "M":
                cur = (float(tokens[i + 1]), float(tokens[i + 2]))
                i += 3
            elif cmd == "L":
                end = (float(tokens[i + 1]), float(tokens[i + 2]))
                elements.append(Segment(cur, end))
                cur = end
                i += 3
            elif cmd == "A":
                rx, ry = float(tokens[i + 1]), float(tokens[i + 2])
                large, sweep_flag = int(tokens[i + 4]), int(tokens[i + 5])
                end = (float(tokens[i + 6]), float(tokens[i + 7]))
                if abs(rx - ry) > 1e-12 * max(rx, ry):
                    raise ValueError("only circular arcs are supported")
                elements.append(_arc_from_endpoints(cur, end, rx, large, sweep_flag))
                cur = elements[-1].end
                i += 8
            elif cmd == "Z":
                i += 1
            else:
                raise ValueError(f"unsupported path command {cmd!r}")
    except IndexError:
        raise ValueError("truncated path data") from None
    return ArcPolygon(elements)


def _arc_from_endpoints(start, end, r: float, large: int, sweep_flag: int) -> Arc:
    """Center parameterization of a circular arc from SVG endpoint form."""
    sx, sy = start
    ex, ey = end
    mx, my = 0.5 * (sx + ex), 0.5 * (sy + ey)
    dx, dy = ex - sx, ey - sy
    half = 0.5 * math.hypot(dx, dy)
    if half > r:
        if half > r * (1.0 + 1e-9):
            raise ValueError("arc endpoints farther apart than the diameter")
        half = r
    # distance from chord midpoint to center, along the chord normal
    q = math.sqrt(max(r * r - half * half, 0.0))
    nx, ny = -dy, dx
    nlen = math.hypot(nx, ny)
    if nlen == 0.0:
        raise ValueError("degenerate arc: coincident endpoints")
    nx, ny = nx / nlen, ny / nlen
    # a small counterclockwise arc bulges right of the chord, so its
    # center sits on the left normal; each flag flip mirrors the choice
    side = 1.0 if (sweep_flag == 1) == (large == 0) else -1.0
    cx, cy = mx + side * q * nx, my + side * q * ny
    theta0 = math.atan2(sy - cy, sx - cx)
    theta1 = math.atan2(ey - cy, ex - cx)
    sweep = theta1 - theta0
    if sweep_flag == 1:
        while sweep <= 0.0:
            sweep += 2.0 * math.pi
    else:
        while sweep >= 0.0:
            sweep -= 2.0 * math.pi
    if large == 0 and abs(sweep) > math.pi + 1e-9:
        sweep -= math.copysign(2.0 * math.pi, sweep)
    return Arc((cx, cy), r, theta0, sweep)


def write_svg(path: str, chains, labels=None, stroke_width: float | None = None):
    """Render chains into an SVG file; the first chain sets the frame.

    chains: iterable of ArcPolygon; labels: optional ids, one per chain.
    Returns the serialized text (also written to `path` when not None).
    """
    chains = list(chains)
    if not chains:
        raise ValueError("nothing to draw")
    boxes = np.array([c.bounding_box() for c in chains])
    x0, y0 = boxes[:, 0].min(), boxes[:, 1].min()
    x1, y1 = boxes[:, 2].max(), boxes[:, 3].max()
    pad = 0.05 * max(x1 - x0, y1 - y0, 1e-9)
    if stroke_width is None:
        stroke_width = 0.004 * max(x1 - x0, y1 - y0, 1e-9)
    root = ET.Element(
        "svg",
        {
            "xmlns": _SVG_NS,
            "viewBox": f"{_fmt(x0 - pad)} {_fmt(-(y1 + pad))} "
            f"{_fmt(x1 - x0 + 2 * pad)} {_fmt(y1 - y0 + 2 * pad)}",
        },
    )
    group = ET.SubElement(root, "g", {"transform": "scale(1,-1)"})
    colors = ("#222222", "#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400")
    for k, chain in enumerate(chains):
        attrs = {
            "d": path_data(chain),
            "fill": "none",
            "stroke": colors[k % len(colors)],
            "stroke-width": _fmt(stroke_width),
        }
        if labels is not None:
            attrs["id"] = str(labels[k])
        ET.SubElement(group, "path", attrs)
    text = ET.tostring(root, encoding="unicode")
    if path is not None:
        atomic_write_text(path, text + "\n")
    return text


def read_svg(path: str) -> list:
    """(id, ArcPolygon) pairs for every path element in the file."""
    tree = ET.parse(path)
    out = []
    for el in tree.iter():
        if el.tag.split("}")[-1] != "path":
            continue
        out.append((el.get("id"), parse_path(el.get("d"))))
    return out
