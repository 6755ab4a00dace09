"""SVG drawings of wraps and of move traces, one file per frame."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from collections import Counter
from pathlib import Path

from .moves import MoveEngine, TwangEvent
from .pockets import pocket_tree
from .wrap import Wrap

SVG_NS = "http://www.w3.org/2000/svg"
POCKET_FILL = "#4a7fb5"


class _Frame:
    def __init__(self, ps, size: int, margin: int):
        xs = [p[0] for p in ps.points]
        ys = [p[1] for p in ps.points]
        self.x0, self.y1 = min(xs), max(ys)
        span = max(max(xs) - self.x0, self.y1 - min(ys), 1)
        self.k = (size - 2 * margin) / span
        self.margin = margin

    def __call__(self, p) -> tuple[float, float]:
        # flip y so the drawing matches the usual mathematical orientation
        return (self.margin + (float(p[0]) - self.x0) * self.k, self.margin + (self.y1 - float(p[1])) * self.k)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def wrap_svg(w: Wrap, *, size: int = 600, margin: int = 20, gap: float = 3.0, title: str = "") -> ET.Element:
    """One wrap as an SVG element tree.

    Pockets are filled with an opacity that grows with their level, an edge
    traversed more than once is drawn as parallel offset segments, and points
    in double contact get a larger red marker.
    """
    pts = w.ps.points
    tf = _Frame(w.ps, size, margin)
    root = ET.Element("svg", xmlns=SVG_NS, width=str(size), height=str(size), viewBox=f"0 0 {size} {size}")
    if title:
        ET.SubElement(root, "title").text = title

    pockets = ET.SubElement(root, "g", {"class": "pockets"})
    stack = list(pocket_tree(w).children)
    while stack:
        pk = stack.pop()
        stack.extend(pk.children)
        if len(set(pk.chain)) < 3:
            continue
        poly = " ".join(",".join(map(_fmt, tf(pts[i]))) for i in pk.chain)
        ET.SubElement(
            pockets,
            "polygon",
            {
                "class": f"pocket level-{pk.level}",
                "points": poly,
                "fill": POCKET_FILL,
                "fill-opacity": _fmt(min(0.12 * (pk.level - 1), 0.6)),
                "stroke": "none",
            },
        )

    edges = ET.SubElement(root, "g", {"class": "edges", "stroke": "#222", "stroke-width": "1.2"})
    mult = Counter(frozenset(e) for e in w.edges())
    seen: Counter = Counter()
    for a, b in w.edges():
        key = frozenset((a, b))
        m = mult[key]
        (x1, y1), (x2, y2) = tf(pts[a]), tf(pts[b])
        cls = "edge"
        if m > 1:
            # offset each traversal along the normal of the canonical direction
            lo, hi = sorted((a, b))
            (ux, uy), (vx, vy) = tf(pts[lo]), tf(pts[hi])
            length = math.hypot(vx - ux, vy - uy) or 1.0
            nx, ny = -(vy - uy) / length, (vx - ux) / length
            off = (seen[key] - (m - 1) / 2) * gap
            x1, y1, x2, y2 = x1 + nx * off, y1 + ny * off, x2 + nx * off, y2 + ny * off
            cls = "edge doubled"
        seen[key] += 1
        ET.SubElement(edges, "line", {"class": cls, "x1": _fmt(x1), "y1": _fmt(y1), "x2": _fmt(x2), "y2": _fmt(y2)})

    marks = ET.SubElement(root, "g", {"class": "points"})
    counts = w.counts()
    for i, p in enumerate(pts):
        cx, cy = tf(p)
        double = counts[i] > 1
        ET.SubElement(
            marks,
            "circle",
            {
                "class": "point double-contact" if double else "point",
                "cx": _fmt(cx),
                "cy": _fmt(cy),
                "r": "5" if double else "2.5",
                "fill": "#d62728" if double else "#222",
                "data-index": str(i),
            },
        )
    return root


def write_svg(el: ET.Element, path: Path) -> None:
    ET.ElementTree(el).write(path, encoding="unicode", xml_declaration=False)


def trace_frames(initial: Wrap, events, stride: int = 1):
    """Wraps to draw for an event sequence: the start, then after every stride-th twang."""
    if stride < 1:
        raise ValueError("stride must be positive")
    eng = MoveEngine(initial.copy(), check_level="off")
    frames = [(0, eng.wrap)]
    twangs = 0
    for ev in events:
        eng.replay(ev)
        if isinstance(ev, TwangEvent):
            twangs += 1
            if twangs % stride == 0:
                frames.append((twangs, eng.wrap))
    return frames


def render_frames(initial: Wrap, events, out_dir, stride: int = 1, size: int = 600) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, (twangs, w) in enumerate(trace_frames(initial, events, stride)):
        path = out_dir / f"frame_{k:04d}.svg"
        write_svg(wrap_svg(w, size=size, title=f"after {twangs} twangs"), path)
        paths.append(path)
    return paths
