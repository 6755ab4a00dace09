"""Pockets, the pocket hierarchy tree and pocket vectors of a wrap."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import zip_longest
from typing import Optional

from .geom import ConvexRegion, Location, convex_hull, cross, hull_region
from .wrap import Wrap


@dataclass
class Pocket:
    level: int
    lid: Optional[tuple]  # None for the root (the whole wrap)
    chain: tuple  # sigma sub-sequence from one lid endpoint to the other
    hull: tuple = ()  # hull boundary of the chain points, CCW, collinear points kept
    count: int = 0
    interior: tuple = ()
    children: list = field(default_factory=list)

    @property
    def points(self) -> set[int]:
        return set(self.chain)

    @property
    def is_bare(self) -> bool:
        return len(self.chain) <= 2

    def region(self, pts) -> ConvexRegion:
        return hull_region(pts, self.chain)

    def to_json(self) -> dict:
        out = {
            "level": self.level,
            "hull": list(self.hull),
            "interior": list(self.interior),
            "count": self.count,
            "chain": list(self.chain),
            "children": [c.to_json() for c in self.children],
        }
        if self.lid is not None:
            out["lid"] = list(self.lid)
        return out


PocketTree = Pocket


def _hull_cycle(pts, idx) -> tuple[tuple, bool]:
    """Hull boundary (CCW, collinear points kept) and whether it is full-dimensional."""
    idx = sorted(set(idx))
    if len(idx) >= 3 and not all(cross(pts[idx[0]], pts[idx[1]], pts[i]) == 0 for i in idx[2:]):
        return convex_hull(pts, idx).boundary, True
    return tuple(sorted(idx, key=lambda i: pts[i])), False


def _hull_edges(boundary, full) -> set[frozenset]:
    m = len(boundary)
    if m < 2:
        return set()
    if full:
        return {frozenset((boundary[k], boundary[(k + 1) % m])) for k in range(m)}
    return {frozenset((boundary[k], boundary[k + 1])) for k in range(m - 1)}


def _fill(node: Pocket, pts) -> tuple[set, bool]:
    boundary, full = _hull_cycle(pts, node.chain)
    node.hull = boundary
    region = hull_region(pts, node.chain)
    inside = [i for i, p in enumerate(pts) if region.locate(p) is not Location.OUTSIDE]
    on = set(boundary)
    if full:
        on = {i for i in inside if region.locate(pts[i]) is Location.BOUNDARY}
    node.count = len(inside)
    node.interior = tuple(i for i in inside if i not in on)
    return _hull_edges(boundary, full), full


def _children(node: Pocket, pts, wrap_edges: set, level: int, root: bool) -> list[Pocket]:
    hull_edges, full = _fill(node, pts)
    if not full:
        return []
    on_hull = set(node.hull)
    ch = node.chain
    marks = [k for k, i in enumerate(ch) if i in on_hull]
    out = []
    for i, j in zip(marks, marks[1:]):
        p, q = ch[i], ch[j]
        if j == i + 1 or p == q:
            continue
        if not root and i == 0 and j == len(ch) - 1:
            continue  # the node's own lid
        if frozenset((p, q)) not in hull_edges or frozenset((p, q)) in wrap_edges:
            continue
        out.append(Pocket(level, (p, q), tuple(ch[i : j + 1])))
    return out


def pocket_tree(w: Wrap) -> Pocket:
    """Recursive pocket hierarchy; the whole wrap is the root at level 1."""
    pts = w.ps.points
    s = w.sigma
    wrap_edges = {frozenset((s[k], s[(k + 1) % len(s)])) for k in range(len(s))}
    root = Pocket(1, None, tuple(s) + (s[0],))
    stack = [(root, True)]
    while stack:
        node, is_root = stack.pop()
        node.children = _children(node, pts, wrap_edges, node.level + 1, is_root)
        stack.extend((c, False) for c in node.children)
    return root


def pockets(w: Wrap) -> list[Pocket]:
    """Level-1 pockets: one per hull edge of the point set missing from the wrap."""
    return pocket_tree(w).children


def pocket_count(pk: Pocket, ps) -> int:
    """Distinct points of the set on or inside the hull of the pocket's chain."""
    pts = ps.points if hasattr(ps, "points") else ps
    region = hull_region(pts, pk.chain)
    return sum(1 for p in pts if region.locate(p) is not Location.OUTSIDE)


def hull_of_pocket(pk: Pocket, ps) -> ConvexRegion:
    pts = ps.points if hasattr(ps, "points") else ps
    return hull_region(pts, pk.chain)


def pocket_vector(tree: Pocket) -> list[int]:
    sums: list[int] = []
    frontier = [tree]
    while frontier:
        sums.append(sum(node.count for node in frontier))
        frontier = [c for node in frontier for c in node.children]
    return sums


def lex_less(V, W) -> bool:
    """Strict lexicographic order; missing trailing entries count as 0."""
    for v, w in zip_longest(V, W, fillvalue=0):
        if v != w:
            return v < w
    return False


def pocket_with_lid(w: Wrap, lid) -> Optional[Pocket]:
    key = frozenset(lid)
    for pk in pockets(w):
        if frozenset(pk.lid) == key:
            return pk
    return None


def hull_points_of_pocket(pk: Pocket, ps) -> set[int]:
    pts = ps.points
    region = hull_region(pts, pk.chain)
    return {i for i, p in enumerate(pts) if region.locate(p) is not Location.OUTSIDE}


def pocket_nesting_holds(before: Wrap, after: Wrap) -> bool:
    """Every level-1 pocket after a twang lies in the hull of the same-lid pocket before it."""
    pts = before.ps.points
    old = {frozenset(pk.lid): pk for pk in pockets(before)}
    for pk in pockets(after):
        prev = old.get(frozenset(pk.lid))
        if prev is None:
            return False
        if not prev.region(pts).contains_region(pk.region(pts)):
            return False
    return True
