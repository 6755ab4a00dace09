"""Instance generators, random point sets and the brute-force polygonization oracle."""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from itertools import combinations

from .geom import PointSet, convex_hull, cross, on_open_segment, segments_intersect
from .transforms import default_lid, initial_polygonization  # noqa: F401  (re-exported)
from .wrap import Wrap, canonical_cycle, is_simple

MAX_ENUM = 10


class TooLarge(ValueError):
    pass


class GenerationFailed(RuntimeError):
    pass


class Family(str, enum.Enum):
    POW2K = "pow2k"
    QUADCASCADE = "quadcascade"
    PINWHEEL = "pinwheel"
    POCKETCHAIN = "pocketchain"
    RANDOM = "random"


@dataclass
class FamilySpec:
    family: Family
    size: int
    seed: int = 0
    scale: int = 1000
    extra: dict = field(default_factory=dict)


def has_collinear_triple(pts) -> bool:
    return any(cross(a, b, c) == 0 for a, b, c in combinations(pts, 3))


def random_points(n: int, seed=0, scale: int = 1000, general_position: bool = False) -> PointSet:
    """n distinct integer points drawn uniformly from a scale x scale grid."""
    if n < 3:
        raise ValueError("need at least 3 points")
    if scale * scale < n:
        raise ValueError("grid too small for n distinct points")
    rng = random.Random(seed)
    for _ in range(1000):
        chosen: list[tuple[int, int]] = []
        seen = set()
        while len(chosen) < n:
            p = (rng.randrange(scale), rng.randrange(scale))
            if p in seen:
                continue
            if general_position and any(cross(a, b, p) == 0 for a, b in combinations(chosen, 2)):
                continue
            seen.add(p)
            chosen.append(p)
        if not has_collinear_triple(chosen) or not general_position:
            try:
                return PointSet.from_list(chosen)
            except ValueError:
                continue  # all collinear; draw again
    raise GenerationFailed(f"could not sample {n} points at scale {scale}")


def _free_edges(pts) -> list[list[bool]]:
    """ok[i][j] is True when segment ij passes through no other point."""
    n = len(pts)
    ok = [[False] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            good = not any(on_open_segment(pts[k], pts[i], pts[j]) for k in range(n) if k != i and k != j)
            ok[i][j] = ok[j][i] = good
    return ok


def enumerate_polygonizations(ps: PointSet) -> list[Wrap]:
    """All simple polygonizations, one per undirected cycle."""
    n = ps.n
    if n > MAX_ENUM:
        raise TooLarge(f"n={n} exceeds the enumeration limit of {MAX_ENUM}")
    pts = ps.points
    ok = _free_edges(pts)
    start = ps.anchor
    path = [start]
    used = [False] * n
    used[start] = True
    found = set()

    def clear(i, j) -> bool:
        # new edge ij against the path edges that are not adjacent to it
        pi, pj = pts[i], pts[j]
        m = len(path)
        for k in range(m - 1):
            u, v = path[k], path[k + 1]
            if u in (i, j) or v in (i, j):
                continue
            if segments_intersect(pi, pj, pts[u], pts[v]):
                return False
        return True

    def extend():
        last = path[-1]
        if len(path) == n:
            if ok[last][start] and _closing_ok():
                c = tuple(canonical_cycle(path))
                found.add(c)
            return
        for j in range(n):
            if used[j] or not ok[last][j]:
                continue
            if len(path) == n - 1 and j < path[1]:
                continue  # fix direction: second vertex below the last
            if not clear(last, j):
                continue
            if not _fold_ok(last, j):
                continue
            used[j] = True
            path.append(j)
            extend()
            path.pop()
            used[j] = False

    def _fold_ok(last, j) -> bool:
        # the new edge may not fold back along the previous one
        if len(path) < 2:
            return True
        prev = path[-2]
        a, b, c = pts[prev], pts[last], pts[j]
        if cross(a, b, c) != 0:
            return True
        return (c[0] - b[0]) * (a[0] - b[0]) + (c[1] - b[1]) * (a[1] - b[1]) < 0

    def _closing_ok() -> bool:
        last = path[-1]
        pi, pj = pts[last], pts[start]
        for k in range(1, len(path) - 2):
            u, v = path[k], path[k + 1]
            if segments_intersect(pi, pj, pts[u], pts[v]):
                return False
        return is_simple(path, ps)

    extend()
    return [Wrap(ps, list(c)) for c in sorted(found)]


def count_polygonizations(ps: PointSet) -> int:
    return len(enumerate_polygonizations(ps))


def gen_pow2k(k: int) -> PointSet:
    """3k+2 points: two anchors on a line and k gadgets across it.

    Each gadget is a column of three points: one on a convex upper chain, one
    on the anchor line and one on a convex lower chain.  The middle point can
    be picked up by either chain, giving 2**k routings.
    """
    if k < 1:
        raise ValueError("k must be at least 1 (n = 3k+2 >= 5)")
    W = 4 * (k + 1)
    H = 4
    pts = [(0, 0)]
    for i in range(k):
        c = 4 * (i + 1)
        bulge = c * (W - c) // 4
        pts += [(c, H + bulge), (c, 0), (c, -H - bulge)]
    pts.append((W, 0))
    return PointSet.from_list(pts)


def pow2k_routings(k: int) -> list[Wrap]:
    """The 2**k polygonizations where each middle point joins the upper or lower chain."""
    ps = gen_pow2k(k)
    n = ps.n
    out = []
    for mask in range(1 << k):
        upper, lower = [0], [0]
        for i in range(k):
            top, mid, bot = 1 + 3 * i, 2 + 3 * i, 3 + 3 * i
            upper.append(top)
            lower.append(bot)
            (upper if mask >> i & 1 else lower).append(mid)
        # a middle point joins its chain after its column partner
        order = upper + [n - 1] + lower[:0:-1]
        out.append(Wrap(ps, order))
    return out


def gen_pocket_chain(m: int, r: int, scale: int = 10000, depth: float = 0.15, span: float | None = None):
    """m pockets of r vertices each plus a bare target lid, all lids on a circle.

    Returns (point set, polygonization, lids); lids[0] is the target edge and the
    remaining lids follow it counter-clockwise.
    """
    if m < 2:
        raise ValueError("need at least two pockets")
    if r < 1:
        raise ValueError("need at least one vertex per pocket")
    pts: list[tuple[int, int]] = []
    order: list[int] = []
    lids = []
    L = m + 1
    if span is None:
        span = min(0.35, 0.6 * math.pi / L)  # half-width of a lid, kept clear of its neighbours
    for j in range(L):
        th = 2 * math.pi * j / L - math.pi / 2
        a = (round(scale * math.cos(th - span)), round(scale * math.sin(th - span)))
        b = (round(scale * math.cos(th + span)), round(scale * math.sin(th + span)))
        ia = len(pts)
        pts.append(a)
        order.append(ia)
        if j > 0:
            mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
            norm = math.hypot(mx, my)
            chord = math.dist(a, b)
            for t in range(1, r + 1):
                s = t / (r + 1)
                d = depth * chord * math.sin(math.pi * s)
                x = a[0] + (b[0] - a[0]) * s - mx / norm * d
                y = a[1] + (b[1] - a[1]) * s - my / norm * d
                pts.append((round(x), round(y)))
                order.append(len(pts) - 1)
        ib = len(pts)
        pts.append(b)
        order.append(ib)
        lids.append((ia, ib))
    ps = PointSet.from_list(pts)
    w = Wrap(ps, order)
    if not is_simple(w.sigma, ps):
        raise GenerationFailed("pocket chain layout is not simple")
    return ps, w, lids


def _pinwheel_strings(k: int, R: int, reach: int, depth: float, stretch_edge: bool, swing: float = 0.0, edge=None) -> list:
    if (reach + 1) * R >= 1 << 20:
        raise ValueError("coordinates would exceed the exact integer range")
    L = reach * R
    d = 2 * math.pi / k

    def on_circle(r, t):
        return (round(r * math.cos(t)), round(r * math.sin(t)))

    pts: list[tuple[int, int]] = []
    for i in range(k):
        t = d * i
        b = on_circle(R, t)
        a = (round(R * math.cos(t) + L * math.sin(t)), round(R * math.sin(t) - L * math.cos(t)))
        c = on_circle(R * (1 - depth), t - swing)
        pts += [a, b, c] if i % 2 == 0 else [c, b, a]
        if i == 0 and stretch_edge:
            if edge is None:
                # E1 sits halfway between the circle and the depth of b_0 below b_1's tangent
                r1 = (1 - (1 - math.cos(d)) / 2) / math.cos(0.1 * d)
                edge = ((0.28, 4 / R), (r1, 0.9 * d))
            pts += [on_circle(r * R, th) for r, th in edge]
    return pts


def _closed(pts, what: str):
    ps = PointSet.from_list(pts)
    sigma = list(range(len(pts)))
    start = sigma.index(ps.anchor)
    sigma = sigma[start:] + sigma[:start]
    if not is_simple(sigma, ps):
        raise GenerationFailed(f"{what} is not simple")
    return ps, Wrap(ps, sigma)


def gen_pinwheel(k: int, scale: int = 20000, reach: int = 20, depth: float = 0.9):
    """The bare pinwheel of k right-angled strings (k even), as point set and polygon."""
    if k < 4 or k % 2:
        raise ValueError("k must be even and at least 4")
    return _closed(_pinwheel_strings(k, scale, reach, depth, stretch_edge=False), f"pinwheel with {k} strings")


def gen_quadratic_cascade(n: int, scale: int = 20000, reach: int = 20, depth: float = 0.9):
    """Pinwheel of k strings whose forward move sets off a cascade with many passes.

    String i is the path a_i, b_i, c_i with b_i on a circle of radius ``scale``,
    a_i far out on the clockwise tangent at b_i and c_i on the radius to b_i,
    so each corner is a right angle.  Strings alternate direction and are
    joined near the centre and far outside.  Every triangle a_i b_i c_i holds
    the pins b_{i-1}, b_{i-2}, ... that lie within ``depth`` of its tangent.

    An extra edge (E0, E1) between c_0 and c_1 is the stretch target.
    Stretching it to a_1 and twanging a_1 starts a domino in which each string
    slides clockwise onto the next pin.  The stretched edge acts as one more
    string, so the domino comes round again, once per pin in a triangle.
    Points left over when n - 2 is not a multiple of 6 sit on the far join
    between a_{k-1} and a_0, out of the cascade's way. Four strings (n < 20)
    use a bent layout with the same stretch edge and v, whose cascade is short
    but still twangs one vertex twice.

    Returns (point set, polygonization, stretch edge position, v).
    """
    if n < 14:
        raise ValueError("need at least 14 points")
    k = (n - 2) // 6 * 2
    pad = n - 3 * k - 2
    if k == 4:
        # pins a quarter turn apart are out of reach of a right-angled triangle,
        # so the inner legs swing clockwise until each triangle takes in its neighbour pin
        pts = _pinwheel_strings(4, scale, reach, 0.56, True, swing=1.88, edge=((0.6, -0.19), (0.48, 0.87)))
    else:
        pts = _pinwheel_strings(k, scale, reach, depth, stretch_edge=True)
    if pad:
        (x0, y0), (x1, y1) = pts[-1], pts[0]
        nx, ny = y1 - y0, x0 - x1  # outward for the counter-clockwise closing join
        for j in range(pad):
            f = (j + 1) / (pad + 1)
            bump = 0.1 * math.sin(math.pi * f)
            pts.append((round(x0 + (x1 - x0) * f + nx * bump), round(y0 + (y1 - y0) * f + ny * bump)))
    ps, w = _closed(pts, f"pinwheel with {k} strings at scale {scale}")
    return ps, w, w.sigma.index(3), 7  # edge (E0, E1) and v = a_1
