"""Exact planar predicates and constructions on integer point sets.

Everything here works on Python integers (and ``Fraction`` for the rare
transient rational point), so no predicate ever rounds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

COORD_BOUND = 1 << 20


class GeometryError(ValueError):
    pass


class DegenerateInput(GeometryError):
    pass


class DegenerateTriangle(GeometryError):
    pass


class TwangPreconditionViolated(GeometryError):
    pass


class NonSimpleResult(GeometryError):
    pass


class Orientation(enum.IntEnum):
    CW = -1
    COLLINEAR = 0
    CCW = 1


class Location(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


Point = tuple  # (x, y); ints for stored points, Fractions allowed transiently


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def orient(p, q, r) -> Orientation:
    d = cross(p, q, r)
    return Orientation((d > 0) - (d < 0))


def _sign(v) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class PointSet:
    """Immutable indexed list of distinct integer points, not all collinear."""

    points: tuple
    _anchor: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple((int(x), int(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 3:
            raise DegenerateInput(f"need at least 3 points, got {len(pts)}")
        if len(set(pts)) != len(pts):
            raise DegenerateInput("coincident points")
        for x, y in pts:
            if abs(x) > COORD_BOUND or abs(y) > COORD_BOUND:
                raise DegenerateInput(f"coordinate out of range: {(x, y)}")
        if all(cross(pts[0], pts[1], p) == 0 for p in pts[2:]):
            raise DegenerateInput("all points collinear")
        anchor = min(range(len(pts)), key=lambda i: pts[i])
        object.__setattr__(self, "_anchor", anchor)

    @classmethod
    def from_list(cls, pts: Iterable[Sequence[int]]) -> "PointSet":
        return cls(tuple(tuple(p) for p in pts))

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def anchor(self) -> int:
        """Index of the lexicographically smallest point; always a strict hull corner."""
        return self._anchor


# --------------------------------------------------------------------------
# Hulls


def _monotone_chain(pts, idx, keep_collinear):
    order = sorted(idx, key=lambda i: pts[i])

    def half(seq):
        out = []
        for i in seq:
            while len(out) >= 2:
                c = cross(pts[out[-2]], pts[out[-1]], pts[i])
                if c < 0 or (c == 0 and not keep_collinear):
                    out.pop()
                else:
                    break
            out.append(i)
        return out

    lower = half(order)
    upper = half(reversed(order))
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class Hull:
    corners: tuple  # CCW, strict corners only
    boundary: tuple  # CCW, corners plus collinear points on hull edges
    on_hull: frozenset  # every index on the hull boundary


def convex_hull(ps, indices: Iterable[int] | None = None) -> Hull:
    """Convex hull of ``ps`` (or of the subset ``indices``), counter-clockwise.

    Collinear points on hull edges are excluded from ``corners`` but appear in
    ``boundary`` and ``on_hull``.
    """
    pts = ps.points if isinstance(ps, PointSet) else ps
    idx = sorted(set(range(len(pts)) if indices is None else indices))
    if len(idx) < 3 or all(cross(pts[idx[0]], pts[idx[1]], pts[i]) == 0 for i in idx[2:]):
        raise DegenerateInput("hull of fewer than 3 non-collinear points")
    corners = _monotone_chain(pts, idx, keep_collinear=False)
    boundary = []
    m = len(corners)
    for k in range(m):
        a, b = corners[k], corners[(k + 1) % m]
        boundary.append(a)
        between = [i for i in idx if i != a and i != b and on_open_segment(pts[i], pts[a], pts[b])]
        between.sort(key=lambda i: _dist2(pts[a], pts[i]))
        boundary.extend(between)
    return Hull(tuple(corners), tuple(boundary), frozenset(boundary))


def hull_region(pts, indices: Iterable[int]) -> "ConvexRegion":
    """Exact membership region for the hull of an arbitrary (possibly degenerate) index set."""
    idx = sorted(set(indices))
    if len(idx) >= 3 and not all(cross(pts[idx[0]], pts[idx[1]], pts[i]) == 0 for i in idx[2:]):
        return ConvexRegion(tuple(pts[i] for i in _monotone_chain(pts, idx, keep_collinear=False)))
    ends = sorted(pts[i] for i in idx)
    if not ends:
        return ConvexRegion(())
    return ConvexRegion((ends[0], ends[-1]) if ends[0] != ends[-1] else (ends[0],))


@dataclass(frozen=True)
class ConvexRegion:
    """Closed convex polygon, segment or point given by its CCW corners."""

    corners: tuple

    def locate(self, p) -> Location:
        c = self.corners
        if not c:
            return Location.OUTSIDE
        if len(c) == 1:
            return Location.BOUNDARY if tuple(p) == tuple(c[0]) else Location.OUTSIDE
        if len(c) == 2:
            return Location.BOUNDARY if on_closed_segment(p, c[0], c[1]) else Location.OUTSIDE
        on_edge = False
        for k in range(len(c)):
            s = cross(c[k], c[(k + 1) % len(c)], p)
            if s < 0:
                return Location.OUTSIDE
            if s == 0:
                on_edge = True
        return Location.BOUNDARY if on_edge else Location.INTERIOR

    def __contains__(self, p) -> bool:
        return self.locate(p) is not Location.OUTSIDE

    def contains_region(self, other: "ConvexRegion") -> bool:
        return all(q in self for q in other.corners)


# --------------------------------------------------------------------------
# Segments and triangles


def _dist2(p, q):
    return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2


def dist(p, q) -> float:
    return math.hypot(float(p[0] - q[0]), float(p[1] - q[1]))


def on_closed_segment(p, a, b) -> bool:
    if cross(a, b, p) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def on_open_segment(p, a, b) -> bool:
    return tuple(p) != tuple(a) and tuple(p) != tuple(b) and on_closed_segment(p, a, b)


def properly_cross(p1, p2, q1, q2) -> bool:
    """True iff the segments meet in a single point interior to both and cross there."""
    d1 = _sign(cross(q1, q2, p1))
    d2 = _sign(cross(q1, q2, p2))
    d3 = _sign(cross(p1, p2, q1))
    d4 = _sign(cross(p1, p2, q2))
    return d1 * d2 < 0 and d3 * d4 < 0


def segments_intersect(p1, p2, q1, q2) -> bool:
    d1 = _sign(cross(q1, q2, p1))
    d2 = _sign(cross(q1, q2, p2))
    d3 = _sign(cross(p1, p2, q1))
    d4 = _sign(cross(p1, p2, q2))
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    return (
        (d1 == 0 and on_closed_segment(p1, q1, q2))
        or (d2 == 0 and on_closed_segment(p2, q1, q2))
        or (d3 == 0 and on_closed_segment(q1, p1, p2))
        or (d4 == 0 and on_closed_segment(q2, p1, p2))
    )


def point_in_triangle(p, a, b, c) -> Location:
    s = _sign(cross(a, b, c))
    if s == 0:
        raise DegenerateTriangle(f"collinear triangle {a}, {b}, {c}")
    d = (s * _sign(cross(a, b, p)), s * _sign(cross(b, c, p)), s * _sign(cross(c, a, p)))
    if min(d) < 0:
        return Location.OUTSIDE
    return Location.BOUNDARY if 0 in d else Location.INTERIOR


# --------------------------------------------------------------------------
# Elastic-band chain inside a triangle


def sp_chain(a: int, apex, c: int, pts, exclude: Iterable[int] = ()) -> list[int]:
    """Hull chain from ``a`` to ``c`` pulled tight inside the closed triangle (a, apex, c).

    ``apex`` is a coordinate pair (it may be a rational pseudovertex). Every
    point of ``pts`` in the closed triangle except ``a``, ``c`` and the indices
    in ``exclude`` is an obstacle; the chain follows the obstacles' hull on the
    apex side of segment ac and keeps collinear chain vertices. When ``a == c``
    the chain is just ``[a]``.
    """
    if a == c:
        return [a]
    pa, pc = pts[a], pts[c]
    side = _sign(cross(pa, pc, apex))
    if side == 0:
        raise TwangPreconditionViolated(f"collinear triple {pa}, {apex}, {pc}")
    skip = set(exclude) | {a, c}
    xs = (pa[0], pc[0], apex[0])
    ys = (pa[1], pc[1], apex[1])
    x0, x1 = math.floor(min(xs)), math.ceil(max(xs))
    y0, y1 = math.floor(min(ys)), math.ceil(max(ys))
    captured = []
    for i, p in enumerate(pts):
        if i in skip or not (x0 <= p[0] <= x1 and y0 <= p[1] <= y1):
            continue
        if (
            side * cross(pa, pc, p) >= 0
            and side * cross(pc, apex, p) >= 0
            and side * cross(apex, pa, p) >= 0
        ):
            captured.append(i)
    if not captured:
        return [a, c]
    return [a] + _upper_chain(pa, pc, side, captured, pts) + [c]


def _upper_chain(pa, pc, side, captured, pts) -> list[int]:
    # Coordinates along ac (s) and toward the apex (h); all captured have h >= 0.
    ux, uy = pc[0] - pa[0], pc[1] - pa[1]

    def key(i):
        p = pts[i]
        s = (p[0] - pa[0]) * ux + (p[1] - pa[1]) * uy
        h = side * cross(pa, pc, p)
        return s, h

    if all(key(i)[1] == 0 for i in captured):
        return sorted(captured, key=lambda i: key(i)[0])
    # Upper hull of {a, c} + captured in the (s, h) frame, keeping collinear points.
    # A point left of the a-side of the frame (s < 0) still lies in the triangle,
    # so a plain monotone sweep is not enough; use an angular-free gift wrap.
    keys = {i: key(i) for i in captured}
    keys[-1] = (0, 0)
    keys[-2] = (ux * ux + uy * uy, 0)
    chain = [-1]
    cur = -1
    remaining = set(captured)
    while cur != -2:
        best = -2
        cand = list(remaining) + [-2]
        for j in cand:
            if j == best:
                continue
            o = _frame_cross(keys[cur], keys[best], keys[j])
            # The chain from a to c bulges toward +h: the next hull vertex is the
            # most counter-clockwise one as seen while walking with hull on the right.
            if o > 0 or (o == 0 and _frame_d2(keys[cur], keys[j]) < _frame_d2(keys[cur], keys[best])):
                best = j
        # Collinear points between cur and best belong to the chain too.
        cur = best
        if cur != -2:
            remaining.discard(cur)
        chain.append(cur)
    # Gift wrapping picked the nearest collinear candidate each time, so collinear
    # chain vertices are already included in order.
    return [i for i in chain if i >= 0]


def _frame_cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _frame_d2(p, q):
    return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2


# --------------------------------------------------------------------------
# Visibility


def _project_t(v, a, d, P):
    """Parameter t with a + t*d on the ray from v through P."""
    num = cross(v, a, P)  # cross(a - v, P - v)
    den = (P[0] - v[0]) * d[1] - (P[1] - v[1]) * d[0]
    return Fraction(num) / den


def visible_interval(pv, pa, pb, segments, skip_same_edge=True) -> list[tuple[Fraction, Fraction]]:
    """Open sub-intervals of edge (pa, pb), as parameters t in (0, 1), clearly visible from pv.

    ``segments`` is an iterable of coordinate pairs (p, q) making up the wrap
    boundary. A point x is clearly visible when segment pv-x touches the
    boundary only at pv and x.
    """
    tri = _sign(cross(pa, pb, pv))
    if tri == 0:
        return []
    d = (pb[0] - pa[0], pb[1] - pa[1])
    # triangle (pv, pa, pb) oriented CCW
    T = (pv, pa, pb) if cross(pv, pa, pb) > 0 else (pv, pb, pa)
    blocked: list[tuple[Fraction, Fraction]] = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1))]
    ea, eb = tuple(pa), tuple(pb)
    pv = tuple(pv)
    for p, q in _near_triangle(segments, T):
        p, q = tuple(p), tuple(q)
        if skip_same_edge and {p, q} == {ea, eb}:
            continue
        if p == pv or q == pv:
            other = q if p == pv else p
            if other == pv:
                continue
            if cross(T[0], T[1], other) >= 0 and cross(T[2], T[0], other) >= 0:
                t = _project_t(pv, pa, d, other)
                if 0 < t < 1:
                    blocked.append((t, t))
            continue
        clip = _clip_to_triangle(p, q, T)
        if clip is None:
            continue
        t0 = _project_t(pv, pa, d, clip[0])
        t1 = _project_t(pv, pa, d, clip[1])
        lo, hi = (t0, t1) if t0 <= t1 else (t1, t0)
        if hi < 0 or lo > 1:
            continue
        blocked.append((max(lo, Fraction(0)), min(hi, Fraction(1))))
    blocked.sort()
    out = []
    reach = blocked[0][1]
    for lo, hi in blocked[1:]:
        if lo > reach:
            out.append((reach, lo))
        if hi > reach:
            reach = hi
    return out


def maybe_visible(pv, pa, pb, seg: np.ndarray, min_gap: float = 1e-7) -> bool:
    """Float prefilter for visible_interval: False when edge (pa, pb) looks hidden from pv.

    ``seg`` is an (m, 4) array of segment endpoints. Gaps narrower than
    ``min_gap`` of the edge count as hidden, so a True answer still needs the
    exact test and a False answer may drop a sliver the exact test would keep.
    """
    v = np.asarray(pv, dtype=float)
    a = np.asarray(pa, dtype=float)
    b = np.asarray(pb, dtype=float)
    tri = (a[0] - v[0]) * (b[1] - v[1]) - (a[1] - v[1]) * (b[0] - v[0])
    if tri == 0:
        return False
    T = (v, a, b) if tri > 0 else (v, b, a)
    P, Q = seg[:, :2].astype(float), seg[:, 2:].astype(float)
    own = (np.all(P == a, axis=1) & np.all(Q == b, axis=1)) | (np.all(P == b, axis=1) & np.all(Q == a, axis=1))
    at_v = np.all(P == v, axis=1) | np.all(Q == v, axis=1)
    keep = ~(own | at_v)
    u0 = np.zeros(len(P))
    u1 = np.ones(len(P))
    for k in range(3):
        s, e = T[k], T[(k + 1) % 3]
        f0 = (e[0] - s[0]) * (P[:, 1] - s[1]) - (e[1] - s[1]) * (P[:, 0] - s[0])
        f1 = (e[0] - s[0]) * (Q[:, 1] - s[1]) - (e[1] - s[1]) * (Q[:, 0] - s[0])
        keep &= ~((f0 < 0) & (f1 < 0))
        with np.errstate(divide="ignore", invalid="ignore"):
            u = f0 / (f0 - f1)
        enter = (f0 < 0) & (f1 >= 0)
        leave = (f1 < 0) & (f0 >= 0)
        u0 = np.where(enter, np.maximum(u0, u), u0)
        u1 = np.where(leave, np.minimum(u1, u), u1)
    keep &= u0 <= u1
    if not keep.any():
        return True
    P, Q, u0, u1 = P[keep], Q[keep], u0[keep], u1[keep]
    d = b - a
    ts = []
    for u in (u0, u1):
        X = P + (Q - P) * u[:, None]
        num = (a[0] - v[0]) * (X[:, 1] - v[1]) - (a[1] - v[1]) * (X[:, 0] - v[0])
        den = (X[:, 0] - v[0]) * d[1] - (X[:, 1] - v[1]) * d[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            ts.append(num / den)
    lo, hi = np.minimum(ts[0], ts[1]), np.maximum(ts[0], ts[1])
    ok = np.isfinite(lo) & np.isfinite(hi)
    order = np.argsort(lo[ok])
    reach = 0.0
    for l, h in zip(lo[ok][order], hi[ok][order]):
        if l - reach > min_gap:
            return True
        reach = max(reach, h)
        if reach >= 1.0:
            return False
    return 1.0 - reach > min_gap


def _near_triangle(segments, T):
    """Segments not entirely outside one side of the CCW triangle T (exact int64 test)."""
    segs = list(segments)
    if len(segs) < 16 or not all(isinstance(c, int) for c in T[0] + T[1] + T[2]):
        return segs
    arr = np.array([(p[0], p[1], q[0], q[1]) for p, q in segs], dtype=np.int64)
    keep = np.ones(len(segs), dtype=bool)
    for k in range(3):
        (sx, sy), (ex, ey) = T[k], T[(k + 1) % 3]
        f0 = (ex - sx) * (arr[:, 1] - sy) - (ey - sy) * (arr[:, 0] - sx)
        f1 = (ex - sx) * (arr[:, 3] - sy) - (ey - sy) * (arr[:, 2] - sx)
        keep &= ~((f0 < 0) & (f1 < 0))
    return [segs[i] for i in np.flatnonzero(keep)]


def _clip_to_triangle(p, q, T):
    """Part of closed segment pq inside closed CCW triangle T, or None."""
    u0, u1 = Fraction(0), Fraction(1)
    for k in range(3):
        s, e = T[k], T[(k + 1) % 3]
        f0 = cross(s, e, p)
        f1 = cross(s, e, q)
        if f0 < 0 and f1 < 0:
            return None
        if f0 >= 0 and f1 >= 0:
            continue
        # f(u) = f0 + u (f1 - f0) >= 0
        u = Fraction(f0) / (f0 - f1)
        if f0 < 0:
            u0 = max(u0, u)
        else:
            u1 = min(u1, u)
        if u0 > u1:
            return None
    P = (p[0] + u0 * (q[0] - p[0]), p[1] + u0 * (q[1] - p[1]))
    Q = (p[0] + u1 * (q[0] - p[0]), p[1] + u1 * (q[1] - p[1]))
    return P, Q


def point_on_edge(pa, pb, t: Fraction):
    return (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))


# --------------------------------------------------------------------------
# Point-set statistics


@dataclass(frozen=True)
class GeometryStats:
    d_min: float
    alpha_max: float
    twang_bound: float


def geometry_stats(ps: PointSet) -> GeometryStats:
    """Smallest pairwise distance and the largest convex angle over non-collinear triples.

    O(n^3); meant for desk-scale instances.
    """
    pts = ps.points
    d_min = min(dist(p, q) for p, q in combinations(pts, 2))
    alpha = 0.0
    n = len(pts)
    for j in range(n):
        b = pts[j]
        for i in range(n):
            if i == j:
                continue
            for k in range(i + 1, n):
                if k == j:
                    continue
                a, c = pts[i], pts[k]
                if cross(b, a, c) == 0:
                    continue
                ux, uy = a[0] - b[0], a[1] - b[1]
                vx, vy = c[0] - b[0], c[1] - b[1]
                ang = math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy)
                if ang > alpha:
                    alpha = ang
    return GeometryStats(d_min, alpha, 2.0 * d_min * (1.0 - math.sin(alpha / 2.0)))
