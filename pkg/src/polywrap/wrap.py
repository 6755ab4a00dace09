"""Polygonal wraps: circular index sequences over a point set, possibly with repeats."""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .geom import DegenerateInput, PointSet, cross


class WrapError(ValueError):
    pass


def diamond_angle(dx, dy) -> Fraction:
    """Exact pseudo-angle in [0, 4), monotone in the true angle of (dx, dy)."""
    if dx == 0 and dy == 0:
        raise ValueError("zero direction")
    if dy >= 0:
        return Fraction(dy, dx + dy) if dx >= 0 else 1 - Fraction(dx, -dx + dy)
    return 2 - Fraction(dy, -dx - dy) if dx < 0 else 3 + Fraction(dx, dx - dy)


@dataclass(frozen=True)
class DoubleContact:
    point: int
    positions: tuple


class Wrap:
    """Circular sequence ``sigma`` of point indices.

    The sequence is stored rotated so that it starts at the unique occurrence
    of the point set's anchor (its lexicographically smallest point, a strict
    hull corner that never enters double contact). That makes list equality a
    meaningful "exact" state comparison while orientation is preserved.
    """

    __slots__ = ("ps", "sigma")

    def __init__(self, ps: PointSet, sigma: Sequence[int], normalize: bool = True):
        self.ps = ps
        sigma = [int(i) for i in sigma]
        if normalize:
            sigma = _rotate_to_anchor(sigma, ps.anchor)
        self.sigma = sigma

    # -- basic views ---------------------------------------------------

    def __len__(self):
        return len(self.sigma)

    def __eq__(self, other):
        return isinstance(other, Wrap) and self.ps == other.ps and self.sigma == other.sigma

    def __hash__(self):
        return hash(tuple(self.sigma))

    def __repr__(self):
        return f"Wrap({self.sigma})"

    def copy(self) -> "Wrap":
        return Wrap(self.ps, list(self.sigma), normalize=False)

    def coords(self, pos: int):
        return self.ps.points[self.sigma[pos % len(self.sigma)]]

    def edges(self) -> list[tuple[int, int]]:
        s = self.sigma
        return [(s[i], s[(i + 1) % len(s)]) for i in range(len(s))]

    def edge_coords(self):
        pts = self.ps.points
        return [(pts[a], pts[b]) for a, b in self.edges()]

    def counts(self) -> Counter:
        return Counter(self.sigma)

    def double_contacts(self) -> list[DoubleContact]:
        where: dict[int, list[int]] = {}
        for pos, i in enumerate(self.sigma):
            where.setdefault(i, []).append(pos)
        return [DoubleContact(i, tuple(p)) for i, p in sorted(where.items()) if len(p) > 1]

    def positions(self, index: int) -> list[int]:
        return [pos for pos, i in enumerate(self.sigma) if i == index]

    def is_polygonization(self) -> bool:
        return len(self.sigma) == self.ps.n and len(set(self.sigma)) == self.ps.n

    def neighbors(self, pos: int) -> tuple[int, int]:
        L = len(self.sigma)
        return self.sigma[(pos - 1) % L], self.sigma[(pos + 1) % L]

    def is_adjacent(self, a: int, b: int) -> bool:
        return any({x, y} == {a, b} for x, y in self.edges())

    def digest(self) -> str:
        return hashlib.sha1(",".join(map(str, self.sigma)).encode()).hexdigest()[:16]

    def reversed(self) -> "Wrap":
        return Wrap(self.ps, list(reversed(self.sigma)))

    def signed_area2(self) -> int:
        pts = self.ps.points
        s = self.sigma
        return sum(cross((0, 0), pts[s[i]], pts[s[(i + 1) % len(s)]]) for i in range(len(s)))

    # -- serialization -------------------------------------------------

    def to_json(self) -> dict:
        if self.is_polygonization():
            return {"order": list(self.sigma)}
        return {"sigma": list(self.sigma)}


def _rotate_to_anchor(sigma: list[int], anchor: int) -> list[int]:
    hits = [k for k, i in enumerate(sigma) if i == anchor]
    if not hits:
        raise WrapError(f"anchor point {anchor} missing from wrap")
    if len(hits) > 1:
        raise WrapError(f"anchor point {anchor} in double contact")
    k = hits[0]
    return sigma[k:] + sigma[:k]


def make_wrap(ps: PointSet, sigma: Sequence[int]) -> Wrap:
    """Validate Def.-1 bookkeeping (every index present, indices in range) and build a Wrap."""
    n = ps.n
    if any(not 0 <= i < n for i in sigma):
        raise WrapError("index out of range")
    if set(sigma) != set(range(n)):
        raise WrapError("every point must occur in the wrap")
    for k in range(len(sigma)):
        if sigma[k] == sigma[(k + 1) % len(sigma)]:
            raise WrapError("zero-length edge")
    return Wrap(ps, sigma)


def make_polygonization(ps: PointSet, order: Sequence[int]) -> Wrap:
    if sorted(order) != list(range(ps.n)):
        raise WrapError("polygonization must be a permutation of 0..n-1")
    return Wrap(ps, order)


# --------------------------------------------------------------------------
# Simplicity


def _edge_arrays(pts, sigma):
    P = np.asarray([pts[i] for i in sigma], dtype=np.int64)
    Q = np.roll(P, -1, axis=0)
    return P, Q


def _cross_arr(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _proper_crossings(P, Q) -> list[tuple[int, int]]:
    """Index pairs of edges that properly cross (vectorized, exact in int64)."""
    m = len(P)
    if m < 4:
        return []
    px, py = P[:, 0][:, None], P[:, 1][:, None]
    qx, qy = Q[:, 0][:, None], Q[:, 1][:, None]
    rx, ry = P[:, 0][None, :], P[:, 1][None, :]
    sx, sy = Q[:, 0][None, :], Q[:, 1][None, :]
    d1 = np.sign(_cross_arr(rx, ry, sx, sy, px, py))
    d2 = np.sign(_cross_arr(rx, ry, sx, sy, qx, qy))
    d3 = np.sign(_cross_arr(px, py, qx, qy, rx, ry))
    d4 = np.sign(_cross_arr(px, py, qx, qy, sx, sy))
    bad = (d1 * d2 < 0) & (d3 * d4 < 0)
    ii, jj = np.nonzero(np.triu(bad, 1))
    return list(zip(ii.tolist(), jj.tolist()))


def _points_inside_edges(pts_arr, P, Q) -> list[tuple[int, int]]:
    """(point, edge) pairs with the point strictly inside the edge."""
    x = pts_arr[:, 0][:, None]
    y = pts_arr[:, 1][:, None]
    px, py = P[:, 0][None, :], P[:, 1][None, :]
    qx, qy = Q[:, 0][None, :], Q[:, 1][None, :]
    col = _cross_arr(px, py, qx, qy, x, y) == 0
    inx = (np.minimum(px, qx) <= x) & (x <= np.maximum(px, qx))
    iny = (np.minimum(py, qy) <= y) & (y <= np.maximum(py, qy))
    endpoint = ((x == px) & (y == py)) | ((x == qx) & (y == qy))
    ii, jj = np.nonzero(col & inx & iny & ~endpoint)
    return list(zip(ii.tolist(), jj.tolist()))


def is_simple(order: Sequence[int], ps: PointSet) -> bool:
    """Exact simplicity test for a permutation of the point indices."""
    if sorted(order) != list(range(ps.n)):
        return False
    pts = ps.points
    P, Q = _edge_arrays(pts, order)
    if _points_inside_edges(np.asarray(pts, dtype=np.int64), P, Q):
        return False
    return not _proper_crossings(P, Q)


@dataclass(frozen=True)
class WeakCheck:
    ok: bool
    description: str = ""

    def __bool__(self):
        return self.ok


OK = WeakCheck(True)


def weak_simplicity_check(w: Wrap) -> WeakCheck:
    """Necessary conditions for weak simplicity of a wrap.

    Checks: every index present; no proper crossing between edges (doubled
    edges overlap exactly and are allowed); no point strictly inside an edge;
    at each double contact, no two passages whose four directions are
    distinct interleave around the point. Passing is necessary, not
    sufficient.
    """
    ps = w.ps
    pts = ps.points
    if set(w.sigma) != set(range(ps.n)):
        return WeakCheck(False, "missing point")
    L = len(w.sigma)
    for k in range(L):
        if w.sigma[k] == w.sigma[(k + 1) % L]:
            return WeakCheck(False, f"zero-length edge at position {k}")
    P, Q = _edge_arrays(pts, w.sigma)
    hit = _points_inside_edges(np.asarray(pts, dtype=np.int64), P, Q)
    if hit:
        i, e = hit[0]
        return WeakCheck(False, f"point {i} strictly inside edge at position {e}")
    cr = _proper_crossings(P, Q)
    if cr:
        i, j = cr[0]
        return WeakCheck(False, f"edges at positions {i} and {j} properly cross")
    for dc in w.double_contacts():
        bad = _interleaved_passages(w, dc)
        if bad:
            return WeakCheck(False, f"passages {bad} through point {dc.point} cross")
    return OK


def _interleaved_passages(w: Wrap, dc: DoubleContact):
    pts = w.ps.points
    b = pts[dc.point]
    dirs = []
    for pos in dc.positions:
        a, c = w.neighbors(pos)
        pa, pc = pts[a], pts[c]
        dirs.append((pos, diamond_angle(pa[0] - b[0], pa[1] - b[1]), diamond_angle(pc[0] - b[0], pc[1] - b[1])))
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            _, a1, c1 = dirs[i]
            _, a2, c2 = dirs[j]
            if len({a1, c1, a2, c2}) < 4:
                continue
            lo, hi = min(a1, c1), max(a1, c1)
            if (lo < a2 < hi) != (lo < c2 < hi):
                return (dirs[i][0], dirs[j][0])
    return None


# --------------------------------------------------------------------------
# Metrics and equality


def perimeter(w: Wrap, ps: PointSet | None = None) -> float:
    ps = ps or w.ps
    pts = ps.points
    s = w.sigma
    return math.fsum(
        math.hypot(pts[s[i]][0] - pts[s[(i + 1) % len(s)]][0], pts[s[i]][1] - pts[s[(i + 1) % len(s)]][1])
        for i in range(len(s))
    )


def cyclic_equal(p: Sequence[int] | Wrap, q: Sequence[int] | Wrap) -> bool:
    """Equality of circular sequences up to rotation and reversal."""
    a = list(p.sigma if isinstance(p, Wrap) else p)
    b = list(q.sigma if isinstance(q, Wrap) else q)
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = a + a
    for cand in (b, b[::-1]):
        for k in range(len(a)):
            if doubled[k : k + len(a)] == cand:
                return True
    return False


def canonical_cycle(order: Sequence[int]) -> tuple:
    """Representative of a cycle under rotation and reversal (smallest rotation of either direction)."""
    seq = list(order)
    best = None
    for cand in (seq, seq[::-1]):
        k = cand.index(min(cand))
        rot = tuple(cand[k:] + cand[:k])
        if best is None or rot < best:
            best = rot
    return best


# --------------------------------------------------------------------------
# JSON I/O


def load_points(data: dict | str) -> PointSet:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        pts = data["points"]
        if not all(len(p) == 2 and all(isinstance(c, int) for c in p) for p in pts):
            raise DegenerateInput("points must be integer pairs")
        return PointSet.from_list(pts)
    except (KeyError, TypeError) as exc:
        raise DegenerateInput(f"bad point set JSON: {exc}") from exc


def dump_points(ps: PointSet, meta: dict | None = None) -> dict:
    out = {"points": [list(p) for p in ps.points]}
    if meta is not None:
        out["meta"] = meta
    return out


def load_order(data: dict | str) -> list[int]:
    if isinstance(data, str):
        data = json.loads(data)
    for key in ("order", "sigma"):
        if key in data:
            seq = data[key]
            if not all(isinstance(i, int) for i in seq):
                raise WrapError(f"{key} must be a list of integers")
            return list(seq)
    raise WrapError("expected an 'order' or 'sigma' key")


def edges_of(order: Iterable[int]) -> set[frozenset]:
    seq = list(order)
    return {frozenset((seq[i], seq[(i + 1) % len(seq)])) for i in range(len(seq))}
