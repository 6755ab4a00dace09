"""Pocket reduction, canonicalization and the polygonization-to-polygonization transform."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Optional

from .geom import convex_hull, cross
from .moves import CascadePolicy, CheckLevel, MoveEngine, MoveError, MoveRecord, choose_stretch_point
from .pockets import Pocket, hull_points_of_pocket, pocket_with_lid, pockets
from .wrap import Wrap, cyclic_equal, is_simple

log = logging.getLogger(__name__)


class PreconditionViolated(MoveError):
    pass


class SelectionFailure(MoveError):
    pass


@dataclass
class MoveBudget:
    single_pocket: list = field(default_factory=list)  # moves per single-pocket reduction
    canonical: int = 0
    hull_counts: list = field(default_factory=list)  # |points in hull(A)| before each iteration

    @property
    def reduction_moves(self) -> int:
        return sum(self.single_pocket)


def hull_edges(ps) -> list[tuple[int, int]]:
    """Hull edges of the point set in CCW order (collinear hull points split edges)."""
    b = convex_hull(ps).boundary
    return [(b[k], b[(k + 1) % len(b)]) for k in range(len(b))]


def default_lid(ps) -> tuple[int, int]:
    """Lowest-index hull edge, oriented counter-clockwise."""
    return min(hull_edges(ps), key=lambda e: tuple(sorted(e)))


def edge_position(w: Wrap, a: int, b: int) -> Optional[int]:
    s = w.sigma
    L = len(s)
    for k in range(L):
        if {s[k], s[(k + 1) % L]} == {a, b}:
            return k
    return None


def _pocket_edge_positions(w: Wrap, pk: Pocket) -> list[int]:
    """Positions in sigma of the edges along a pocket's chain."""
    s = w.sigma
    L = len(s)
    ch = pk.chain
    start = None
    for k in range(L):
        if all(s[(k + j) % L] == ch[j] for j in range(len(ch))):
            start = k
            break
    if start is None:
        rch = ch[::-1]
        for k in range(L):
            if all(s[(k + j) % L] == rch[j] for j in range(len(rch))):
                start = k
                break
    if start is None:
        raise SelectionFailure(f"pocket chain {ch} not found in {s}")
    return [(start + j) % L for j in range(len(ch) - 1)]


def _ordered_pockets(w: Wrap, after_pos: int, target_lid=None) -> list[tuple[object, list[int]]]:
    """Pockets (and the degenerate target edge) ordered cyclically along sigma after ``after_pos``."""
    L = len(w)
    items = []
    for pk in pockets(w):
        edges = _pocket_edge_positions(w, pk)
        items.append((frozenset(pk.lid), edges))
    if target_lid is not None:
        key = frozenset(target_lid)
        if not any(k == key for k, _ in items):
            pos = edge_position(w, *target_lid)
            if pos is not None:
                items.append((key, [pos]))
    items.sort(key=lambda it: (it[1][0] - after_pos) % L)
    return items


def single_pocket_reduction(
    eng: MoveEngine, lid, *, target_lid=None, budget: Optional[MoveBudget] = None
) -> list[MoveRecord]:
    """Empty the pocket with lid ``lid`` into other pockets using forward moves only."""
    ps = eng.wrap.ps
    pts = ps.points
    key = frozenset(lid)
    records = []
    first = True
    while True:
        w = eng.wrap
        A = pocket_with_lid(w, lid)
        if A is None or len(A.chain) < 3:
            break
        others = [pk for pk in pockets(w) if frozenset(pk.lid) != key]
        if first and not others and (target_lid is None or frozenset(target_lid) == key):
            raise PreconditionViolated("single pocket reduction needs a second pocket")
        first = False
        inside = hull_points_of_pocket(A, ps)
        if budget is not None:
            budget.hull_counts.append(len(inside))
        a_pos = _pocket_edge_positions(w, A)
        candidates = _pocket_corners(w, A)
        pick = None
        order = [(k, e) for k, e in _ordered_pockets(w, a_pos[-1], target_lid) if k != key]
        for v in candidates:
            vpos = w.sigma.index(v)
            for _, edges in order:
                for epos in edges:
                    x = choose_stretch_point(w, epos, v, reflex_pos=vpos)
                    if x is not None:
                        pick = (epos, v, x)
                        break
                if pick:
                    break
            if pick:
                break
        if pick is None:
            raise SelectionFailure(f"no edge-vertex pair for pocket {A.chain} in {w.sigma}")
        rec = eng.forward_move(*pick)
        records.append(rec)
        A2 = pocket_with_lid(eng.wrap, lid)
        after = hull_points_of_pocket(A2, ps) if A2 is not None else set(lid)
        if not (after < inside or (A2 is not None and len(after) < len(inside))):
            raise SelectionFailure(f"hull point count of pocket {lid} did not drop ({len(inside)} -> {len(after)})")
    if budget is not None:
        budget.single_pocket.append(len(records))
    return records


def _pocket_corners(w: Wrap, A: Pocket) -> list[int]:
    """Non-lid strict corners of hull(A) that are true corners of the polygon, lowest index first."""
    pts = w.ps.points
    chain_pts = set(A.chain)
    if len(chain_pts) < 3:
        return []
    try:
        corners = convex_hull(pts, chain_pts).corners
    except Exception:
        return []
    out = []
    for v in corners:
        if v in A.lid:
            continue
        u, x = w.neighbors(w.sigma.index(v))
        if cross(pts[u], pts[v], pts[x]) != 0:
            out.append(v)
    return sorted(out)


def pocket_reduction(eng: MoveEngine, lid, *, budget: Optional[MoveBudget] = None) -> list[MoveRecord]:
    """Reduce every pocket other than the one with lid ``lid`` (which may be a polygon edge)."""
    w = eng.wrap
    key = frozenset(lid)
    pos = edge_position(w, *lid)
    anchor = pos
    if anchor is None:
        T = pocket_with_lid(w, lid)
        if T is None:
            raise PreconditionViolated(f"{lid} is not a hull edge")
        anchor = _pocket_edge_positions(w, T)[-1]
    lids = [k for k, _ in _ordered_pockets(w, anchor) if k != key]
    lids = [tuple(next(pk.lid for pk in pockets(w) if frozenset(pk.lid) == k)) for k in lids]
    records = []
    for other in lids:
        records += single_pocket_reduction(eng, other, target_lid=lid, budget=budget)
    return records


def canonical_order(ps, lid) -> list[int]:
    """Non-hull points swept clockwise about a = lid[0] so the sweep ends at b = lid[1].

    Points on a common line through a are listed nearest first.
    """
    a, _ = lid
    pts = ps.points
    pa = pts[a]
    on_hull = convex_hull(ps).on_hull
    pocket = [i for i in range(len(pts)) if i not in on_hull]

    def cmp(i, j):
        c = cross(pa, pts[i], pts[j])
        if c != 0:
            return -1 if c < 0 else 1
        di = (pts[i][0] - pa[0]) ** 2 + (pts[i][1] - pa[1]) ** 2
        dj = (pts[j][0] - pa[0]) ** 2 + (pts[j][1] - pa[1]) ** 2
        return -1 if di < dj else 1

    return sorted(pocket, key=cmp_to_key(cmp))


def orient_lid(ps, lid) -> tuple[int, int]:
    """Return the lid as the counter-clockwise hull edge (a, b)."""
    for e in hull_edges(ps):
        if set(e) == set(lid):
            return e
    raise PreconditionViolated(f"{lid} is not a hull edge")


def initial_polygonization(ps, lid=None) -> Wrap:
    """The canonical one-pocket polygonization with the given hull-edge lid."""
    lid = orient_lid(ps, lid if lid is not None else default_lid(ps))
    a, b = lid
    boundary = list(convex_hull(ps).boundary)
    k = boundary.index(b)
    hull_path = boundary[k:] + boundary[:k]  # b ... a, counter-clockwise
    assert hull_path[-1] == a
    order = hull_path + canonical_order(ps, lid)
    w = Wrap(ps, order)
    if not is_simple(w.sigma, ps):
        raise MoveError(f"canonical polygonization is not simple: {order}")
    return w


def _pocket_chain_from(w: Wrap, a: int, b: int) -> list[int]:
    """Chain of the pocket with lid (a, b), oriented from a to b."""
    pk = pocket_with_lid(w, (a, b))
    if pk is None:
        return [a, b]
    ch = list(pk.chain)
    return ch if ch[0] == a else ch[::-1]


@dataclass
class CanonicalForm:
    lid: tuple
    polygon: Wrap
    moves: int
    prefix_ok: bool = True


def canonical_polygonization(eng: MoveEngine, lid, *, budget: Optional[MoveBudget] = None) -> CanonicalForm:
    ps = eng.wrap.ps
    lid = orient_lid(ps, lid)
    a, b = lid
    others = [pk for pk in pockets(eng.wrap) if set(pk.lid) != set(lid)]
    if others:
        raise PreconditionViolated("canonicalization needs a single-pocket polygonization")
    order = canonical_order(ps, lid)
    rank = {v: r for r, v in enumerate([a] + order + [b])}
    v_seq = [a] + order
    moves = 0
    prefix_ok = True
    for i in range(1, len(order) + 1):
        chain = _pocket_chain_from(eng.wrap, a, b)
        prev, cur = v_seq[i - 1], v_seq[i]
        k = chain.index(prev)
        succ = chain[k + 1]
        if succ != cur:
            epos = edge_position(eng.wrap, prev, succ)
            vpos = eng.wrap.sigma.index(cur)
            x = choose_stretch_point(eng.wrap, epos, cur, reflex_pos=vpos)
            if x is None:
                raise SelectionFailure(f"vertex {cur} cannot see edge ({prev}, {succ}) on its reflex side")
            start = len(eng.journal)
            eng.forward_move(epos, cur, x, require_true_corner=False)
            moves += 1
            for rec in eng.journal[start:]:
                for ev in rec.events:
                    if getattr(ev, "kind", "") == "twang" and rank.get(ev.b, len(rank)) < i:
                        prefix_ok = False
        chain = _pocket_chain_from(eng.wrap, a, b)
        if chain[: i + 1] != v_seq[: i + 1]:
            prefix_ok = False
            raise MoveError(f"prefix {v_seq[:i + 1]} not consecutive after iteration {i}: {chain}")
    if budget is not None:
        budget.canonical += moves
    return CanonicalForm(lid, eng.wrap, moves, prefix_ok)


@dataclass
class TransformResult:
    final: Wrap
    ok: bool
    forward_moves: int
    reverse_moves: int
    atomic_moves: int
    lid: tuple
    journal: list
    budget_1: MoveBudget
    budget_2: MoveBudget

    @property
    def moves(self) -> int:
        return self.forward_moves + self.reverse_moves


def reduce_to_canonical(eng: MoveEngine, lid, budget: Optional[MoveBudget] = None) -> CanonicalForm:
    pocket_reduction(eng, lid, budget=budget)
    return canonical_polygonization(eng, lid, budget=budget)


def transform(
    p1: Wrap,
    p2: Wrap,
    policy: CascadePolicy | None = None,
    check_level: CheckLevel | str | None = None,
    lid=None,
    observers=(),
) -> TransformResult:
    """Carry p1 to p2: reduce both to the canonical form, then replay p2's moves in reverse."""
    ps = p1.ps
    if p2.ps != ps:
        raise PreconditionViolated("polygonizations of different point sets")
    lid = orient_lid(ps, lid if lid is not None else default_lid(ps))
    target = p2
    if (p1.signed_area2() > 0) != (p2.signed_area2() > 0):
        target = p2.reversed()
    eng2 = MoveEngine(target.copy(), policy, check_level)
    eng2.observers.extend(observers)
    b2 = MoveBudget()
    reduce_to_canonical(eng2, lid, b2)
    eng1 = MoveEngine(p1.copy(), policy, check_level)
    eng1.observers.extend(observers)
    b1 = MoveBudget()
    reduce_to_canonical(eng1, lid, b1)
    if eng1.wrap.sigma != eng2.wrap.sigma:
        raise MoveError(f"canonical forms differ: {eng1.wrap.sigma} vs {eng2.wrap.sigma}")
    forward = len(eng1.journal)
    back = [r for r in eng2.journal if r.kind == "forward"]
    for rec in reversed(back):
        eng1.reverse_move(rec)
    ok = eng1.wrap.sigma == target.sigma and cyclic_equal(eng1.wrap, p2)
    atomic = sum(len(r.events) for r in eng1.journal)
    return TransformResult(eng1.wrap, ok, forward, len(back), atomic, lid, eng1.journal, b1, b2)
