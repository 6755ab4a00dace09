"""Stretches, twangs, cascades and forward/reverse moves on polygonal wraps.

Every atomic operation returns a new :class:`Wrap` plus an event that records
exactly where the sequence was spliced, so any event can be undone and any
trace can be replayed bit for bit.
"""

from __future__ import annotations

import enum
import logging
import os
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .geom import (
    GeometryStats,
    NonSimpleResult,
    TwangPreconditionViolated,
    convex_hull,
    cross,
    geometry_stats,
    on_open_segment,
    point_on_edge,
    properly_cross,
    sp_chain,
    visible_interval,
)
from .wrap import Wrap, diamond_angle, is_simple, perimeter, weak_simplicity_check

log = logging.getLogger(__name__)


class MoveError(RuntimeError):
    pass


class VisibilityViolated(MoveError):
    pass


class ReflexSideViolated(MoveError):
    pass


class StuckCascade(MoveError):
    pass


class CascadeCapExceeded(MoveError):
    pass


class ReversalMismatch(MoveError):
    pass


class InvariantViolation(MoveError):
    pass


class CheckLevel(enum.IntEnum):
    OFF = 0
    BOUNDARIES = 1
    EVERY_ATOMIC = 2

    @classmethod
    def parse(cls, value) -> "CheckLevel":
        if isinstance(value, CheckLevel):
            return value
        return cls[str(value).strip().upper().replace("-", "_")]


def default_check_level(fallback: CheckLevel = CheckLevel.EVERY_ATOMIC) -> CheckLevel:
    env = os.environ.get("POLYWRAP_CHECK_LEVEL")
    return CheckLevel.parse(env) if env else fallback


# --------------------------------------------------------------------------
# Events


@dataclass(frozen=True)
class StretchEvent:
    pos: int  # position of the edge's first endpoint (or of the zero-length edge)
    a: int
    b: int
    v: int
    x: tuple  # rational point on the edge
    chains: tuple  # (interior of chain a..v, interior of chain v..b)

    kind = "stretch"

    @property
    def inserted(self) -> list[int]:
        if self.a == self.b:
            return [self.v, self.a]
        return list(self.chains[0]) + [self.v] + list(self.chains[1])

    def undo_splice(self, sigma: list[int]) -> list[int]:
        k = len(self.inserted)
        return sigma[: self.pos + 1] + sigma[self.pos + 1 + k :]

    def to_json(self) -> dict:
        x = [Fraction(c) for c in self.x]
        return {
            "op": "stretch",
            "pos": self.pos,
            "edge": [self.a, self.b],
            "v": self.v,
            "x": [x[0].numerator, x[0].denominator, x[1].numerator, x[1].denominator],
            "chains": [list(self.chains[0]), list(self.chains[1])],
        }


@dataclass(frozen=True)
class TwangEvent:
    pos: int  # position of the twang vertex b
    a: int
    b: int
    c: int
    chain: tuple  # full replacement chain a..c ((a,) for a hairpin)

    kind = "twang"

    @property
    def hairpin(self) -> bool:
        return self.a == self.c

    def undo_splice(self, sigma: list[int]) -> list[int]:
        if self.hairpin:
            return sigma[: self.pos] + [self.b, self.a] + sigma[self.pos :]
        k = len(self.chain) - 2
        return sigma[: self.pos] + [self.b] + sigma[self.pos + k :]

    def to_json(self) -> dict:
        return {"op": "twang", "pos": self.pos, "a": self.a, "b": self.b, "c": self.c, "chain": list(self.chain)}


Event = StretchEvent | TwangEvent


def event_from_json(d: dict) -> Event:
    if d["op"] == "stretch":
        xn, xd, yn, yd = d["x"]
        return StretchEvent(
            d["pos"], d["edge"][0], d["edge"][1], d["v"], (Fraction(xn, xd), Fraction(yn, yd)),
            (tuple(d["chains"][0]), tuple(d["chains"][1])),
        )
    if d["op"] == "twang":
        return TwangEvent(d["pos"], d["a"], d["b"], d["c"], tuple(d["chain"]))
    raise ValueError(f"unknown op {d['op']!r}")


# --------------------------------------------------------------------------
# Visibility and stretch


def _incident_segments(w: Wrap):
    return w.edge_coords()


def stretch_intervals(w: Wrap, pos: int, v: int) -> list[tuple[Fraction, Fraction]]:
    """Clearly visible open parameter intervals of edge ``pos`` as seen from point ``v``."""
    pts = w.ps.points
    a, b = w.sigma[pos], w.sigma[(pos + 1) % len(w)]
    if v in (a, b):
        return []
    return visible_interval(pts[v], pts[a], pts[b], _incident_segments(w))


def _in_closed_sector(d, du, dw) -> bool:
    """Direction d inside the closed convex sector spanned by du and dw (angle < pi)."""
    s = cross((0, 0), du, dw)
    if s == 0:
        return False
    s = 1 if s > 0 else -1
    return s * cross((0, 0), du, d) >= 0 and s * cross((0, 0), d, dw) >= 0


def on_reflex_side(w: Wrap, vpos: int, x) -> bool:
    """Whether point x lies strictly on the reflex side of the vertex at position vpos."""
    pts = w.ps.points
    u, wn = w.neighbors(vpos)
    pv = pts[w.sigma[vpos]]
    du = (pts[u][0] - pv[0], pts[u][1] - pv[1])
    dw = (pts[wn][0] - pv[0], pts[wn][1] - pv[1])
    d = (x[0] - pv[0], x[1] - pv[1])
    if cross((0, 0), du, dw) == 0:
        return True
    return not _in_closed_sector(d, du, dw)


def choose_stretch_point(w: Wrap, pos: int, v: int, reflex_pos: Optional[int] = None):
    """Midpoint of the longest clearly visible sub-interval of edge ``pos``.

    With ``reflex_pos`` set, only intervals on the reflex side of the vertex at
    that position qualify. Returns None when nothing qualifies.
    """
    pts = w.ps.points
    a, b = w.sigma[pos], w.sigma[(pos + 1) % len(w)]
    if reflex_pos is not None and not on_reflex_side(w, reflex_pos, pts[a]) and not on_reflex_side(w, reflex_pos, pts[b]):
        return None  # the whole edge lies in the convex sector
    best = None
    for lo, hi in stretch_intervals(w, pos, v):
        mid = (lo + hi) / 2
        x = point_on_edge(pts[a], pts[b], mid)
        if reflex_pos is not None and not on_reflex_side(w, reflex_pos, x):
            continue
        if best is None or hi - lo > best[0]:
            best = (hi - lo, x)
    return None if best is None else best[1]


def _param_of(pa, pb, x) -> Fraction:
    if pb[0] != pa[0]:
        return Fraction(x[0] - pa[0]) / (pb[0] - pa[0])
    return Fraction(x[1] - pa[1]) / (pb[1] - pa[1])


def stretch(w: Wrap, pos: int, v: int, x=None) -> tuple[Wrap, StretchEvent]:
    """Stretch the edge starting at position ``pos`` out to point ``v`` through x.

    The two pseudovertex twangs are taken in their limit form: the edge is
    replaced by a, C1, v, C2, b where C1 and C2 are the tight chains inside
    triangles (a, x, v) and (v, x, b).
    """
    pts = w.ps.points
    L = len(w)
    a, b = w.sigma[pos], w.sigma[(pos + 1) % L]
    if v in (a, b):
        raise VisibilityViolated(f"stretch vertex {v} is an endpoint of edge ({a}, {b})")
    if x is None:
        x = choose_stretch_point(w, pos, v)
        if x is None:
            raise VisibilityViolated(f"{v} sees no point of edge ({a}, {b})")
    else:
        x = (Fraction(x[0]), Fraction(x[1]))
        t = _param_of(pts[a], pts[b], x)
        if cross(pts[a], pts[b], x) != 0 or not any(lo < t < hi for lo, hi in stretch_intervals(w, pos, v)):
            raise VisibilityViolated(f"{v} does not clearly see {x} on edge ({a}, {b})")
    c1 = sp_chain(a, x, v, pts)
    c2 = sp_chain(v, x, b, pts)
    ev = StretchEvent(pos, a, b, v, x, (tuple(c1[1:-1]), tuple(c2[1:-1])))
    sigma = list(w.sigma)
    sigma[pos + 1 : pos + 1] = ev.inserted
    return Wrap(w.ps, sigma, normalize=False), ev


def zero_length_stretch(w: Wrap, pos: int, v: int) -> tuple[Wrap, StretchEvent]:
    """Stretch a zero-length edge at the occurrence ``pos`` of point a out to v, giving a, v, a."""
    a = w.sigma[pos]
    ev = StretchEvent(pos, a, a, v, w.ps.points[a], ((), ()))
    sigma = list(w.sigma)
    sigma[pos + 1 : pos + 1] = ev.inserted
    return Wrap(w.ps, sigma, normalize=False), ev


# --------------------------------------------------------------------------
# Passage ordering at a double contact


def _refine(w: Wrap, pos1: int, step1: int, pos2: int, step2: int) -> Optional[int]:
    """Order two walks leaving the same point in the same first direction.

    Returns +1 if walk 1 lies counter-clockwise of walk 2 at their common start
    (to its left), -1 if clockwise, None if the walks never separate in a
    decidable way.
    """
    s = w.sigma
    L = len(s)
    pts = w.ps.points
    k = 1
    while k < L and s[(pos1 + step1 * k) % L] == s[(pos2 + step2 * k) % L]:
        k += 1
    if k >= L or k < 2:
        return None
    q = s[(pos1 + step1 * (k - 2)) % L]
    p = s[(pos1 + step1 * (k - 1)) % L]
    n1 = s[(pos1 + step1 * k) % L]
    n2 = s[(pos2 + step2 * k) % L]
    if n1 == q or n2 == q:
        return None
    P = pts[p]
    back = diamond_angle(pts[q][0] - P[0], pts[q][1] - P[1])
    a1 = (diamond_angle(pts[n1][0] - P[0], pts[n1][1] - P[1]) - back) % 4
    a2 = (diamond_angle(pts[n2][0] - P[0], pts[n2][1] - P[1]) - back) % 4
    if a1 == a2:
        return None
    return 1 if a1 > a2 else -1


class Nesting(enum.Enum):
    FREE = "free"
    NESTED = "nested"
    AMBIGUOUS = "ambiguous"


def _first_dir(w: Wrap, pos: int, step: int) -> Fraction:
    pts = w.ps.points
    b = pts[w.sigma[pos]]
    n = pts[w.sigma[(pos + step) % len(w)]]
    return diamond_angle(n[0] - b[0], n[1] - b[1])


def nesting_at(w: Wrap, pos: int) -> Nesting:
    """Whether another passage through the point at ``pos`` sits inside its twang triangle."""
    pts = w.ps.points
    b = w.sigma[pos]
    a, c = w.neighbors(pos)
    others = [p for p in w.positions(b) if p != pos]
    if not others:
        return Nesting.FREE
    A, C = (pos, -1), (pos, 1)
    if a == c:
        r = _refine(w, pos, -1, pos, 1)
        if r is None:
            return Nesting.AMBIGUOUS
        start, end = (C, A) if r > 0 else (A, C)
    else:
        s = cross(pts[b], pts[a], pts[c])
        if s == 0:
            return Nesting.FREE
        start, end = (A, C) if s > 0 else (C, A)
    ds = _first_dir(w, *start)
    de = _first_dir(w, *end)
    ambiguous = False

    def in_arc(ray) -> Optional[bool]:
        dr = _first_dir(w, *ray)
        if dr == ds:
            r = _refine(w, ray[0], ray[1], start[0], start[1])
            if r is None:
                return None
            if r < 0:
                return False
        if dr == de:
            r = _refine(w, ray[0], ray[1], end[0], end[1])
            if r is None:
                return None
            return r < 0
        if dr == ds:
            return True
        return 0 < (dr - ds) % 4 < (de - ds) % 4

    for o in others:
        ins = [in_arc((o, -1)), in_arc((o, 1))]
        if None in ins:
            ambiguous = True
        elif all(ins):
            return Nesting.NESTED
    return Nesting.AMBIGUOUS if ambiguous else Nesting.FREE


# --------------------------------------------------------------------------
# Twang


def twang(w: Wrap, pos: int, *, allow_straight: bool = False, check_nested: bool = True) -> tuple[Wrap, TwangEvent]:
    """Twang the occurrence of a double-contact point at position ``pos``."""
    pts = w.ps.points
    s = w.sigma
    L = len(s)
    b = s[pos]
    a, c = w.neighbors(pos)
    if pos == 0:
        raise TwangPreconditionViolated("the anchor point never twangs")
    if s.count(b) < 2:
        raise TwangPreconditionViolated(f"point {b} is not in double contact")
    if check_nested and nesting_at(w, pos) is Nesting.NESTED:
        raise TwangPreconditionViolated(f"nested double contact at point {b}")
    sigma = list(s)
    if a == c:
        ev = TwangEvent(pos, a, b, c, (a,))
        if pos + 1 >= L:
            raise TwangPreconditionViolated("hairpin around the anchor")
        del sigma[pos : pos + 2]
        return Wrap(w.ps, sigma, normalize=False), ev
    if cross(pts[a], pts[b], pts[c]) == 0:
        if not (allow_straight and on_open_segment(pts[b], pts[a], pts[c])):
            raise TwangPreconditionViolated(f"collinear triple ({a}, {b}, {c})")
        chain = [a, c]
    else:
        chain = sp_chain(a, pts[b], c, pts, exclude=(b,))
    _assert_no_crossing(w, pos, chain)
    ev = TwangEvent(pos, a, b, c, tuple(chain))
    sigma[pos : pos + 1] = chain[1:-1]
    return Wrap(w.ps, sigma, normalize=False), ev


def _assert_no_crossing(w: Wrap, pos: int, chain: list[int]) -> None:
    pts = w.ps.points
    L = len(w)
    skip = {(pos - 1) % L, pos}
    segs = [(pts[chain[k]], pts[chain[k + 1]]) for k in range(len(chain) - 1)]
    for e, (p, q) in enumerate(w.edge_coords()):
        if e in skip:
            continue
        for u, v in segs:
            if properly_cross(u, v, p, q):
                raise NonSimpleResult(f"twang chain {chain} crosses edge at position {e}")


def twang_candidates(w: Wrap, b: int) -> tuple[list[int], list[int]]:
    """Positions of ``b`` that can twang, split into definite and ambiguous ones.

    Sorted by (position of a, position of c).
    """
    L = len(w)
    pts = w.ps.points
    good, maybe = [], []
    for pos in sorted(w.positions(b), key=lambda p: ((p - 1) % L, (p + 1) % L)):
        if pos == 0:
            continue
        a, c = w.neighbors(pos)
        if a != c and cross(pts[a], pts[b], pts[c]) == 0:
            continue
        nest = nesting_at(w, pos)
        if nest is Nesting.FREE:
            good.append(pos)
        elif nest is Nesting.AMBIGUOUS:
            maybe.append(pos)
    return good, maybe


# --------------------------------------------------------------------------
# Engine: cascades, moves, journaling and checks


@dataclass
class CascadePolicy:
    name: str = "fifo"
    seed: int = 0

    def rng(self) -> random.Random:
        return random.Random(self.seed)


@dataclass
class MoveRecord:
    kind: str  # "forward" or "reverse"
    pre: tuple
    post: tuple = ()
    events: list = field(default_factory=list)

    @property
    def twangs(self) -> int:
        return sum(1 for e in self.events if isinstance(e, TwangEvent))

    @property
    def cascade_length(self) -> int:
        """Number of twangs the move performed, the stretch vertex's own included."""
        return self.twangs


@dataclass
class EngineStats:
    twangs: int = 0
    stretches: int = 0
    forward_moves: int = 0
    reverse_moves: int = 0
    hull_twangs: int = 0
    perimeter_violations: int = 0
    weak_violations: int = 0


class MoveEngine:
    """Owns one wrap and its journal; applies atomic and composite moves.

    ``observers`` are called as ``fn(before, after, event)`` after every atomic
    event, which is how pocket-vector and hull-nesting monitors hook in.
    """

    def __init__(
        self,
        wrap: Wrap,
        policy: CascadePolicy | None = None,
        check_level: CheckLevel | str | None = None,
        cascade_cap: Optional[int] = None,
        geometry: Optional[GeometryStats] = None,
    ):
        self.wrap = wrap
        self.policy = policy or CascadePolicy()
        self.check_level = CheckLevel.parse(check_level) if check_level is not None else default_check_level()
        n = wrap.ps.n
        self.cascade_cap = cascade_cap if cascade_cap is not None else max(n**4, 1000)
        self._rng = self.policy.rng()
        self._geometry = geometry
        self.journal: list[MoveRecord] = []
        self.stats = EngineStats()
        self.observers: list[Callable] = []
        self._hull = convex_hull(wrap.ps).on_hull
        self._record: Optional[MoveRecord] = None
        # called as injector(engine) between cascade steps; may return (pos, v, x) to stretch
        self.injector: Optional[Callable] = None

    @property
    def geometry(self) -> GeometryStats:
        if self._geometry is None:
            self._geometry = _cached_geometry(self.wrap.ps)
        return self._geometry

    # -- atomic steps ----------------------------------------------------

    def _after(self, before: Wrap, after: Wrap, ev: Event) -> None:
        if self.check_level >= CheckLevel.EVERY_ATOMIC:
            chk = weak_simplicity_check(after)
            if not chk:
                self.stats.weak_violations += 1
                raise InvariantViolation(f"weak simplicity lost after {ev.to_json()}: {chk.description}")
            if isinstance(ev, TwangEvent) and not _is_straight(before, ev):
                drop = perimeter(before) - perimeter(after)
                if drop < self.geometry.twang_bound - 1e-9:
                    self.stats.perimeter_violations += 1
                    raise InvariantViolation(
                        f"twang {ev.to_json()} shortened perimeter by {drop}, bound {self.geometry.twang_bound}"
                    )
        if isinstance(ev, TwangEvent):
            self.stats.twangs += 1
            if ev.b in self._hull:
                self.stats.hull_twangs += 1
        else:
            self.stats.stretches += 1
        if self._record is not None:
            self._record.events.append(ev)
        for fn in self.observers:
            fn(before, after, ev)

    def apply_stretch(self, pos: int, v: int, x=None) -> StretchEvent:
        before = self.wrap
        after, ev = stretch(before, pos, v, x)
        self.wrap = after
        self._after(before, after, ev)
        return ev

    def apply_zero_stretch(self, pos: int, v: int) -> StretchEvent:
        before = self.wrap
        after, ev = zero_length_stretch(before, pos, v)
        self.wrap = after
        self._after(before, after, ev)
        return ev

    def apply_twang(self, pos: int, **kw) -> TwangEvent:
        before = self.wrap
        after, ev = twang(before, pos, **kw)
        self.wrap = after
        self._after(before, after, ev)
        return ev

    def replay(self, ev: Event) -> Event:
        """Re-execute a recorded event and check it reproduces the same splice."""
        if isinstance(ev, StretchEvent):
            if ev.a == ev.b:
                got = self.apply_zero_stretch(ev.pos, ev.v)
            else:
                got = self.apply_stretch(ev.pos, ev.v, ev.x)
        else:
            got = self.apply_twang(ev.pos, allow_straight=True, check_nested=False)
        if got != ev:
            raise ReversalMismatch(f"replayed {got.to_json()} differs from recorded {ev.to_json()}")
        return got

    # -- cascade ---------------------------------------------------------

    def cascade(self) -> int:
        """Twang until no double contact remains; returns the number of twangs."""
        count = 0
        queue = deque()
        seen = set()
        for dc in sorted(self.wrap.double_contacts(), key=lambda d: d.positions[0]):
            queue.append(dc.point)
            seen.add(dc.point)
        stalled = 0
        while queue:
            if self.injector is not None:
                extra = self.injector(self)
                if extra is not None:
                    ev = self.apply_stretch(*extra)
                    counts = self.wrap.counts()
                    for i in ev.inserted:
                        if counts[i] > 1 and i not in seen:
                            queue.append(i)
                            seen.add(i)
            if self.policy.name == "random":
                k = self._rng.randrange(len(queue))
                queue.rotate(-k)
            b = queue.popleft()
            seen.discard(b)
            if self.wrap.sigma.count(b) < 2:
                continue
            pos = self._pick_occurrence(b)
            if pos is None:
                queue.append(b)
                seen.add(b)
                stalled += 1
                if stalled > len(queue):
                    raise StuckCascade(f"no twangable occurrence among {list(queue)} in {self.wrap.sigma}")
                continue
            stalled = 0
            before_counts = self.wrap.counts()
            ev = self.apply_twang(pos)
            count += 1
            if count > self.cascade_cap:
                raise CascadeCapExceeded(f"cascade exceeded {self.cascade_cap} twangs")
            after_counts = self.wrap.counts()
            for i in ev.chain[1:-1]:
                if after_counts[i] > 1 and before_counts[i] <= 1 and i not in seen:
                    queue.append(i)
                    seen.add(i)
            for i in ev.chain[1:-1] + (b,):
                if after_counts[i] > 1 and i not in seen:
                    queue.append(i)
                    seen.add(i)
        return count

    def _pick_occurrence(self, b: int) -> Optional[int]:
        good, maybe = twang_candidates(self.wrap, b)
        if self.policy.name == "random":
            self._rng.shuffle(good)
        counts = self.wrap.counts()
        for pos in good:
            a, c = self.wrap.neighbors(pos)
            if counts[a] < 2 and counts[c] < 2:
                return pos
            # a new segment ending at another double contact may cross the passage there
            try:
                trial, _ = twang(self.wrap, pos, check_nested=False)
            except (TwangPreconditionViolated, NonSimpleResult):
                continue
            if weak_simplicity_check(trial):
                return pos
        for pos in maybe:
            try:
                trial, _ = twang(self.wrap, pos, check_nested=False)
            except (TwangPreconditionViolated, NonSimpleResult):
                continue
            if weak_simplicity_check(trial):
                log.debug("ambiguous nesting at %s resolved by trial twang", b)
                return pos
        return None

    # -- composite moves -------------------------------------------------

    def forward_move(self, pos: int, v: int, x=None, *, require_true_corner: bool = True) -> MoveRecord:
        """Stretch edge ``pos`` to vertex v on its reflex side, twang v's old occurrence, cascade."""
        w = self.wrap
        if not w.is_polygonization():
            raise MoveError("forward moves start from a polygonization")
        pts = w.ps.points
        vpos = w.sigma.index(v)
        if vpos == 0:
            raise MoveError("the anchor point keeps its place; it cannot be the moved vertex")
        u, wn = w.neighbors(vpos)
        straight = cross(pts[u], pts[v], pts[wn]) == 0
        if straight and require_true_corner:
            raise ReflexSideViolated(f"vertex {v} is collinear with its neighbours")
        if x is None:
            x = choose_stretch_point(w, pos, v, reflex_pos=vpos)
            if x is None:
                raise VisibilityViolated(f"{v} sees no point of edge {pos} on its reflex side")
        elif not on_reflex_side(w, vpos, x):
            raise ReflexSideViolated(f"{x} is not on the reflex side of {v}")
        rec = MoveRecord("forward", tuple(w.sigma))
        self._record = rec
        try:
            ev = self.apply_stretch(pos, v, x)
            if vpos > pos:
                vpos += len(ev.inserted)
            self.apply_twang(vpos, allow_straight=straight)
            self.cascade()
        finally:
            self._record = None
        rec.post = tuple(self.wrap.sigma)
        if self.check_level >= CheckLevel.BOUNDARIES and not is_simple(self.wrap.sigma, self.wrap.ps):
            raise InvariantViolation(f"forward move produced a non-simple polygon {self.wrap.sigma}")
        self.journal.append(rec)
        self.stats.forward_moves += 1
        return rec

    def stretch_move(self, pos: int, v: int, x=None) -> MoveRecord:
        """Stretch edge ``pos`` to v and let the cascade pick which occurrences twang."""
        w = self.wrap
        if x is None:
            x = choose_stretch_point(w, pos, v)
            if x is None:
                raise VisibilityViolated(f"{v} sees no point of edge {pos}")
        rec = MoveRecord("forward", tuple(w.sigma))
        self._record = rec
        try:
            self.apply_stretch(pos, v, x)
            self.cascade()
        finally:
            self._record = None
        rec.post = tuple(self.wrap.sigma)
        if self.check_level >= CheckLevel.BOUNDARIES and not is_simple(self.wrap.sigma, self.wrap.ps):
            raise InvariantViolation(f"stretch move produced a non-simple polygon {self.wrap.sigma}")
        self.journal.append(rec)
        self.stats.forward_moves += 1
        return rec

    def reverse_move(self, rec: MoveRecord) -> MoveRecord:
        """Undo a journaled forward move with stretches and twangs only."""
        if tuple(self.wrap.sigma) != rec.post:
            raise ReversalMismatch("current state is not the move's post-state")
        out = MoveRecord("reverse", rec.post)
        self._record = out
        try:
            for ev in reversed(rec.events):
                if isinstance(ev, TwangEvent):
                    self._reverse_twang(ev)
                else:
                    self._reverse_stretch(ev)
        finally:
            self._record = None
        out.post = tuple(self.wrap.sigma)
        if out.post != rec.pre:
            raise ReversalMismatch(f"reverse move gave {list(out.post)}, expected {list(rec.pre)}")
        self.journal.append(out)
        self.stats.reverse_moves += 1
        return out

    def _reverse_stretch(self, ev: StretchEvent) -> None:
        target = ev.undo_splice(self.wrap.sigma)
        block = [ev.pos + 1 + k for k in range(len(ev.inserted))]
        if ev.a == ev.b:
            # a, v, a: the hairpin at v twangs it away
            self.apply_twang(block[0])
            block = []
        while block:
            progressed = False
            cand = sorted(block, key=lambda p: (self.wrap.sigma[p] != ev.v, p))
            for p in cand:
                if self._clean_twang_ok(p):
                    self.apply_twang(p, allow_straight=True)
                    block.remove(p)
                    block = [q - 1 if q > p else q for q in block]
                    progressed = True
                    break
            if not progressed:
                raise ReversalMismatch(f"cannot unwind stretch {ev.to_json()} from {self.wrap.sigma}")
        if self.wrap.sigma != target:
            raise ReversalMismatch(f"reverse stretch gave {self.wrap.sigma}, expected {target}")

    def _clean_twang_ok(self, pos: int) -> bool:
        """A twang at ``pos`` is legal and removes just that occurrence (empty triangle)."""
        w = self.wrap
        if pos == 0 or w.sigma.count(w.sigma[pos]) < 2:
            return False
        a, c = w.neighbors(pos)
        pts = w.ps.points
        if a != c and on_open_segment(pts[w.sigma[pos]], pts[a], pts[c]):
            return False  # would leave the point inside the new edge
        try:
            trial, tev = twang(w, pos, allow_straight=True)
        except (TwangPreconditionViolated, NonSimpleResult):
            return False
        return len(tev.chain) <= 2

    def _reverse_twang(self, ev: TwangEvent) -> None:
        target = ev.undo_splice(self.wrap.sigma)
        if ev.hairpin:
            self.apply_zero_stretch(ev.pos - 1, ev.b)
        else:
            self._untwang(ev)
        if self.wrap.sigma != target:
            raise ReversalMismatch(f"reverse twang gave {self.wrap.sigma}, expected {target}")

    def _untwang(self, ev: TwangEvent) -> None:
        k = len(ev.chain) - 2
        start = ev.pos - 1  # position of a
        saved = (self.wrap, self.stats.twangs, self.stats.stretches)
        rec_len = len(self._record.events) if self._record is not None else 0
        for i in range(k + 1):
            epos = start + i
            x = choose_stretch_point(self.wrap, epos, ev.b)
            if x is None:
                continue
            _, sev = stretch(self.wrap, epos, ev.b, x)
            if sev.chains != ((), ()):
                continue
            try:
                self.apply_stretch(epos, ev.b, x)
                # chain vertices past the stretched edge shift by the inserted b
                residual = list(range(start + 1, start + 1 + i)) + [
                    p + 1 for p in range(start + 1 + i, start + 1 + k)
                ]
                self._unwind(residual)
                return
            except ReversalMismatch:
                self.wrap, self.stats.twangs, self.stats.stretches = saved
                if self._record is not None:
                    del self._record.events[rec_len:]
        raise ReversalMismatch(f"no stretch edge reverses twang {ev.to_json()}")

    def _unwind(self, block: list[int]) -> None:
        while block:
            for p in block:
                if self._clean_twang_ok(p):
                    self.apply_twang(p, allow_straight=True)
                    block = [q - 1 if q > p else q for q in block if q != p]
                    break
            else:
                raise ReversalMismatch(f"residual chain stuck at {block} in {self.wrap.sigma}")


def _is_straight(before: Wrap, ev: TwangEvent) -> bool:
    if ev.hairpin:
        return False
    pts = before.ps.points
    return cross(pts[ev.a], pts[ev.b], pts[ev.c]) == 0


_GEOM_CACHE: dict = {}


def _cached_geometry(ps) -> GeometryStats:
    g = _GEOM_CACHE.get(ps.points)
    if g is None:
        if len(_GEOM_CACHE) > 256:
            _GEOM_CACHE.clear()
        g = _GEOM_CACHE[ps.points] = geometry_stats(ps)
    return g


# --------------------------------------------------------------------------
# Stand-alone functional forms


def twang_cascade(w: Wrap, policy: CascadePolicy | None = None, **kw) -> tuple[Wrap, list[Event]]:
    eng = MoveEngine(w.copy(), policy, **kw)
    rec = MoveRecord("cascade", tuple(w.sigma))
    eng._record = rec
    eng.cascade()
    return eng.wrap, rec.events


def forward_move(p: Wrap, pos: int, v: int, policy: CascadePolicy | None = None, **kw) -> tuple[Wrap, MoveRecord]:
    eng = MoveEngine(p.copy(), policy, **{k: kw.pop(k) for k in ("check_level", "cascade_cap") if k in kw})
    rec = eng.forward_move(pos, v, **kw)
    return eng.wrap, rec


def reverse_move(p: Wrap, rec: MoveRecord, **kw) -> Wrap:
    eng = MoveEngine(p.copy(), **kw)
    eng.reverse_move(rec)
    return eng.wrap


def reverse_stretch(w: Wrap, ev: StretchEvent, **kw) -> Wrap:
    eng = MoveEngine(w.copy(), **kw)
    eng._reverse_stretch(ev)
    return eng.wrap


def reverse_twang(w: Wrap, ev: TwangEvent, **kw) -> Wrap:
    eng = MoveEngine(w.copy(), **kw)
    eng._reverse_twang(ev)
    return eng.wrap


def swap_valid(p: Wrap, i: int) -> bool:
    """Transposing positions i and i+1 keeps the polygon simple."""
    s = list(p.sigma)
    L = len(s)
    j = (i + 1) % L
    s[i], s[j] = s[j], s[i]
    return is_simple(s, p.ps)


def hop_valid(p: Wrap, pos: int, v: int) -> bool:
    """Hop(e, v): v's neighbour triangle and the (e, v) triangle on v's reflex side are empty."""
    from .geom import DegenerateTriangle, Location, point_in_triangle

    pts = p.ps.points
    s = p.sigma
    L = len(s)
    a, b = s[pos], s[(pos + 1) % L]
    if v in (a, b):
        return False
    vpos = s.index(v)
    u, w = p.neighbors(vpos)
    if cross(pts[u], pts[v], pts[w]) == 0:
        return False

    def empty(tri, corners):
        try:
            return all(
                point_in_triangle(pts[i], *tri) is Location.OUTSIDE for i in range(len(pts)) if i not in corners
            )
        except DegenerateTriangle:
            return False

    if not empty((pts[u], pts[v], pts[w]), {u, v, w}):
        return False
    if not empty((pts[a], pts[b], pts[v]), {a, b, v}):
        return False
    mid = ((Fraction(pts[a][0]) + pts[b][0]) / 2, (Fraction(pts[a][1]) + pts[b][1]) / 2)
    if not on_reflex_side(p, vpos, mid):
        return False
    trial = list(s)
    trial.remove(v)
    k = trial.index(a)
    if trial[(k + 1) % len(trial)] == b:
        trial.insert(k + 1, v)
    else:
        trial.insert(k, v)
    return is_simple(trial, p.ps)
