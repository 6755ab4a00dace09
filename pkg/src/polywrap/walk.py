"""Random walks over polygonizations by forward moves."""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field

import numpy as np

from .geom import cross, maybe_visible
from .instances import random_points
from .moves import CascadePolicy, CheckLevel, MoveEngine, StuckCascade, choose_stretch_point, on_reflex_side, stretch
from .transforms import initial_polygonization
from .wrap import weak_simplicity_check


@dataclass
class WalkResult:
    n: int
    seed: int
    cascades: list = field(default_factory=list)  # twangs per accepted move
    rejected: int = 0
    injected: int = 0
    aborted: int = 0  # injected cascades that stuck and were replayed clean
    engine: MoveEngine | None = None

    @property
    def moves(self) -> int:
        return len(self.cascades)

    @property
    def mean_cascade(self) -> float:
        return statistics.fmean(self.cascades) if self.cascades else 0.0

    @property
    def max_cascade(self) -> int:
        return max(self.cascades, default=0)

    def summary(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "moves": self.moves,
            "rejected": self.rejected,
            "injected": self.injected,
            "aborted": self.aborted,
            "mean_cascade": self.mean_cascade,
            "max_cascade": self.max_cascade,
        }


def _sample_move(w, rng: random.Random, max_tries: int):
    """Rejection-sample an (edge, vertex) pair admitting a forward move."""
    pts = w.ps.points
    L = len(w)
    seg = np.asarray([p + q for p, q in w.edge_coords()], dtype=np.int64)
    for k in range(max_tries):
        vpos = rng.randrange(1, L)  # the anchor never moves
        v = w.sigma[vpos]
        u, x = w.neighbors(vpos)
        if cross(pts[u], pts[v], pts[x]) == 0:
            continue
        pos = rng.randrange(L)
        a, b = w.sigma[pos], w.sigma[(pos + 1) % L]
        if v in (a, b):
            continue
        if not (on_reflex_side(w, vpos, pts[a]) or on_reflex_side(w, vpos, pts[b])):
            continue
        if not maybe_visible(pts[v], pts[a], pts[b], seg):
            continue
        sp = choose_stretch_point(w, pos, v, reflex_pos=vpos)
        if sp is not None:
            return pos, v, sp, k
    return None


def random_walk(
    n: int,
    steps: int,
    seed: int = 0,
    *,
    scale: int = 10000,
    inject_stretches: bool = False,
    inject_prob: float = 0.2,
    check_level: CheckLevel | str | None = None,
    policy: CascadePolicy | None = None,
    max_tries: int = 100000,
    observers=(),
) -> WalkResult:
    """Walk from the one-pocket polygonization of a random point set by random forward moves.

    With ``inject_stretches`` a cascade may receive one extra random stretch
    between its twangs, which stands in for reverse moves.
    """
    rng = random.Random(seed)
    ps = random_points(n, seed, scale)
    eng = MoveEngine(initial_polygonization(ps), policy, check_level)
    eng.observers.extend(observers)
    res = WalkResult(n, seed, engine=eng)
    budget = [0]
    if inject_stretches:

        def injector(engine):
            if budget[0] <= 0 or rng.random() >= inject_prob:
                return None
            pick = _sample_stretch(engine.wrap, rng)
            if pick is not None:
                budget[0] -= 1
                res.injected += 1
            return pick

        eng.injector = injector
    while res.moves < steps:
        pick = _sample_move(eng.wrap, rng, max_tries)
        if pick is None:
            break
        pos, v, x, tries = pick
        res.rejected += tries
        budget[0] = 1
        before = eng.wrap
        try:
            rec = eng.forward_move(pos, v, x)
        except StuckCascade:
            # an arbitrary stretch can leave no nested occurrence; drop it and redo the move
            if not inject_stretches:
                raise
            eng.wrap = before
            res.aborted += 1
            budget[0] = 0
            rec = eng.forward_move(pos, v, x)
        res.cascades.append(rec.cascade_length)
    return res


def _sample_stretch(w, rng: random.Random, tries: int = 50):
    """A random visible (edge, vertex) pair of the current wrap, ignoring sides."""
    L = len(w)
    for _ in range(tries):
        pos, vpos = rng.randrange(L), rng.randrange(1, L)
        v = w.sigma[vpos]
        if v in (w.sigma[pos], w.sigma[(pos + 1) % L]):
            continue
        x = choose_stretch_point(w, pos, v)
        if x is None:
            continue
        trial, _ = stretch(w, pos, v, x)
        if weak_simplicity_check(trial):
            return pos, v, x
    return None
