import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from polywrap.geom import Orientation, PointSet, convex_hull, orient
from polywrap.instances import random_points
from polywrap.moves import MoveEngine
from polywrap.pockets import pockets
from polywrap.transforms import default_lid, initial_polygonization
from polywrap.walk import _sample_move
from polywrap.wrap import Wrap, cyclic_equal, is_simple, perimeter

coord = st.integers(-(1 << 20), 1 << 20)
point = st.tuples(coord, coord)


@given(point, point, point)
def test_orient_antisymmetric(p, q, r):
    a, b = orient(p, q, r), orient(q, p, r)
    if a is Orientation.COLLINEAR:
        assert b is Orientation.COLLINEAR
    else:
        assert a is not b and b is not Orientation.COLLINEAR
    assert orient(q, r, p) is a


@given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), min_size=3, max_size=30, unique=True))
def test_hull_contains_every_point(pts):
    try:
        ps = PointSet.from_list(pts)
    except ValueError:
        return
    h = convex_hull(ps)
    c = [pts[i] for i in h.corners]
    for p in pts:
        assert all(orient(c[k], c[(k + 1) % len(c)], p) is not Orientation.CW for k in range(len(c)))


@given(st.integers(3, 40), st.integers(0, 10_000), st.integers(0, 39), st.booleans())
def test_perimeter_rotation_reversal(n, seed, k, rev):
    ps = random_points(n, seed=seed)
    w = initial_polygonization(ps, default_lid(ps))
    s = list(w.sigma)
    k %= len(s)
    s = s[k:] + s[:k]
    if rev:
        s.reverse()
    assert cyclic_equal(s, w.sigma)
    assert abs(perimeter(Wrap(ps, s)) - perimeter(w)) <= 1e-12 * perimeter(w)


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(5, 14), st.integers(0, 10_000))
def test_forward_then_reverse_is_identity(n, seed):
    ps = random_points(n, seed=seed, scale=200)
    eng = MoveEngine(initial_polygonization(ps, default_lid(ps)), check_level="every-atomic")
    rng = random.Random(seed)
    for _ in range(3):
        pick = _sample_move(eng.wrap, rng, 2000)
        if pick is None:
            return
        pos, v, x, _ = pick
        start = list(eng.wrap.sigma)
        rec = eng.forward_move(pos, v, x)
        assert is_simple(eng.wrap.sigma, ps)
        assert eng.wrap.sigma != start or rec.events
        eng.reverse_move(rec)
        assert eng.wrap.sigma == start
        eng.forward_move(pos, v, x)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 60), st.integers(0, 10_000))
def test_initial_polygonization_has_one_pocket(n, seed):
    ps = random_points(n, seed=seed)
    w = initial_polygonization(ps, default_lid(ps))
    assert is_simple(w.sigma, ps)
    assert len(pockets(w)) <= 1
