from fractions import Fraction

import pytest

from polywrap.geom import (
    DegenerateInput,
    DegenerateTriangle,
    Location,
    Orientation,
    PointSet,
    convex_hull,
    orient,
    point_in_triangle,
    segments_intersect,
    sp_chain,
    visible_interval,
)


@pytest.mark.parametrize(
    "p,q,r,want",
    [
        ((0, 0), (1, 0), (0, 1), Orientation.CCW),
        ((0, 0), (1, 1), (2, 2), Orientation.COLLINEAR),
        ((0, 0), (0, 1), (1, 0), Orientation.CW),
    ],
)
def test_orient(p, q, r, want):
    assert orient(p, q, r) is want


def test_orient_exact_near_limit():
    big = 1 << 20
    assert orient((-big, -big), (big, big - 1), (big - 1, big)) is Orientation.CCW
    assert orient((-big, -big), (0, 0), (big, big)) is Orientation.COLLINEAR


def test_square_hull():
    h = convex_hull(PointSet.from_list([(0, 0), (4, 0), (4, 4), (0, 4)]))
    assert list(h.corners) == [0, 1, 2, 3]


def test_hull_ignores_interior_point():
    h = convex_hull(PointSet.from_list([(0, 0), (4, 0), (4, 4), (0, 4), (3, 1)]))
    assert set(h.corners) == {0, 1, 2, 3}
    assert 4 not in h.on_hull


def test_hull_collinear_boundary_point():
    h = convex_hull(PointSet.from_list([(0, 0), (4, 0), (4, 4), (0, 4), (2, 0)]))
    assert 4 not in h.corners
    assert 4 in h.on_hull
    assert list(h.boundary).index(4) == 1  # between (0,0) and (4,0)


def test_pointset_rejects_bad_input():
    with pytest.raises(DegenerateInput):
        PointSet.from_list([(0, 0), (1, 1)])
    with pytest.raises(DegenerateInput):
        PointSet.from_list([(0, 0), (1, 1), (0, 0)])
    with pytest.raises(DegenerateInput):
        PointSet.from_list([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(DegenerateInput):
        PointSet.from_list([(0, 0), (1, 0), (0, 1 << 21)])


def test_anchor_is_lexicographic_minimum():
    ps = PointSet.from_list([(3, 1), (0, 5), (0, 2), (4, 0)])
    assert ps.anchor == 2


T = ((0, 0), (2, 3), (4, 0))


@pytest.mark.parametrize(
    "p,want",
    [((2, 1), Location.INTERIOR), ((0, 0), Location.BOUNDARY), ((2, 0), Location.BOUNDARY), ((5, 5), Location.OUTSIDE)],
)
def test_point_in_triangle(p, want):
    assert point_in_triangle(p, *T) is want


def test_point_in_degenerate_triangle():
    with pytest.raises(DegenerateTriangle):
        point_in_triangle((1, 1), (0, 0), (1, 1), (2, 2))


def test_segments_touching_count_as_intersecting():
    assert segments_intersect((0, 0), (2, 0), (1, 0), (1, 5))
    assert not segments_intersect((0, 0), (2, 0), (3, 0), (4, 0))
    assert segments_intersect((0, 0), (2, 0), (1, 0), (3, 0))


def test_sp_chain_empty_triangle():
    pts = [(0, 0), (4, 0)]
    assert sp_chain(0, (2, 3), 1, pts) == [0, 1]


def test_sp_chain_one_captured():
    pts = [(0, 0), (4, 0), (2, 1)]
    assert sp_chain(0, (2, 3), 1, pts) == [0, 2, 1]


def test_sp_chain_two_captured():
    pts = [(0, 0), (4, 0), (1, 1), (3, 1)]
    assert sp_chain(0, (2, 3), 1, pts) == [0, 2, 3, 1]


def test_sp_chain_follows_hull_not_every_point():
    # (2,1) lies below the segment (1,2)-(3,2) and is not on the taut chain
    pts = [(0, 0), (4, 0), (1, 2), (3, 2), (2, 1)]
    assert sp_chain(0, (2, 6), 1, pts) == [0, 2, 3, 1]


def test_sp_chain_hairpin():
    assert sp_chain(0, (1, 1), 0, [(0, 0), (5, 5)]) == [0]


def test_sp_chain_rational_apex():
    pts = [(0, 0), (4, 0), (2, 1)]
    assert sp_chain(0, (Fraction(5, 2), Fraction(7, 3)), 1, pts) == [0, 2, 1]


def _segments(pts, order):
    return [(pts[order[k]], pts[order[(k + 1) % len(order)]]) for k in range(len(order))]


def test_visible_whole_edge():
    pts = [(0, 0), (4, 0), (4, 4), (0, 4), (3, 1)]
    segs = _segments(pts, [0, 4, 1, 2, 3])
    assert visible_interval(pts[4], pts[2], pts[3], segs) == [(0, 1)]


def test_visible_convex_neighbour_edge():
    pts = [(0, 0), (4, 0), (5, 3), (2, 5), (-1, 3)]
    segs = _segments(pts, range(5))
    assert visible_interval(pts[0], pts[2], pts[3], segs) == [(0, 1)]


def test_visibility_blocked_by_chain():
    # a wall from (1,2) to (5,2) hides the top edge from (3,0)
    pv = (3, 0)
    segs = [((1, 2), (5, 2))]
    assert visible_interval(pv, (0, 4), (6, 4), segs) == []


def test_visibility_partly_blocked():
    got = visible_interval((0, 0), (-4, 4), (4, 4), [((0, 1), (1, 1))])
    assert got == [(0, Fraction(1, 2))]


def test_visibility_two_blockers():
    segs = [((-1, 1), (-1, 2)), ((1, 2), (3, 2))]
    assert visible_interval((0, 0), (-4, 4), (4, 4), segs) == [(Fraction(1, 4), Fraction(3, 4))]


def test_float_prefilter_agrees_with_exact():
    import random

    import numpy as np

    from polywrap.geom import maybe_visible

    rng = random.Random(7)
    for _ in range(300):
        segs = [((rng.randint(-9, 9), rng.randint(-9, 9)), (rng.randint(-9, 9), rng.randint(-9, 9))) for _ in range(4)]
        segs = [s for s in segs if s[0] != s[1]]
        pv = (rng.randint(-9, 9), -10)
        pa, pb = (rng.randint(-9, 0), 10), (rng.randint(1, 9), 10)
        exact = visible_interval(pv, pa, pb, segs)
        arr = np.asarray([p + q for p, q in segs], dtype=np.int64).reshape(-1, 4)
        if any(hi - lo > Fraction(1, 10**6) for lo, hi in exact):
            assert maybe_visible(pv, pa, pb, arr)
        if not exact:
            assert not maybe_visible(pv, pa, pb, arr)
