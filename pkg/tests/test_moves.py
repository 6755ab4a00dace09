from fractions import Fraction

import pytest

from polywrap.geom import PointSet, TwangPreconditionViolated, sp_chain
from polywrap.moves import (
    CascadePolicy,
    CheckLevel,
    MoveEngine,
    ReflexSideViolated,
    StretchEvent,
    TwangEvent,
    VisibilityViolated,
    event_from_json,
    forward_move,
    hop_valid,
    reverse_move,
    reverse_stretch,
    reverse_twang,
    stretch,
    stretch_intervals,
    swap_valid,
    twang,
    twang_cascade,
    zero_length_stretch,
)
from polywrap.wrap import Wrap, is_simple, weak_simplicity_check

MID = (Fraction(2), Fraction(4))  # midpoint of (4,4)-(0,4)


@pytest.fixture
def stretched(p5):
    return stretch(p5, 3, 4, MID)


def test_p5_stretch(stretched):
    w, ev = stretched
    assert w.sigma == [0, 4, 1, 2, 4, 3]
    assert ev.chains == ((), ())
    assert [dc.point for dc in w.double_contacts()] == [4]


def test_p5_edge_is_fully_visible(p5):
    assert stretch_intervals(p5, 3, 4) == [(0, 1)]


def test_stretch_to_endpoint_fails(p5):
    with pytest.raises(VisibilityViolated):
        stretch(p5, 3, 2)


def test_stretch_point_must_be_visible(p5):
    # (4,4) to (0,4) seen from (3,1): x outside the edge is rejected
    with pytest.raises(VisibilityViolated):
        stretch(p5, 3, 4, (Fraction(5), Fraction(4)))


def test_stretch_captures_point():
    # (4,6) lies inside the capture triangle (v, x, b) and joins the chain
    ps = PointSet.from_list([(0, 0), (10, 0), (10, 10), (0, 10), (5, 2), (4, 6)])
    w = Wrap(ps, [0, 4, 1, 2, 3, 5])
    w2, ev = stretch(w, 3, 4, (Fraction(8), Fraction(10)))
    assert ev.chains == ((), (5,))
    assert w2.sigma == [0, 4, 1, 2, 4, 5, 3, 5]
    assert weak_simplicity_check(w2)
    assert reverse_stretch(w2, ev).sigma == w.sigma


def test_twang_after_stretch(stretched):
    w, _ = stretched
    w2, ev = twang(w, 1)
    assert ev.chain == (0, 1)
    assert w2.sigma == [0, 1, 2, 4, 3]


def test_twang_needs_double_contact(p5):
    with pytest.raises(TwangPreconditionViolated):
        twang(p5, 1)


def test_twang_anchor_refused(stretched):
    with pytest.raises(TwangPreconditionViolated):
        twang(stretched[0], 0)


def test_hairpin_twang(p5):
    w, ev = zero_length_stretch(p5, 3, 4)
    assert w.sigma == [0, 4, 1, 2, 4, 2, 3]
    assert weak_simplicity_check(w)
    w2, tw = twang(w, 4)
    assert tw.hairpin and tw.chain == (2,)
    assert w2.sigma == p5.sigma
    assert reverse_twang(w2, tw).sigma == w.sigma


def test_twang_two_captured_points():
    # the spike tip 4 later twangs across (3,1) and (5,1)
    ps = PointSet.from_list([(0, 0), (8, 0), (3, 1), (5, 1), (4, 6)])
    assert sp_chain(0, ps.points[4], 1, ps.points, exclude=(4,)) == [0, 2, 3, 1]


def test_cascade_p5(stretched):
    w, _ = stretched
    out, events = twang_cascade(w)
    assert out.sigma == [0, 1, 2, 4, 3]
    assert [e.chain for e in events] == [(0, 1)]


def test_cascade_identity_on_polygonization(p5):
    out, events = twang_cascade(p5)
    assert out.sigma == p5.sigma and events == []


def test_forward_move_p5(p5):
    out, rec = forward_move(p5, 3, 4, check_level="every-atomic")
    assert out.sigma == [0, 1, 2, 4, 3]
    assert is_simple(out.sigma, out.ps)
    assert [type(e) for e in rec.events] == [StretchEvent, TwangEvent]
    assert rec.twangs == 1


def test_forward_move_reverses_exactly(p5):
    out, rec = forward_move(p5, 3, 4)
    back = reverse_move(out, rec)
    assert back.sigma == p5.sigma


def test_reverse_of_one_twang_move_is_two_events(p5):
    eng = MoveEngine(p5.copy())
    rec = eng.forward_move(3, 4)
    rev = eng.reverse_move(rec)
    assert len(rev.events) == 2


def test_reverse_stretch(stretched, p5):
    w, ev = stretched
    assert reverse_stretch(w, ev).sigma == p5.sigma


def test_forward_move_rejects_collinear_vertex():
    ps = PointSet.from_list([(0, 0), (6, 0), (6, 6), (0, 6), (3, 6), (3, 2)])
    w = Wrap(ps, [0, 5, 1, 2, 4, 3])
    assert is_simple(w.sigma, ps)
    with pytest.raises(ReflexSideViolated):
        MoveEngine(w).forward_move(1, 4)


def test_forward_move_reflex_side_enforced(p5):
    # (4,4) is a convex corner; the point (1.5,0.5) lies on its interior side
    eng = MoveEngine(p5.copy())
    with pytest.raises(ReflexSideViolated):
        eng.forward_move(0, 2, (Fraction(3, 2), Fraction(1, 2)))
    with pytest.raises(VisibilityViolated):
        eng.forward_move(0, 2)


def test_journal_events_round_trip_json(p5):
    _, rec = forward_move(p5, 3, 4)
    for ev in rec.events:
        assert event_from_json(ev.to_json()) == ev


def test_replay_reproduces_move(p5):
    _, rec = forward_move(p5, 3, 4)
    eng = MoveEngine(p5.copy(), check_level="every-atomic")
    for ev in rec.events:
        eng.replay(ev)
    assert tuple(eng.wrap.sigma) == rec.post


def test_random_policy_is_seeded(p5):
    a = forward_move(p5, 3, 4, CascadePolicy("random", seed=3))[0]
    b = forward_move(p5, 3, 4, CascadePolicy("random", seed=3))[0]
    assert a.sigma == b.sigma


def test_check_level_parse():
    assert CheckLevel.parse("off") is CheckLevel.OFF
    assert CheckLevel.parse("every-atomic") is CheckLevel.EVERY_ATOMIC
    assert CheckLevel.parse(CheckLevel.BOUNDARIES) is CheckLevel.BOUNDARIES


def test_check_level_env(monkeypatch, p5):
    monkeypatch.setenv("POLYWRAP_CHECK_LEVEL", "off")
    assert MoveEngine(p5).check_level is CheckLevel.OFF


def test_swap_on_convex_polygon_is_invalid():
    ps = PointSet.from_list([(0, 0), (4, 0), (5, 3), (2, 5), (-1, 3)])
    w = Wrap(ps, [0, 1, 2, 3, 4])
    assert not any(swap_valid(w, i) for i in range(5))


def test_swap_of_two_pocket_vertices():
    ps = PointSet.from_list([(0, 0), (10, 0), (10, 10), (0, 10), (8, 8), (8, 7)])
    w = Wrap(ps, [0, 1, 2, 4, 5, 3])
    assert is_simple(w.sigma, ps)
    assert swap_valid(w, 3)


def test_hop_valid_full_view():
    ps = PointSet.from_list([(0, 0), (8, 0), (8, 8), (0, 8), (4, 2)])
    w = Wrap(ps, [0, 4, 1, 2, 3])
    assert hop_valid(w, 2, 4)  # 4 hops onto edge (8,8)-(0,8)


def test_hop_invalid_for_collinear_vertex():
    ps = PointSet.from_list([(0, 0), (8, 0), (8, 8), (0, 8), (4, 0)])
    w = Wrap(ps, [0, 4, 1, 2, 3])
    assert not hop_valid(w, 2, 4)


def test_hop_blocked_by_vertex():
    # (3,5) sits inside the triangle between the top edge and (4,2)
    ps = PointSet.from_list([(0, 0), (8, 0), (8, 8), (0, 8), (4, 2), (3, 5)])
    w = Wrap(ps, [0, 4, 1, 2, 3, 5])
    assert not hop_valid(w, 3, 4)
    ps = PointSet.from_list([(0, 0), (8, 0), (8, 8), (0, 8), (4, 2), (1, 4)])
    assert hop_valid(Wrap(ps, [0, 4, 1, 2, 3, 5]), 3, 4)
