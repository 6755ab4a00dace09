import pytest

from polywrap.moves import MoveEngine
from polywrap.walk import random_walk
from polywrap.wrap import is_simple


def test_walk_is_deterministic():
    a = random_walk(12, 30, seed=5, check_level="boundaries")
    b = random_walk(12, 30, seed=5, check_level="boundaries")
    assert a.cascades == b.cascades
    assert a.engine.wrap.sigma == b.engine.wrap.sigma


def test_walk_summary():
    res = random_walk(10, 20, seed=1, check_level="every-atomic")
    s = res.summary()
    assert s["moves"] == 20
    assert s["max_cascade"] >= 1
    assert 1.0 <= s["mean_cascade"] <= s["max_cascade"]
    assert is_simple(res.engine.wrap.sigma, res.engine.wrap.ps)


def test_walk_moves_reverse_exactly():
    res = random_walk(9, 25, seed=2, check_level="every-atomic")
    eng = res.engine
    for rec in reversed(list(eng.journal)):
        eng.reverse_move(rec)
        assert tuple(eng.wrap.sigma) == rec.pre


@pytest.mark.parametrize("seed", range(3))
def test_walk_with_injected_stretches(seed):
    res = random_walk(15, 40, seed=seed, inject_stretches=True, inject_prob=0.5, check_level="every-atomic")
    assert res.moves == 40
    assert res.injected > 0
    w = res.engine.wrap
    assert is_simple(w.sigma, w.ps)


def test_walk_observers():
    seen = []
    random_walk(8, 5, seed=0, observers=[lambda b, a, ev: seen.append(ev.kind)])
    assert "stretch" in seen and "twang" in seen
