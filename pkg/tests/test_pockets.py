import pytest

from polywrap.geom import Location, PointSet
from polywrap.moves import MoveEngine
from polywrap.pockets import (
    Pocket,
    hull_of_pocket,
    lex_less,
    pocket_count,
    pocket_nesting_holds,
    pocket_tree,
    pocket_vector,
    pocket_with_lid,
    pockets,
)
from polywrap.wrap import Wrap

# a pocket off the bottom edge whose own hull has a free edge (A,B) hiding C
NESTED = PointSet.from_list([(0, 0), (20, 0), (20, 20), (0, 20), (5, 10), (10, 5), (15, 10)])
NESTED_ORDER = [0, 4, 5, 6, 1, 2, 3]


def test_convex_has_no_pockets():
    ps = PointSet.from_list([(0, 0), (4, 0), (4, 4), (0, 4)])
    w = Wrap(ps, [0, 1, 2, 3])
    assert pockets(w) == []
    tree = pocket_tree(w)
    assert tree.children == [] and tree.level == 1
    assert pocket_vector(tree) == [4]


def test_p5_single_pocket(p5):
    (pk,) = pockets(p5)
    assert frozenset(pk.lid) == {0, 1}
    assert pk.chain == (0, 4, 1)
    assert pk.level == 2
    assert pocket_count(pk, p5.ps) == 3
    assert pk.children == []


def test_p5_vector(p5):
    assert pocket_vector(pocket_tree(p5)) == [5, 3]


def test_s6_two_pockets(s6):
    lids = sorted(tuple(sorted(pk.lid)) for pk in pockets(s6))
    assert lids == [(0, 1), (0, 3)]
    assert pocket_with_lid(s6, (3, 0)) is not None
    assert pocket_with_lid(s6, (1, 2)) is None


def test_nested_tree_has_depth_three():
    w = Wrap(NESTED, NESTED_ORDER)
    tree = pocket_tree(w)
    (pk,) = tree.children
    (sub,) = pk.children
    assert frozenset(sub.lid) == {4, 6}
    assert sub.chain == (4, 5, 6)
    assert sub.level == 3
    assert pocket_vector(tree) == [7, 5, 3]


def test_bare_lid_count():
    ps = PointSet.from_list([(0, 0), (4, 0), (2, 3)])
    pk = Pocket(level=2, lid=(0, 1), chain=(0, 1))
    assert pk.is_bare
    assert pocket_count(pk, ps) == 2
    region = hull_of_pocket(pk, ps)
    assert region.locate((2, 0)) is not Location.OUTSIDE
    assert region.locate((2, 1)) is Location.OUTSIDE


def test_triangle_pocket_region(p5):
    (pk,) = pockets(p5)
    region = hull_of_pocket(pk, p5.ps)
    assert region.locate((2, 0)) is not Location.OUTSIDE
    assert region.locate((3, 2)) is Location.OUTSIDE


@pytest.mark.parametrize(
    "V,W,want",
    [
        ([13, 18, 13, 5, 4], [13, 18, 14, 3], True),
        ([13, 17, 10, 5, 4], [13, 18, 13, 5, 4], True),
        ([13, 18, 14, 3], [13, 18, 14, 3], False),
        ([5, 3], [5, 3, 1], True),
        ([5, 3, 1], [5, 3], False),
    ],
)
def test_lex_less(V, W, want):
    assert lex_less(V, W) is want


def test_pocket_to_json(p5):
    d = pocket_tree(p5).to_json()
    assert "lid" not in d
    assert d["children"][0]["lid"] in ([0, 1], [1, 0])


def test_twangs_shrink_pocket_hulls_and_vector(p5):
    seen = []

    def watch(before, after, ev):
        if ev.kind == "twang":
            seen.append(
                (
                    pocket_nesting_holds(before, after),
                    lex_less(pocket_vector(pocket_tree(after)), pocket_vector(pocket_tree(before))),
                )
            )

    eng = MoveEngine(p5.copy())
    eng.observers.append(watch)
    eng.forward_move(3, 4)
    assert seen and all(a and b for a, b in seen)
