import pytest

from polywrap.geom import PointSet
from polywrap.wrap import Wrap


@pytest.fixture
def p5_points():
    # four corners of a square and one point inside, near the bottom edge
    return PointSet.from_list([(0, 0), (4, 0), (4, 4), (0, 4), (3, 1)])


@pytest.fixture
def p5(p5_points):
    return Wrap(p5_points, [0, 4, 1, 2, 3])


@pytest.fixture
def s6_points():
    return PointSet.from_list([(0, 0), (8, 0), (8, 8), (0, 8), (6, 1), (1, 6)])


@pytest.fixture
def s6(s6_points):
    # two pockets, lids (0,1) and (3,0)
    return Wrap(s6_points, [0, 4, 1, 2, 3, 5])
