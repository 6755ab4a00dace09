"""Stretch/twang moves between polygonizations of a planar point set."""

from .geom import PointSet, convex_hull, orient, point_in_triangle, sp_chain
from .instances import (
    Family,
    count_polygonizations,
    enumerate_polygonizations,
    gen_pinwheel,
    gen_pocket_chain,
    gen_pow2k,
    gen_quadratic_cascade,
    random_points,
)
from .moves import CascadePolicy, CheckLevel, MoveEngine, forward_move, reverse_move, stretch, twang, twang_cascade
from .pockets import lex_less, pocket_tree, pocket_vector, pockets
from .transforms import canonical_order, canonical_polygonization, initial_polygonization, pocket_reduction, transform
from .walk import random_walk
from .wrap import Wrap, cyclic_equal, is_simple, make_polygonization, make_wrap, perimeter, weak_simplicity_check

__all__ = [
    "CascadePolicy",
    "CheckLevel",
    "Family",
    "MoveEngine",
    "PointSet",
    "Wrap",
    "canonical_order",
    "canonical_polygonization",
    "convex_hull",
    "count_polygonizations",
    "cyclic_equal",
    "enumerate_polygonizations",
    "forward_move",
    "gen_pinwheel",
    "gen_pocket_chain",
    "gen_pow2k",
    "gen_quadratic_cascade",
    "initial_polygonization",
    "is_simple",
    "lex_less",
    "make_polygonization",
    "make_wrap",
    "orient",
    "perimeter",
    "pocket_reduction",
    "pocket_tree",
    "pocket_vector",
    "pockets",
    "point_in_triangle",
    "random_points",
    "random_walk",
    "reverse_move",
    "sp_chain",
    "stretch",
    "transform",
    "twang",
    "twang_cascade",
    "weak_simplicity_check",
]

__version__ = "0.1.0"
