"""flatcert: search-and-certify solvers for flat transversals, measure
partitions, and sphere coverings."""

from .geometry import (
    EUCLIDEAN,
    GEO_TOL,
    SOLVE_TOL,
    CompactSet,
    Flat,
    Norm,
    OrientedHyperplane,
    Segment,
    deviation,
    distance_point_set,
    flat_distance,
    is_connected_projection,
    point_flat_distance,
    projection_interval,
    support,
    support_witness,
)
from .grids import DirectionGrid, make_grid, sphere_grid

__all__ = [
    "EUCLIDEAN",
    "GEO_TOL",
    "SOLVE_TOL",
    "CompactSet",
    "DirectionGrid",
    "Flat",
    "Norm",
    "OrientedHyperplane",
    "Segment",
    "deviation",
    "distance_point_set",
    "flat_distance",
    "is_connected_projection",
    "make_grid",
    "point_flat_distance",
    "projection_interval",
    "sphere_grid",
    "support",
    "support_witness",
]
