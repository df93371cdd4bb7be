import math
import warnings

import numpy as np
import pytest

from flatcert.errors import PreconditionWarning
from flatcert.geometry import CompactSet, Segment, convex_hull_2d, polygon_distance_2d
from flatcert.grids import make_grid
from flatcert.predicates import (
    are_equalized,
    are_separated,
    is_antipodal_pair,
    is_l_convex,
    is_non_antipodal_family,
    projected_family_non_antipodal,
)
from helpers import (
    antipodal_oracle_2d,
    equalized_oracle,
    random_convex_polygon,
    regular_polygon,
    separated_oracle,
)

SQUARE = CompactSet.from_points([[1, 1], [-1, 1], [-1, -1], [1, -1]])


def test_polygon_distance_2d_square():
    hull = convex_hull_2d(SQUARE.vertices)
    q = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.5, 0.5]])
    d = polygon_distance_2d(q, hull)
    assert d == pytest.approx([0.0, 1.0, math.sqrt(2.0), 0.0], abs=1e-12)


def test_antipodal_square_diagonal():
    ok, witness = is_antipodal_pair([1, 1], [-1, -1], SQUARE)
    assert ok
    assert witness.slack <= 1e-9
    # u = (1, 0) is admissible; whatever u came back must support both points
    u = witness.direction
    verts = SQUARE.vertices
    assert np.dot([1, 1], u) >= np.max(verts @ u) - 2e-9
    assert np.dot([-1, -1], -u) >= np.max(verts @ -u) - 2e-9


def test_antipodal_square_adjacent_edge_midpoints():
    ok, _ = is_antipodal_pair([1, 0], [0, 1], SQUARE)
    assert not ok


def test_antipodal_warns_off_boundary():
    with pytest.warns(PreconditionWarning):
        is_antipodal_pair([0.0, 0.0], [1, 1], SQUARE)


def test_antipodal_agrees_with_edge_normal_oracle():
    rng = np.random.default_rng(12)
    disagreements = 0
    for _ in range(120):
        body = random_convex_polygon(rng, vertices=7)
        verts = body.vertices
        i, j = rng.integers(0, verts.shape[0], size=2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            got, _ = is_antipodal_pair(verts[i], verts[j], body)
        want = antipodal_oracle_2d(verts[i], verts[j], verts)
        disagreements += got != want
    assert disagreements == 0


def test_antipodal_pair_symmetry_and_rigid_invariance():
    rng = np.random.default_rng(21)
    from flatcert.geometry import rigid_motion

    for _ in range(40):
        body = random_convex_polygon(rng, vertices=6)
        verts = body.vertices
        i, j = rng.integers(0, verts.shape[0], size=2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            a, _ = is_antipodal_pair(verts[i], verts[j], body)
            b, _ = is_antipodal_pair(verts[j], verts[i], body)
            r, t = rigid_motion(2, rng)
            moved = body.transformed(r, t)
            c, _ = is_antipodal_pair(r @ verts[i] + t, r @ verts[j] + t, moved)
        assert a == b == c


def test_non_antipodal_three_discs_at_triangle():
    h = 10.0
    centers = [np.array([0.0, 0.0]), np.array([h, 0.0]), np.array([h / 2, h * math.sqrt(3) / 2])]
    family = [regular_polygon(64, radius=1.0, center=c) for c in centers]
    ok, _ = is_non_antipodal_family(family)
    assert ok


def test_non_antipodal_fails_for_hull_member():
    family = [SQUARE, CompactSet.from_points([[0.2, 0.2], [0.3, 0.1]])]
    ok, offending = is_non_antipodal_family(family)
    assert not ok
    assert offending[0] == 0


def test_non_antipodal_two_full_width_segments():
    # each segment spans the hull's full width, so (+-1, .) pairs are antipodal
    seg_a = CompactSet.from_points([[-1, 0], [1, 0]])
    seg_b = CompactSet.from_points([[-1, 1], [1, 1]])
    ok, offending = is_non_antipodal_family([seg_a, seg_b])
    assert not ok
    assert offending[0] == 0


def test_projected_family_non_antipodal_interval_path():
    # direction = x axis, fiber = y axis: spans [0,2], [0,1], [1,2] on y
    f1 = CompactSet.from_points([[0, 0], [1, 2]])
    f2 = CompactSet.from_points([[5, 0], [6, 1]])
    f3 = CompactSet.from_points([[9, 1], [10, 2]])
    ok, idx = projected_family_non_antipodal([f1, f2, f3], np.array([[1.0], [0.0]]))
    assert not ok and idx == 0
    ok, _ = projected_family_non_antipodal([f2, f3], np.array([[1.0], [0.0]]))
    assert ok


def test_separated_far_squares():
    a = [SQUARE]
    b = [SQUARE.translated([10.0, 0.0])]
    ok, witness = are_separated(a, b)
    assert ok
    w = witness.functional / np.linalg.norm(witness.functional)
    assert abs(w @ [1, 0]) == pytest.approx(1.0, abs=1e-6)
    assert witness.margin > 0
    # family1 sits on the negative side
    assert np.max(a[0].vertices @ witness.functional) < witness.threshold


def test_separated_overlapping_squares():
    ok, _ = are_separated([SQUARE], [SQUARE.translated([0.5, 0.0])])
    assert not ok


def test_separated_agrees_with_difference_hull_oracle():
    rng = np.random.default_rng(31)
    checked = 0
    while checked < 80:
        a = [random_convex_polygon(rng, center=(0, 0))]
        shift = rng.uniform(0.0, 4.0)
        b = [random_convex_polygon(rng, center=(shift, 0))]
        gap = separated_oracle(a, b, return_gap=True)
        if 0.0 < gap < 1e-4:  # skip threshold-boundary ties
            continue
        got, _ = are_separated(a, b)
        assert got == (gap > 0.0)
        checked += 1


def test_separated_swap_negates_functional():
    a = [SQUARE]
    b = [SQUARE.translated([10.0, 0.0])]
    _, w_ab = are_separated(a, b)
    _, w_ba = are_separated(b, a)
    da = w_ab.functional / np.linalg.norm(w_ab.functional)
    db = w_ba.functional / np.linalg.norm(w_ba.functional)
    assert np.allclose(da, -db, atol=1e-6)


def test_equalized_examples():
    a = [Segment(0, 2), Segment(1, 2)]
    b = [Segment(3, 4), Segment(3, 5)]
    assert are_equalized(a, b) == (True, 1)

    a = [Segment(0, 2), Segment(0, 3)]
    b = [Segment(3, 4), Segment(3, 5)]
    assert are_equalized(a, b) == (False, None)

    a = [Segment(0, 3), Segment(1, 3)]
    b = [Segment(2, 5), Segment(2, 6)]
    assert are_equalized(a, b) == (True, 1)


def test_equalized_swap_toggles_tag():
    a = [Segment(0, 2), Segment(1, 2)]
    b = [Segment(3, 4), Segment(3, 5)]
    assert are_equalized(a, b)[1] == 1
    assert are_equalized(b, a)[1] == 2


def test_equalized_affine_invariance():
    rng = np.random.default_rng(41)
    a = [Segment(0, 3), Segment(1, 3)]
    b = [Segment(2, 5), Segment(2, 6)]
    for _ in range(10):
        s = rng.uniform(0.5, 3.0)
        t = rng.uniform(-5, 5)
        am = [Segment(s * x.lo + t, s * x.hi + t) for x in a]
        bm = [Segment(s * x.lo + t, s * x.hi + t) for x in b]
        assert are_equalized(am, bm) == (True, 1)


def test_equalized_agrees_with_definition_oracle():
    rng = np.random.default_rng(51)
    for _ in range(300):
        def random_family():
            k = rng.integers(1, 4)
            out = []
            for _ in range(k):
                lo = round(float(rng.integers(0, 5)), 6)
                hi = lo + float(rng.integers(0, 4))
                out.append(Segment(lo, hi))
            return out

        a, b = random_family(), random_family()
        assert are_equalized(a, b) == equalized_oracle(a, b)


def test_l_convex_single_piece():
    grid = make_grid(2, 1, 0.1)
    assert is_l_convex(SQUARE, 1, grid)[0]


def test_l_convex_two_disjoint_squares_identity():
    body = CompactSet((SQUARE.pieces[0], SQUARE.pieces[0] + np.array([5.0, 0.0])))
    ok, ce = is_l_convex(body, 2, make_grid(2, 1, 0.1))
    assert not ok
    assert ce.gap > 1e-6
    # witness is genuinely uncovered
    from flatcert.geometry import distance_point_set

    assert distance_point_set(ce.point, body) == pytest.approx(ce.gap, abs=1e-9)


def test_l_convex_l_shape_directions():
    # L-shaped union of two rectangles: every 1-D projection is an interval
    bottom = [[0, 0], [3, 0], [3, 1], [0, 1]]
    side = [[0, 0], [1, 0], [1, 3], [0, 3]]
    body = CompactSet((bottom, side))
    grid = make_grid(2, 1, 2 * math.pi / 256)
    ok, _ = is_l_convex(body, 1, grid, tol=1e-9)
    assert ok


def test_l_convex_gap_in_one_direction():
    body = CompactSet(([[0, 0], [1, 0]], [[3, 0], [4, 0]]))
    grid = make_grid(2, 1, 2 * math.pi / 256)
    ok, ce = is_l_convex(body, 1, grid, tol=1e-9)
    assert not ok
    assert ce.gap >= 1.0  # the (1, 3) gap appears in the x direction
