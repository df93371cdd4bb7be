import math

import numpy as np
import pytest

from flatcert.geometry import (
    EUCLIDEAN,
    CompactSet,
    Flat,
    Norm,
    OrientedHyperplane,
    Segment,
    deviation,
    distance_point_set,
    flat_distance,
    hyperplane_to_flat,
    is_connected_projection,
    nearest_point,
    orthonormal_complement,
    point_flat_distance,
    projection_interval,
    rigid_motion,
    support,
    support_witness,
)

SQUARE = CompactSet.from_points([[1, 1], [-1, 1], [-1, -1], [1, -1]])
UNIT_SQUARE = CompactSet.from_points([[0, 0], [1, 0], [1, 1], [0, 1]])


def regular_polygon(sides, radius=1.0, center=(0.0, 0.0)):
    theta = 2.0 * math.pi * np.arange(sides) / sides
    pts = np.column_stack([np.cos(theta), np.sin(theta)]) * radius + np.asarray(center)
    return CompactSet.from_points(pts)


def test_support_square():
    assert support(SQUARE, [1, 0]) == pytest.approx(1.0)


def test_support_singleton():
    point = CompactSet.from_points([[2, 3]])
    assert support(point, [0, 1]) == pytest.approx(3.0)


def test_support_triangle_diagonal():
    # max over the three dot products, enumerated by hand
    tri = CompactSet.from_points([[0, 0], [4, 0], [0, 4]])
    u = np.array([1.0, 1.0]) / math.sqrt(2.0)
    expected = max(0.0, 4.0 / math.sqrt(2.0), 4.0 / math.sqrt(2.0))
    assert support(tri, u) == pytest.approx(expected, abs=1e-12)


def test_support_witness_indices():
    val, piece, vertex = support_witness(SQUARE, [1, 0.1])
    assert val == pytest.approx(1.1)
    assert piece == 0
    assert np.allclose(SQUARE.pieces[piece][vertex], [1, 1])


def test_support_rejects_zero_direction():
    with pytest.raises(ValueError):
        support(SQUARE, [0, 0])


def test_projection_interval_square():
    seg = projection_interval(SQUARE, [1, 0])
    assert (seg.lo, seg.hi) == pytest.approx((-1.0, 1.0))


def test_projection_interval_two_singletons():
    body = CompactSet(([[0, 0]], [[3, 0]]))
    seg = projection_interval(body, [1, 0])
    assert (seg.lo, seg.hi) == pytest.approx((0.0, 3.0))


def test_projection_interval_64gon():
    # support of a regular 64-gon lies in [cos(pi/64), 1]
    disc = regular_polygon(64)
    for theta in np.linspace(0.0, math.pi, 17):
        u = np.array([math.cos(theta), math.sin(theta)])
        seg = projection_interval(disc, u)
        assert seg.hi == pytest.approx(1.0, abs=5e-3)
        assert seg.lo == pytest.approx(-1.0, abs=5e-3)


def test_projection_interval_requires_unit():
    with pytest.raises(ValueError):
        projection_interval(SQUARE, [2, 0])


def test_projection_reversal_property():
    rng = np.random.default_rng(7)
    for _ in range(25):
        body = CompactSet.from_points(rng.standard_normal((6, 2)))
        theta = rng.uniform(0, 2 * math.pi)
        u = np.array([math.cos(theta), math.sin(theta)])
        fwd = projection_interval(body, u)
        rev = projection_interval(body, -u)
        assert rev.lo == pytest.approx(-fwd.hi, abs=1e-12)
        assert rev.hi == pytest.approx(-fwd.lo, abs=1e-12)


def test_connected_projection_convex():
    assert is_connected_projection(SQUARE, [0, 1])


def test_connected_projection_gap():
    body = CompactSet(([[0, 0]], [[3, 0]]))
    assert not is_connected_projection(body, [1, 0])
    assert is_connected_projection(body, [0, 1])


def test_connected_projection_ring():
    # eight small squares around a circle: every axis projection interval
    # union was checked piecewise by hand (consecutive pieces overlap)
    pieces = []
    for j in range(8):
        a = 2 * math.pi * j / 8
        c = np.array([math.cos(a), math.sin(a)])
        pieces.append([c + [0.5, 0.5], c + [-0.5, 0.5], c + [-0.5, -0.5], c + [0.5, -0.5]])
    ring = CompactSet(tuple(pieces))
    assert is_connected_projection(ring, [1, 0])
    assert is_connected_projection(ring, [0, 1])


def test_distance_interior_point():
    assert distance_point_set([0, 0], SQUARE) == pytest.approx(0.0, abs=1e-12)


def test_distance_axis_point():
    assert distance_point_set([3, 0], SQUARE) == pytest.approx(2.0, abs=1e-12)


def test_distance_corner():
    d = distance_point_set([2, 2], SQUARE)
    assert d == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_distance_pnorm_matches_dense_grid():
    # oracle: dense barycentric grid over the square in the p=4 norm
    norm = Norm(p=4.0)
    x = np.array([2.0, 2.0])
    ts = np.linspace(0.0, 1.0, 201)
    xs, ys = np.meshgrid(np.linspace(-1, 1, 201), np.linspace(-1, 1, 201))
    pts = np.column_stack([xs.ravel(), ys.ravel()])
    diffs = np.abs(pts - x) ** 4
    oracle = float(np.min(diffs.sum(axis=1) ** 0.25))
    del ts
    assert distance_point_set(x, SQUARE, norm) == pytest.approx(oracle, abs=1e-3)
    assert distance_point_set(x, SQUARE, norm) <= oracle + 1e-9


def test_distance_lipschitz_property():
    rng = np.random.default_rng(3)
    body = CompactSet.from_points(rng.standard_normal((7, 2)))
    for _ in range(50):
        a = rng.standard_normal(2) * 3
        b = rng.standard_normal(2) * 3
        da = distance_point_set(a, body)
        db = distance_point_set(b, body)
        assert abs(da - db) <= np.linalg.norm(a - b) + 1e-9


def test_nearest_point_is_feasible():
    p = nearest_point([3, 0.5], SQUARE)
    assert np.allclose(p, [1, 0.5], atol=1e-10)


def test_deviation_two_points():
    body = CompactSet.from_points([[0, 0], [3, 0]])
    target = CompactSet.from_points([[0, 0]])
    assert deviation(body, target) == pytest.approx(3.0, abs=1e-12)


def test_deviation_square_to_axis():
    axis = Flat(np.array([[1.0], [0.0]]), np.zeros(2))
    assert deviation(SQUARE, axis) == pytest.approx(1.0, abs=1e-12)


def test_deviation_triangle_to_diagonal_line():
    # closed-form point-line distances |x - y| / sqrt(2)
    tri = CompactSet.from_points([[0, 0], [1, 0], [0, 2]])
    d = np.array([1.0, 1.0]) / math.sqrt(2.0)
    line = Flat(d[:, None], np.zeros(2))
    expected = max(0.0, 1.0 / math.sqrt(2.0), 2.0 / math.sqrt(2.0))
    assert deviation(tri, line) == pytest.approx(expected, abs=1e-12)


def test_deviation_zero_iff_inside():
    axis = Flat(np.array([[1.0], [0.0]]), np.zeros(2))
    flat_body = CompactSet.from_points([[0, 0], [2, 0]])
    assert deviation(flat_body, axis) == pytest.approx(0.0, abs=1e-12)


def test_flat_distance_disc_to_axis():
    disc = regular_polygon(64, center=(0.0, 5.0))
    axis = Flat(np.array([[1.0], [0.0]]), np.zeros(2))
    assert flat_distance(disc, axis) == pytest.approx(4.0, abs=5e-3)


def test_flat_distance_zero_when_contains_base():
    axis = Flat(np.array([[1.0], [0.0]]), np.zeros(2))
    assert flat_distance(SQUARE, axis) == pytest.approx(0.0, abs=1e-12)


def test_flat_distance_point_to_z_axis():
    body = CompactSet.from_points([[1, 1, 1]])
    z_axis = Flat(np.array([[0.0], [0.0], [1.0]]), np.zeros(3))
    assert flat_distance(body, z_axis) == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_flat_distance_zero_iff_intersecting():
    # feasibility oracle: line x-parallel at height h meets the square iff |h| <= 1
    for h in (-1.5, -0.5, 0.0, 0.9, 1.0 + 1e-7, 2.0):
        line = Flat(np.array([[1.0], [0.0]]), np.array([0.0, h]))
        d = flat_distance(SQUARE, line)
        if abs(h) <= 1.0:
            assert d <= 1e-9
        else:
            assert d == pytest.approx(abs(h) - 1.0, abs=1e-9)


def test_support_width_nonnegative():
    rng = np.random.default_rng(11)
    for _ in range(30):
        body = CompactSet.from_points(rng.standard_normal((5, 3)))
        u = rng.standard_normal(3)
        assert support(body, u) + support(body, -u) >= -1e-12


def test_point_flat_distance_pnorm_close_to_euclidean_for_axis():
    line = Flat(np.array([[1.0], [0.0]]), np.zeros(2))
    # distance from (0, 2) to the x-axis is 2 in every p-norm
    assert point_flat_distance([0.0, 2.0], line, Norm(p=3.0)) == pytest.approx(2.0, abs=1e-9)


def test_segment_validation():
    with pytest.raises(ValueError):
        Segment(2.0, 1.0)
    assert Segment(1.0, 1.0).length == 0.0


def test_flat_validation():
    with pytest.raises(ValueError):
        Flat(np.array([[1.0], [1.0]]), np.zeros(2))  # not orthonormal
    with pytest.raises(ValueError):
        Flat(np.array([[1.0], [0.0]]), np.array([1.0, 0.0]))  # base not orthogonal


def test_flat_from_point_and_directions():
    f = Flat.from_point_and_directions([2.0, 3.0], [[1.0, 0.0]])
    assert np.allclose(f.base, [0.0, 3.0])
    assert point_flat_distance([5.0, 3.0], f) == pytest.approx(0.0, abs=1e-12)


def test_hyperplane_sides_and_flat_view():
    h = OrientedHyperplane(np.array([0.0, 1.0]), 2.0)
    assert h.signed([[0, 3]])[0] == pytest.approx(1.0)
    f = hyperplane_to_flat(h)
    assert point_flat_distance([7.0, 2.0], f) == pytest.approx(0.0, abs=1e-12)
    assert point_flat_distance([0.0, 5.0], f) == pytest.approx(3.0, abs=1e-12)


def test_orthonormal_complement():
    b = np.array([[1.0], [0.0], [0.0]])
    c = orthonormal_complement(b)
    assert c.shape == (3, 2)
    assert np.allclose(c.T @ c, np.eye(2), atol=1e-12)
    assert np.allclose(b.T @ c, 0.0, atol=1e-12)


def test_norm_validation():
    with pytest.raises(ValueError):
        Norm(p=1.0)
    with pytest.raises(ValueError):
        Norm(p=math.inf)
    assert Norm(p=2.0).is_euclidean


def test_rigid_motion_is_rotation():
    rng = np.random.default_rng(5)
    r, t = rigid_motion(3, rng)
    assert np.allclose(r @ r.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)
    assert t.shape == (3,)


def test_distance_invariant_under_rigid_motion():
    rng = np.random.default_rng(9)
    body = CompactSet.from_points(rng.standard_normal((6, 2)))
    x = rng.standard_normal(2)
    r, t = rigid_motion(2, rng)
    d0 = distance_point_set(x, body)
    d1 = distance_point_set(r @ x + t, body.transformed(r, t))
    assert d1 == pytest.approx(d0, abs=1e-10)
