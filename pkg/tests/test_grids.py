import math

import numpy as np
import pytest

from flatcert.grids import make_grid, sphere_grid


def test_circle_grid_count_and_pairs():
    g = make_grid(2, 1, 2.0 * math.pi / 256)
    assert len(g) == 256
    # equally spaced unit vectors in antipodal pairs
    assert np.allclose(np.linalg.norm(g.nodes, axis=1), 1.0, atol=1e-12)
    assert np.allclose(g.nodes[g.antipode], -g.nodes, atol=1e-12)


def test_involution_is_fixed_point_free_involution():
    for g in (make_grid(2, 1, 0.05), make_grid(3, 1, 0.12, seed=1),
              make_grid(3, 2, 0.25, seed=2)):
        idx = np.arange(len(g))
        assert np.all(g.antipode != idx)
        assert np.all(g.antipode[g.antipode] == idx)


def test_sphere_grid_3d_node_count_band():
    res = 0.05
    g = make_grid(3, 1, res)
    lo = 4.0 * math.pi / res**2
    assert lo <= len(g) <= 4.0 * lo


def test_sphere_grid_3d_spacing():
    res = 0.2
    g = make_grid(3, 1, res)
    from scipy.spatial import cKDTree

    d, _ = cKDTree(g.nodes).query(g.nodes, k=2)
    # chordal nearest-neighbor spacing stays within the target resolution
    assert float(d[:, 1].max()) <= res


def test_neighbors_symmetric_and_nonempty():
    g = make_grid(3, 1, 0.15, seed=3)
    for i, ns in enumerate(g.neighbors):
        assert len(ns) >= 1
        for j in ns:
            assert i in g.neighbors[j]


def test_coframe_grid_orthonormal_and_involution():
    g = make_grid(3, 2, 0.2, seed=4)
    for i in (0, len(g) // 2, len(g) - 1):
        f = g.frame(i)
        assert np.allclose(f.T @ f, np.eye(2), atol=1e-10)
        flipped = g.frame(g.antipode[i])
        assert np.allclose(flipped[:, 0], -f[:, 0], atol=1e-10)
        assert np.allclose(flipped[:, 1:], f[:, 1:], atol=1e-10)


def test_generic_frame_grid():
    g = make_grid(4, 2, 0.8, seed=5)
    assert g.nodes.shape[1:] == (4, 2)
    f = g.frame(0)
    assert np.allclose(f.T @ f, np.eye(2), atol=1e-10)


def test_grid_determinism():
    a = make_grid(3, 1, 0.2, seed=42)
    b = make_grid(3, 1, 0.2, seed=42)
    assert np.array_equal(a.nodes, b.nodes)


def test_make_grid_rejects_bad_parameters():
    with pytest.raises(ValueError):
        make_grid(2, 2, 0.1)
    with pytest.raises(ValueError):
        make_grid(3, 0, 0.1)
    with pytest.raises(ValueError):
        make_grid(3, 1, -1.0)


def test_representatives_cover_pairs():
    g = sphere_grid(2, 0.1)
    reps = g.representatives
    assert len(reps) == len(g) // 2
    covered = set(reps) | {g.antipode[i] for i in reps}
    assert covered == set(range(len(g)))
