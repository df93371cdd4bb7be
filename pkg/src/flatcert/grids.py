"""Discretized configuration spaces: spheres and Grassmannian frame samples.

Every grid is closed under an orientation involution (antipode for sphere
nodes, first-column sign flip for frames) and carries a symmetric neighbor
graph, so solvers can sweep it and walk it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
_MAX_RANDOM_NODES = 20000


@dataclass(frozen=True)
class DirectionGrid:
    """Antipodally symmetric sample of S^{n-1} (k=1) or of k-frames in R^n."""

    n: int
    k: int
    nodes: np.ndarray          # (N, n) unit vectors, or (N, n, k) frames
    antipode: np.ndarray       # (N,) fixed-point-free pairing
    neighbors: tuple           # adjacency lists, one int array per node
    resolution: float
    seed: int

    def __len__(self) -> int:
        return self.nodes.shape[0]

    def frame(self, i: int) -> np.ndarray:
        """The (n, k) orthonormal frame at node i (a column for k=1)."""
        if self.k == 1:
            return self.nodes[i][:, None]
        return self.nodes[i]

    def flat_coords(self, i: int) -> np.ndarray:
        return np.asarray(self.nodes[i], dtype=float).ravel()

    @property
    def representatives(self) -> np.ndarray:
        """One node index per antipodal pair."""
        idx = np.arange(len(self))
        return idx[idx < self.antipode]


def make_grid(n: int, k: int, resolution: float, seed: int = 0) -> DirectionGrid:
    """Quasi-uniform antipodally symmetric grid for (n, k).

    k=1 grids are deterministic spiral-type sphere samples for n <= 3; higher
    n and general k fall back to seeded samples closed under the involution.
    """
    if not (1 <= k < n):
        raise ValueError(f"unsupported grid parameters (n={n}, k={k})")
    if resolution <= 0.0:
        raise ValueError("grid resolution must be positive")
    if k == 1:
        if n == 2:
            return _circle_grid(resolution, seed)
        if n == 3:
            return _sphere_grid_3d(resolution, seed)
        return _random_sphere_grid(n, resolution, seed)
    if k == n - 1:
        return _coframe_grid(n, resolution, seed)
    return _random_frame_grid(n, k, resolution, seed)


def sphere_grid(ambient_dim: int, resolution: float, seed: int = 0) -> DirectionGrid:
    """Grid on the unit sphere of R^ambient_dim."""
    return make_grid(ambient_dim, 1, resolution, seed)


def _pairing(m: int) -> np.ndarray:
    """Pairing i <-> i+m for nodes stacked as [first half; antipodal half]."""
    return np.concatenate([np.arange(m, 2 * m), np.arange(0, m)])


def _circle_grid(resolution: float, seed: int) -> DirectionGrid:
    half = max(1, math.ceil(math.pi / resolution))
    count = 2 * half
    theta = 2.0 * math.pi * np.arange(count) / count
    nodes = np.column_stack([np.cos(theta), np.sin(theta)])
    antipode = (np.arange(count) + half) % count
    neighbors = tuple(np.array([(i - 1) % count, (i + 1) % count])
                      for i in range(count))
    return DirectionGrid(2, 1, nodes, antipode, neighbors,
                         2.0 * math.pi / count, seed)


def _hemisphere_spiral(m: int) -> np.ndarray:
    i = np.arange(m)
    z = (i + 0.5) / m
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = _GOLDEN_ANGLE * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _sphere_grid_3d(resolution: float, seed: int) -> DirectionGrid:
    m = math.ceil(4.0 * math.pi / resolution**2)
    upper = _hemisphere_spiral(m)
    nodes = np.vstack([upper, -upper])
    antipode = _pairing(m)
    neighbors = _radius_neighbors(nodes, 2.5 * resolution)
    return DirectionGrid(3, 1, nodes, antipode, neighbors, resolution, seed)


def _random_sphere_grid(n: int, resolution: float, seed: int) -> DirectionGrid:
    area = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    m = int(min(max(64, math.ceil(area / resolution ** (n - 1) / 2.0)),
                _MAX_RANDOM_NODES))
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((m, n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    nodes = np.vstack([pts, -pts])
    antipode = _pairing(m)
    neighbors = _radius_neighbors(nodes, 2.5 * resolution)
    return DirectionGrid(n, 1, nodes, antipode, neighbors, resolution, seed)


def _basis_of_complement(normal: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of normal^perp, oriented positively."""
    n = normal.size
    pivot = int(np.argmin(np.abs(normal)))
    cols = [e for e in np.eye(n)[np.r_[pivot:n, 0:pivot]]]
    basis = []
    for c in cols:
        v = c - normal * (normal @ c)
        for b in basis:
            v = v - b * (b @ v)
        norm_v = np.linalg.norm(v)
        if norm_v > 1e-8:
            basis.append(v / norm_v)
        if len(basis) == n - 1:
            break
    frame = np.column_stack(basis)
    if np.linalg.det(np.column_stack([frame, normal])) < 0:
        frame[:, 0] = -frame[:, 0]
    return frame


def _coframe_grid(n: int, resolution: float, seed: int) -> DirectionGrid:
    """(n-1)-frames indexed by their oriented unit normals."""
    normal_grid = sphere_grid(n, resolution, seed)
    m = len(normal_grid) // 2
    first = np.stack([_basis_of_complement(normal_grid.nodes[i]) for i in range(m)])
    flipped = first.copy()
    flipped[:, :, 0] = -flipped[:, :, 0]
    nodes = np.concatenate([first, flipped])
    return DirectionGrid(n, n - 1, nodes, normal_grid.antipode,
                         normal_grid.neighbors, resolution, seed)


def _random_frame_grid(n: int, k: int, resolution: float, seed: int) -> DirectionGrid:
    dim = min(k * (n - k), 3)
    m = int(min(max(64, math.ceil((3.0 / resolution) ** dim)), _MAX_RANDOM_NODES))
    rng = np.random.default_rng(seed)
    frames = []
    for _ in range(m):
        q, r = np.linalg.qr(rng.standard_normal((n, k)))
        frames.append(q * np.sign(np.diag(r)))
    first = np.stack(frames)
    flipped = first.copy()
    flipped[:, :, 0] = -flipped[:, :, 0]
    nodes = np.concatenate([first, flipped])
    # embed as projection matrices: involution-invariant, subspace-faithful
    proj = np.einsum("nik,njk->nij", nodes, nodes).reshape(2 * m, -1)
    neighbors = _radius_neighbors(proj, 2.5 * resolution * math.sqrt(2.0))
    return DirectionGrid(n, k, nodes, _pairing(m), neighbors, resolution, seed)


def _radius_neighbors(points: np.ndarray, geodesic_radius: float) -> tuple:
    count = points.shape[0]
    chord = 2.0 * math.sin(min(geodesic_radius, math.pi) / 2.0)
    if points.shape[1] > 3:  # embedded frames: radius already chordal
        chord = geodesic_radius
    tree = cKDTree(points)
    lists = [[] for _ in range(count)]
    for i, j in tree.query_pairs(chord):
        lists[i].append(j)
        lists[j].append(i)
    # every node keeps at least its nearest distinct neighbor
    for i in range(count):
        if not lists[i]:
            _, idx = tree.query(points[i], k=2)
            other = int(idx[1])
            lists[i].append(other)
            lists[other].append(i)
    return tuple(np.unique(np.array(ls, dtype=int)) for ls in lists)
