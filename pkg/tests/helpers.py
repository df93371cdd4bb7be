"""Independent brute-force oracles backing the test suite.

These deliberately re-derive every answer from first principles (support
inequalities, pairwise differences, literal definition clauses) so they
share no code path with the implementations they check.
"""

import math

import numpy as np

from flatcert.geometry import CompactSet, convex_hull_2d, polygon_distance_2d


def regular_polygon(sides, radius=1.0, center=(0.0, 0.0)):
    theta = 2.0 * math.pi * np.arange(sides) / sides
    pts = np.column_stack([np.cos(theta), np.sin(theta)]) * radius + np.asarray(center)
    return CompactSet.from_points(pts)


def antipodal_oracle_2d(x, y, hull_vertices, tol=1e-9):
    """Brute force over all +-edge normals of the hull.

    If the normal cones of x and -cone of y intersect, they intersect at an
    edge normal, so this candidate set is exhaustive for polygons.
    """
    hull = convex_hull_2d(np.asarray(hull_vertices, dtype=float))
    if hull.shape[0] <= 2:
        # width-0 hull: antipodal iff both points sit on the hull segment
        a, b = hull[0], hull[-1]
        d = b - a
        nd = np.linalg.norm(d)
        for p in (np.asarray(x, float), np.asarray(y, float)):
            off = p - a
            perp = abs(d[0] * off[1] - d[1] * off[0]) / nd if nd > 0 else \
                np.linalg.norm(off)
            if perp > tol:
                return False
        return True
    edges = np.roll(hull, -1, axis=0) - hull
    normals = np.column_stack([edges[:, 1], -edges[:, 0]])
    normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    verts = np.asarray(hull_vertices, dtype=float)
    for u in np.vstack([normals, -normals]):
        h_u = float(np.max(verts @ u))
        h_mu = float(np.max(verts @ -u))
        if np.dot(x, u) >= h_u - tol and np.dot(y, -u) >= h_mu - tol:
            return True
    return False


def separated_oracle(family1, family2, return_gap=False):
    """Hulls are disjoint iff 0 lies outside the hull of pairwise differences."""
    xs = np.vstack([m.vertices for m in family1])
    ys = np.vstack([m.vertices for m in family2])
    diffs = (xs[:, None, :] - ys[None, :, :]).reshape(-1, xs.shape[1])
    if xs.shape[1] == 2:
        hull = convex_hull_2d(diffs)
        gap = float(polygon_distance_2d(np.zeros((1, 2)), hull)[0])
    else:
        from flatcert.geometry import _min_norm_point

        v, _ = _min_norm_point(diffs)
        gap = float(np.linalg.norm(v))
    return gap if return_gap else gap > 1e-9


def equalized_oracle(fam_a, fam_b, tol=1e-9):
    """Literal clause-by-clause evaluation of the equalized definition."""

    def clause(right, left):
        rights = [s.hi for s in right]
        lefts = [s.lo for s in left]
        if max(rights) - min(rights) > tol or max(lefts) - min(lefts) > tol:
            return False
        a = sum(rights) / len(rights)
        b = sum(lefts) / len(lefts)
        if a <= b + tol:
            return True
        lo, hi = b, a
        return all(s.lo <= lo + tol and s.hi >= hi - tol for s in list(right) + list(left))

    if clause(fam_a, fam_b):
        return True, 1
    if clause(fam_b, fam_a):
        return True, 2
    return False, None


def random_convex_polygon(rng, vertices=6, radius=1.0, center=(0.0, 0.0)):
    """Random convex polygon: hull of random points on a disc."""
    pts = rng.standard_normal((max(vertices, 3), 2))
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    pts = pts * rng.uniform(0.4, 1.0, size=(pts.shape[0], 1)) * radius
    hull = convex_hull_2d(pts + np.asarray(center))
    return CompactSet.from_points(hull)
