"""Decidable forms of the solver hypotheses.

Antipodality of boundary pairs, non-antipodal families, strict linear
separation, equalized segment families, and sampled projection convexity.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import PreconditionWarning
from .geometry import (
    GEO_TOL,
    CompactSet,
    Segment,
    convex_hull_2d,
    distance_point_set,
    polygon_distance_2d,
)
from .grids import DirectionGrid


@dataclass(frozen=True)
class SeparationWitness:
    functional: np.ndarray
    threshold: float
    margin: float


@dataclass(frozen=True)
class AntipodalPairWitness:
    x: np.ndarray
    y: np.ndarray
    direction: np.ndarray  # shared outer normal, unit
    slack: float


@dataclass(frozen=True)
class LConvexityCounterexample:
    frame: np.ndarray      # the witness subspace basis
    point: np.ndarray      # ambient point of the projected hull left uncovered
    gap: float             # its distance to the projected union


# ---------------------------------------------------------------------------
# antipodal pairs

def _hull_vertices(body: CompactSet) -> np.ndarray:
    return body.vertices


def _boundary_depth(x: np.ndarray, vertices: np.ndarray) -> float:
    """Distance from x to the hull boundary (0 on the boundary)."""
    hull_set = CompactSet.from_points(vertices)
    outside = distance_point_set(x, hull_set)
    if outside > 0.0:
        return outside
    dim = vertices.shape[1]
    if dim == 2:
        hull = convex_hull_2d(vertices)
        return float(polygon_distance_2d(x[None, :], hull)[0]) if hull.shape[0] <= 2 \
            else float(_convex_polygon_boundary_depth(x, hull))
    try:
        from scipy.spatial import ConvexHull

        eqs = ConvexHull(vertices).equations
        return float(np.min(-(eqs[:, :-1] @ x + eqs[:, -1])))
    except Exception:
        return 0.0  # degenerate hull: everything lies on the boundary


def _convex_polygon_boundary_depth(x: np.ndarray, hull: np.ndarray) -> float:
    edges = np.roll(hull, -1, axis=0) - hull
    normals = np.column_stack([edges[:, 1], -edges[:, 0]])
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    offsets = np.einsum("ij,ij->i", normals, hull)
    return float(np.min(offsets - normals @ x))


def _cone_pair_feasible(constraints: np.ndarray, tol: float):
    """Does {u != 0 : constraints @ u <= tol} contain a vector?

    A polyhedral cone is nontrivial iff one of the 2n LPs with normalization
    u . (+-e_i) = 1 under a box bound is feasible; tol fattens the cone.
    """
    n = constraints.shape[1]
    bounds = [(-1.0, 1.0)] * n
    for i in range(n):
        for sign in (1.0, -1.0):
            a_eq = np.zeros((1, n))
            a_eq[0, i] = sign
            res = linprog(np.zeros(n), A_ub=constraints,
                          b_ub=np.full(constraints.shape[0], tol),
                          A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")
            if res.status == 0:
                u = res.x / np.linalg.norm(res.x)
                return True, u
    return False, None


def is_antipodal_pair(x, y, body: CompactSet, tol: float = GEO_TOL):
    """Is [x, y] an affine diameter of conv(body), up to tol?

    True iff some unit u supports the hull at x and at y with opposite outer
    normals. Returns (verdict, witness-or-None). Points far from the hull
    boundary trigger a warning; the predicate still evaluates on the hull.
    """
    verts = _hull_vertices(body)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for label, pt in (("x", x), ("y", y)):
        depth = _boundary_depth(pt, verts)
        if depth > tol:
            warnings.warn(f"point {label} is {depth:.3g} away from the hull boundary",
                          PreconditionWarning, stacklevel=2)
    rows = np.vstack([verts - x, y - verts])
    feasible, u = _cone_pair_feasible(rows, tol)
    if not feasible:
        return False, None
    slack = float(max(np.max((verts - x) @ u), np.max((y - verts) @ u), 0.0))
    return True, AntipodalPairWitness(x=x, y=y, direction=u, slack=slack)


def _interval_antipodal(lo: float, hi: float, member_lo: float, member_hi: float,
                        tol: float) -> bool:
    return member_lo <= lo + tol and member_hi >= hi - tol


def _normal_cone_arc(x: np.ndarray, hull: np.ndarray, tol: float):
    """Outer-normal angle interval of the hull at x, or None if x is interior.

    The hull is CCW with at least 3 vertices.
    """
    m = hull.shape[0]
    edges = np.roll(hull, -1, axis=0) - hull
    normals = np.column_stack([edges[:, 1], -edges[:, 0]])
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    angles = np.arctan2(normals[:, 1], normals[:, 0])
    # vertex match first
    d_vert = np.linalg.norm(hull - x, axis=1)
    i = int(np.argmin(d_vert))
    if d_vert[i] <= tol:
        return angles[(i - 1) % m], angles[i]
    # edge interior
    for e in range(m):
        a, b = hull[e], hull[(e + 1) % m]
        ab = b - a
        t = float(np.clip((x - a) @ ab / (ab @ ab), 0.0, 1.0))
        if np.linalg.norm(a + t * ab - x) <= tol:
            return angles[e], angles[e]
    return None


def _arcs_intersect(a0: float, a1: float, b0: float, b1: float,
                    pad: float = 1e-9) -> bool:
    """Closed circular arcs [a0, a1] and [b0, b1] (CCW) intersect?"""
    tau = 2.0 * math.pi

    def span(lo, hi):
        return (hi - lo) % tau

    wa, wb = span(a0, a1), span(b0, b1)
    start = (b0 - a0) % tau
    return start <= wa + pad or (tau - start) % tau <= wb + pad


def _member_has_antipodal_pair_2d(member: CompactSet, hull: np.ndarray,
                                  tol: float):
    """Exact normal-cone arc test for a planar member against a CCW hull."""
    if hull.shape[0] <= 2:  # width-0 hull: any two boundary points qualify
        a = hull[0]
        b = hull[-1]
        line_dir = b - a
        scale = np.linalg.norm(line_dir)
        for vx in member.vertices:
            off = vx - a
            if scale > 0:
                perp = abs(line_dir[0] * off[1] - line_dir[1] * off[0]) / scale
            else:
                perp = np.linalg.norm(off)
            if perp > tol:
                return None
        return member.vertices[0], member.vertices[-1]
    arcs = []
    for v in member.vertices:
        arc = _normal_cone_arc(v, hull, tol)
        if arc is not None:
            arcs.append((v, arc))
    for i, (vx, (ax0, ax1)) in enumerate(arcs):
        for vy, (ay0, ay1) in arcs[i:]:
            if _arcs_intersect(ax0, ax1, ay0 + math.pi, ay1 + math.pi):
                return vx, vy
    return None


def is_non_antipodal_family(family, tol: float = GEO_TOL):
    """No member may contain an affine diameter of the union's hull.

    Returns (verdict, offending (member index, (x, y)) or None). Vertices
    suffice for polytopal members: the defining support inequalities are
    linear in the pair.
    """
    if len(family) < 2:
        raise ValueError("a family needs at least two members")
    dim = family[0].dimension
    all_vertices = np.vstack([m.vertices for m in family])
    if dim == 2:
        hull = convex_hull_2d(all_vertices)
        for idx, member in enumerate(family):
            pair = _member_has_antipodal_pair_2d(member, hull, tol)
            if pair is not None:
                return False, (idx, pair)
        return True, None
    hull_set = CompactSet.from_points(all_vertices)
    for idx, member in enumerate(family):
        verts = member.vertices
        for i in range(verts.shape[0]):
            for j in range(i, verts.shape[0]):
                ok, _ = is_antipodal_pair(verts[i], verts[j], hull_set, tol)
                if ok:
                    return False, (idx, (verts[i], verts[j]))
    return True, None


def projected_family_non_antipodal(family, directions: np.ndarray,
                                   tol: float = GEO_TOL):
    """Fiberwise non-antipodality of the projections onto span(directions)^perp.

    Fast exact paths for fiber dimensions 1 and 2 (the certified cases).
    Returns (verdict, offending member index or None).
    """
    b = np.atleast_2d(np.asarray(directions, dtype=float))
    if b.shape[0] < b.shape[1]:
        b = b.T
    n, k = b.shape
    fiber_dim = n - k
    if fiber_dim == 1:
        from .geometry import orthonormal_complement

        w = orthonormal_complement(b)[:, 0]
        spans = [(float(np.min(m.vertices @ w)), float(np.max(m.vertices @ w)))
                 for m in family]
        lo = min(s[0] for s in spans)
        hi = max(s[1] for s in spans)
        for idx, (mlo, mhi) in enumerate(spans):
            if _interval_antipodal(lo, hi, mlo, mhi, tol):
                return False, idx
        return True, None
    project = lambda v: v - (v @ b) @ b.T
    if fiber_dim == 2:
        from .geometry import orthonormal_complement

        w = orthonormal_complement(b)
        coords = [m.vertices @ w for m in family]
        hull = convex_hull_2d(np.vstack(coords))
        for idx, c in enumerate(coords):
            member = CompactSet.from_points(c)
            if _member_has_antipodal_pair_2d(member, hull, tol) is not None:
                return False, idx
        return True, None
    projected = [CompactSet(tuple(project(p) for p in m.pieces)) for m in family]
    ok, offending = is_non_antipodal_family(projected, tol)
    return ok, (offending[0] if offending else None)


# ---------------------------------------------------------------------------
# separation

def are_separated(family1, family2):
    """Strict linear separability of two families, by max-margin LP.

    Returns (verdict, SeparationWitness or None); the witness puts family1 on
    the negative side of functional(x) - threshold.
    """
    if len(family1) == 0 or len(family2) == 0:
        raise ValueError("families must be nonempty")
    xs = np.vstack([m.vertices for m in family1])
    ys = np.vstack([m.vertices for m in family2])
    n = xs.shape[1]
    # variables (w, b, m): maximize m with w.x - b <= -m, w.y - b >= m, |w|_inf <= 1
    a_ub = np.block([
        [xs, -np.ones((xs.shape[0], 1)), np.ones((xs.shape[0], 1))],
        [-ys, np.ones((ys.shape[0], 1)), np.ones((ys.shape[0], 1))],
    ])
    c = np.zeros(n + 2)
    c[-1] = -1.0
    bounds = [(-1.0, 1.0)] * n + [(None, None), (None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(a_ub.shape[0]), bounds=bounds,
                  method="highs")
    if res.status != 0:
        return False, None
    w = res.x[:n]
    b = float(res.x[n])
    margin = float(min(np.min(ys @ w) - b, b - np.max(xs @ w)))
    if margin <= GEO_TOL or np.linalg.norm(w) < GEO_TOL:
        return False, None
    return True, SeparationWitness(functional=w, threshold=b, margin=margin)


# ---------------------------------------------------------------------------
# equalized segment families

def _coincide(values, tol: float):
    values = np.asarray(values, dtype=float)
    if values.max() - values.min() > tol:
        return None
    return float(values.mean())


def are_equalized(fam_a, fam_b, tol: float = GEO_TOL):
    """The endpoint-coincidence boundary configuration between separation
    and common intersection.

    Returns (verdict, alternative tag 1 or 2, or None).
    """
    if len(fam_a) == 0 or len(fam_b) == 0:
        raise ValueError("segment families must be nonempty")

    def alternative(right_fam, left_fam):
        a = _coincide([s.hi for s in right_fam], tol)
        b = _coincide([s.lo for s in left_fam], tol)
        if a is None or b is None:
            return False
        if a <= b + tol:
            return True
        return all(s.lo <= b + tol and s.hi >= a - tol
                   for s in list(right_fam) + list(left_fam))

    if alternative(fam_a, fam_b):
        return True, 1
    if alternative(fam_b, fam_a):
        return True, 2
    return False, None


# ---------------------------------------------------------------------------
# sampled projection convexity

def _projected_piece_distance(queries: np.ndarray, coords: np.ndarray) -> np.ndarray:
    dim = coords.shape[1]
    if dim == 1:
        lo, hi = float(np.min(coords)), float(np.max(coords))
        q = queries[:, 0]
        return np.maximum(np.maximum(lo - q, q - hi), 0.0)
    if dim == 2:
        return polygon_distance_2d(queries, convex_hull_2d(coords))
    from .geometry import _min_norm_point

    return np.array([float(np.linalg.norm(_min_norm_point(coords - q)[0]))
                     for q in queries])


def is_l_convex(body: CompactSet, l: int, grid: DirectionGrid,
                tol: float = 1e-6):
    """Sampled check that every l-dimensional projection of the body is convex.

    "False" comes with an exact witness (a hull point of the projection more
    than tol away from the projected union); "true" is grid-resolution
    limited. Returns (verdict, counterexample or None).
    """
    n = body.dimension
    if not (1 <= l <= n):
        raise ValueError("projection dimension l must satisfy 1 <= l <= n")
    if body.is_convex_piece:
        return True, None
    if l == n:
        frames = [np.eye(n)]
    else:
        if grid.n != n or grid.k != l:
            raise ValueError("grid does not match (n, l)")
        frames = [grid.frame(i) for i in grid.representatives]
    for frame in frames:
        coords = [p @ frame for p in body.pieces]
        if l == 1:
            segs = sorted((float(c.min()), float(c.max())) for c in coords)
            reach = segs[0][1]
            for lo, hi in segs[1:]:
                if lo > reach + tol:
                    mid = 0.5 * (reach + lo)
                    point = frame[:, 0] * mid
                    return False, LConvexityCounterexample(
                        frame=frame, point=point, gap=float(lo - reach))
                reach = max(reach, hi)
            continue
        witness = _uncovered_hull_sample(coords, tol)
        if witness is not None:
            q, gap = witness
            return False, LConvexityCounterexample(
                frame=frame, point=frame @ q, gap=gap)
    return True, None


def _uncovered_hull_sample(coords, tol: float):
    """A point of conv(projected union) farther than tol from every piece.

    Samples segments between piece points: their hull membership is automatic.
    """
    anchors = [np.vstack([c, c.mean(axis=0)]) for c in coords]
    fractions = np.linspace(0.0, 1.0, 9)[1:-1]
    for i in range(len(anchors)):
        for j in range(i + 1, len(anchors)):
            for a in anchors[i]:
                for b in anchors[j]:
                    samples = a[None, :] + fractions[:, None] * (b - a)[None, :]
                    dists = np.min(
                        np.stack([_projected_piece_distance(samples, c)
                                  for c in coords]), axis=0)
                    worst = int(np.argmax(dists))
                    if dists[worst] > tol:
                        return samples[worst], float(dists[worst])
    return None
