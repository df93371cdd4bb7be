"""Compact sets, flats, hyperplanes, norms, and distances between them.

A compact set is a finite union of vertex-listed convex polytopes. Every
operation consumes sets only through supports, projections, and distances,
so results are exact up to the stated tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GEO_TOL = 1e-9      # predicates on exact data
SOLVE_TOL = 1e-6    # solver certificate acceptance
FRAME_TOL = 1e-12   # orthonormality of stored frames

MIN_DIM = 2
MAX_DIM = 8


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-D float array, optionally of a fixed dimension."""
    a = np.array(x, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"expected a point, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("point has non-finite entries")
    if dim is not None and a.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {a.shape[0]}")
    return a


def unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Norm:
    """Euclidean norm (p=2) or a p-norm with 1 < p < inf (smooth unit ball)."""

    p: float = 2.0

    def __post_init__(self):
        if not (1.0 < self.p < math.inf):
            raise ValueError("norm exponent must lie strictly between 1 and infinity")

    @property
    def is_euclidean(self) -> bool:
        return self.p == 2.0

    def length(self, v) -> float:
        v = np.asarray(v, dtype=float)
        if self.is_euclidean:
            return float(np.linalg.norm(v))
        return float(np.sum(np.abs(v) ** self.p) ** (1.0 / self.p))

    def distance(self, a, b) -> float:
        return self.length(np.asarray(a, float) - np.asarray(b, float))


EUCLIDEAN = Norm()


@dataclass(frozen=True)
class Segment:
    """Closed interval [lo, hi] on an oriented line; a single point is allowed."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("segment endpoints must be finite")
        if self.lo > self.hi:
            raise ValueError(f"segment endpoints out of order: [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, t: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= t <= self.hi + tol

    def reversed(self) -> "Segment":
        return Segment(-self.hi, -self.lo)


@dataclass(frozen=True)
class CompactSet:
    """Finite union of convex polytopes, each given by its vertex list."""

    pieces: tuple

    def __post_init__(self):
        if len(self.pieces) == 0:
            raise ValueError("a compact set needs at least one piece")
        frozen = []
        dim = None
        for piece in self.pieces:
            v = np.array(piece, dtype=float)
            if v.ndim == 1:
                v = v[None, :]
            if v.ndim != 2 or v.shape[0] == 0:
                raise ValueError("each piece must be a nonempty vertex list")
            if not np.all(np.isfinite(v)):
                raise ValueError("piece has non-finite vertices")
            if dim is None:
                dim = v.shape[1]
                if not (MIN_DIM <= dim <= MAX_DIM):
                    raise ValueError(f"ambient dimension {dim} outside supported range "
                                     f"[{MIN_DIM}, {MAX_DIM}]")
            elif v.shape[1] != dim:
                raise ValueError("pieces have inconsistent ambient dimensions")
            frozen.append(_freeze(v))
        object.__setattr__(self, "pieces", tuple(frozen))
        object.__setattr__(self, "_stacked", _freeze(np.vstack(frozen)))

    @classmethod
    def from_points(cls, points) -> "CompactSet":
        """Single convex piece: the hull of the given points."""
        return cls((np.array(points, dtype=float),))

    @property
    def dimension(self) -> int:
        return self.pieces[0].shape[1]

    @property
    def vertices(self) -> np.ndarray:
        """All vertices of all pieces, stacked."""
        return self._stacked

    @property
    def is_convex_piece(self) -> bool:
        return len(self.pieces) == 1

    def translated(self, shift) -> "CompactSet":
        shift = as_point(shift, self.dimension)
        return CompactSet(tuple(p + shift for p in self.pieces))

    def transformed(self, rotation, shift=None) -> "CompactSet":
        """Apply x -> R x + t to every vertex."""
        r = np.asarray(rotation, dtype=float)
        t = 0.0 if shift is None else as_point(shift, r.shape[0])
        return CompactSet(tuple(p @ r.T + t for p in self.pieces))


@dataclass(frozen=True)
class Flat:
    """A k-flat: base point plus the span of k orthonormal direction columns.

    The base point lies in the orthogonal complement of the directions, so the
    pair is the canonical representative of the flat.
    """

    basis: np.ndarray   # (n, k), orthonormal columns; k = 0 gives a point flat
    base: np.ndarray    # (n,), orthogonal to every basis column

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError("flat basis must be an (n, k) array")
        base = as_point(self.base, b.shape[0])
        n, k = b.shape
        if not (0 <= k < n):
            raise ValueError(f"flat dimension k={k} must satisfy 0 <= k < n={n}")
        if k > 0:
            gram = b.T @ b
            if np.max(np.abs(gram - np.eye(k))) > 1e-9:
                raise ValueError("flat basis columns are not orthonormal")
            if np.max(np.abs(b.T @ base)) > 1e-9:
                raise ValueError("flat base point is not orthogonal to the directions")
        object.__setattr__(self, "basis", _freeze(b))
        object.__setattr__(self, "base", _freeze(base))

    @classmethod
    def from_point_and_directions(cls, point, directions) -> "Flat":
        """Build the canonical representative through `point` spanning `directions`."""
        d = np.atleast_2d(np.asarray(directions, dtype=float))
        if d.shape[0] < d.shape[1]:
            d = d.T
        q, _ = np.linalg.qr(d)
        p = as_point(point, q.shape[0])
        return cls(q, p - q @ (q.T @ p))

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    def point_at(self, coords) -> np.ndarray:
        coords = np.atleast_1d(np.asarray(coords, dtype=float))
        return self.base + self.basis @ coords

    def transformed(self, rotation, shift=None) -> "Flat":
        r = np.asarray(rotation, dtype=float)
        t = np.zeros(r.shape[0]) if shift is None else as_point(shift, r.shape[0])
        new_basis = r @ self.basis
        moved = r @ self.base + t
        return Flat(new_basis, moved - new_basis @ (new_basis.T @ moved))


@dataclass(frozen=True)
class OrientedHyperplane:
    """The set {x : x . normal = offset}; H+ is x.normal >= offset, H- the other side."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_point(self.normal)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise ValueError("hyperplane normal must be a unit vector")
        object.__setattr__(self, "normal", _freeze(n))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dimension(self) -> int:
        return self.normal.shape[0]

    def signed(self, points) -> np.ndarray:
        """Signed offsets: positive on H+, negative on H-."""
        return np.asarray(points, dtype=float) @ self.normal - self.offset

    def flipped(self) -> "OrientedHyperplane":
        return OrientedHyperplane(-self.normal, -self.offset)

    def transformed(self, rotation, shift=None) -> "OrientedHyperplane":
        r = np.asarray(rotation, dtype=float)
        t = np.zeros(r.shape[0]) if shift is None else as_point(shift, r.shape[0])
        new_normal = r @ self.normal
        return OrientedHyperplane(new_normal, self.offset + float(new_normal @ t))


# ---------------------------------------------------------------------------
# supports and projections


def support(body: CompactSet, direction) -> float:
    """Support value max{x . u : x in body}, attained at a vertex."""
    u = as_point(direction, body.dimension)
    if np.linalg.norm(u) == 0.0:
        raise ValueError("support direction must be nonzero")
    return float(np.max(body.vertices @ u))


def support_witness(body: CompactSet, direction):
    """Support value plus the (piece, vertex) index pair attaining it."""
    u = as_point(direction, body.dimension)
    if np.linalg.norm(u) == 0.0:
        raise ValueError("support direction must be nonzero")
    best = -math.inf
    where = (0, 0)
    for pi, piece in enumerate(body.pieces):
        dots = piece @ u
        vi = int(np.argmax(dots))
        if dots[vi] > best:
            best = float(dots[vi])
            where = (pi, vi)
    return best, where[0], where[1]


def _require_unit(direction, dim: int) -> np.ndarray:
    u = as_point(direction, dim)
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    return u


def projection_interval(body: CompactSet, direction) -> Segment:
    """Orthogonal projection of conv(body) onto the oriented line R*u."""
    u = _require_unit(direction, body.dimension)
    dots = body.vertices @ u
    return Segment(float(np.min(dots)), float(np.max(dots)))


def piece_intervals(body: CompactSet, direction) -> list[Segment]:
    """Projection interval of each convex piece separately."""
    u = _require_unit(direction, body.dimension)
    out = []
    for piece in body.pieces:
        dots = piece @ u
        out.append(Segment(float(np.min(dots)), float(np.max(dots))))
    return out


def is_connected_projection(body: CompactSet, direction, tol: float = GEO_TOL) -> bool:
    """True iff the per-piece projection intervals union into one interval."""
    if body.is_convex_piece:
        return True
    ivs = sorted(piece_intervals(body, direction), key=lambda s: s.lo)
    reach = ivs[0].hi
    for seg in ivs[1:]:
        if seg.lo > reach + tol:
            return False
        reach = max(reach, seg.hi)
    return True


# ---------------------------------------------------------------------------
# distances

def _min_norm_point(points: np.ndarray):
    """Wolfe's algorithm: minimum Euclidean-norm point of conv(points).

    Finite algorithm; the returned point is exact up to floating point.
    """
    m = points.shape[0]
    sq = np.einsum("ij,ij->i", points, points)
    scale = 1.0 + float(np.max(sq))
    active = [int(np.argmin(sq))]
    lam = np.ones(1)
    x = points[active[0]].copy()
    for _ in range(4 * m + 32):
        dots = points @ x
        j = int(np.argmin(dots))
        if float(x @ x) <= dots[j] + 1e-13 * scale or j in active:
            break
        active.append(j)
        lam = np.append(lam, 0.0)
        while True:
            q = points[active]
            s = len(active)
            kkt = np.zeros((s + 1, s + 1))
            kkt[:s, :s] = q @ q.T
            kkt[:s, s] = 1.0
            kkt[s, :s] = 1.0
            rhs = np.zeros(s + 1)
            rhs[s] = 1.0
            alpha = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:s]
            if np.all(alpha > 1e-13):
                lam = alpha
                break
            drop = alpha <= 1e-13
            denom = lam[drop] - alpha[drop]
            steps = np.where(denom > 1e-300, lam[drop] / denom, np.inf)
            theta = float(np.clip(np.min(steps), 0.0, 1.0))
            lam = (1.0 - theta) * lam + theta * alpha
            lam[lam < 1e-13] = 0.0
            keep = lam > 0.0
            if not np.any(keep):
                keep[int(np.argmax(alpha))] = True
                lam = np.maximum(alpha, 0.0)
            active = [a for a, k in zip(active, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ points[active]
    weights = np.zeros(m)
    weights[active] = lam
    return x, weights


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = idx[u - css / idx > 0][-1]
    tau = css[rho - 1] / rho
    return np.maximum(v - tau, 0.0)


def _pnorm_hull_distance(x: np.ndarray, verts: np.ndarray, p: float,
                         max_iter: int = 200) -> float:
    """Accelerated projected gradient over barycentric coordinates.

    Deterministic budget: `max_iter` iterations or gradient-mapping norm
    below 1e-12, whichever first.
    """
    m = verts.shape[0]
    if m == 1:
        return float(np.sum(np.abs(x - verts[0]) ** p) ** (1.0 / p))

    def value(lam):
        r = x - lam @ verts
        return float(np.sum(np.abs(r) ** p))

    def grad(lam):
        r = x - lam @ verts
        return -verts @ (p * np.abs(r) ** (p - 1.0) * np.sign(r))

    lam = np.full(m, 1.0 / m)
    y = lam.copy()
    t = 1.0
    lip = 1.0
    for _ in range(max_iter):
        g = grad(y)
        fy = value(y)
        while True:
            cand = _project_simplex(y - g / lip)
            diff = cand - y
            if value(cand) <= fy + g @ diff + 0.5 * lip * (diff @ diff) + 1e-18:
                break
            lip *= 2.0
        step = np.linalg.norm(cand - y) * lip
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = cand + ((t - 1.0) / t_next) * (cand - lam)
        lam, t = cand, t_next
        lip *= 0.9
        if step < 1e-12:
            break
    return value(lam) ** (1.0 / p)


def distance_point_set(point, body: CompactSet, norm: Norm = EUCLIDEAN) -> float:
    """Distance from a point to the nearest piece hull in the given norm."""
    x = as_point(point, body.dimension)
    best = math.inf
    for piece in body.pieces:
        if norm.is_euclidean:
            v, _ = _min_norm_point(piece - x)
            best = min(best, float(np.linalg.norm(v)))
        else:
            best = min(best, _pnorm_hull_distance(x, piece, norm.p))
    return best


def nearest_point(point, body: CompactSet, norm: Norm = EUCLIDEAN) -> np.ndarray:
    """A nearest point of the body (Euclidean-exact; p-norm via the same budget)."""
    x = as_point(point, body.dimension)
    best = math.inf
    best_pt = body.pieces[0][0]
    for piece in body.pieces:
        if norm.is_euclidean:
            v, w = _min_norm_point(piece - x)
            d = float(np.linalg.norm(v))
            pt = x + v
        else:
            d = _pnorm_hull_distance(x, piece, norm.p)
            v2, _ = _min_norm_point(piece - x)
            pt = x + v2
        if d < best:
            best, best_pt = d, pt
    return best_pt


def point_flat_distance(point, flat: Flat, norm: Norm = EUCLIDEAN) -> float:
    """Distance from a point to a flat in the ambient norm."""
    x = as_point(point, flat.dimension)
    r = x - flat.base
    if flat.k == 0:
        return norm.length(r)
    if norm.is_euclidean:
        return float(np.linalg.norm(r - flat.basis @ (flat.basis.T @ r)))
    from scipy.optimize import minimize

    p = norm.p
    b = flat.basis

    def fun(t):
        d = r - b @ t
        return float(np.sum(np.abs(d) ** p))

    def jac(t):
        d = r - b @ t
        return -b.T @ (p * np.abs(d) ** (p - 1.0) * np.sign(d))

    t0 = b.T @ r
    res = minimize(fun, t0, jac=jac, method="BFGS",
                   options={"gtol": 1e-14, "maxiter": 200})
    return float(res.fun ** (1.0 / p))


def deviation(body: CompactSet, target, norm: Norm = EUCLIDEAN) -> float:
    """One-sided Hausdorff deviation: max over body vertices of dist to target.

    For a polytopal body and a convex or affine target the supremum over the
    body is attained at a vertex.
    """
    if isinstance(target, Flat):
        return max(point_flat_distance(v, target, norm) for v in body.vertices)
    return max(distance_point_set(v, target, norm) for v in body.vertices)


def project_out(body: CompactSet, directions: np.ndarray) -> CompactSet:
    """Orthogonal projection of the body onto span(directions)^perp.

    Vertices stay in ambient coordinates; `directions` must have orthonormal
    columns.
    """
    b = np.asarray(directions, dtype=float)
    if b.size == 0:
        return body
    return CompactSet(tuple(p - (p @ b) @ b.T for p in body.pieces))


def flat_distance(body: CompactSet, flat: Flat, norm: Norm = EUCLIDEAN) -> float:
    """Distance from a k-flat to a compact set, measured in the flat's fiber.

    Equals distance_point_set(flat.base, projection of the body onto the
    orthogonal complement of the flat's directions).
    """
    if body.dimension != flat.dimension:
        raise ValueError("flat and body dimensions disagree")
    shadow = project_out(body, flat.basis) if flat.k > 0 else body
    return distance_point_set(flat.base, shadow, norm)


def hyperplane_to_flat(h: OrientedHyperplane) -> Flat:
    """The hyperplane as an (n-1)-flat in canonical form."""
    basis = orthonormal_complement(h.normal[:, None])
    return Flat(basis, h.offset * h.normal)


def orthonormal_complement(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the column span."""
    b = np.atleast_2d(np.asarray(basis, dtype=float))
    if b.shape[0] < b.shape[1]:
        b = b.T
    n, k = b.shape
    if k == 0:
        return np.eye(n)
    # singular vectors beyond the column rank span the complement
    u, s, _ = np.linalg.svd(b, full_matrices=True)
    rank = int(np.sum(s > 1e-12))
    return u[:, rank:]


def rigid_motion(dim: int, rng: np.random.Generator, shift_scale: float = 1.0):
    """Random rotation matrix (det +1) and translation vector."""
    a = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    t = rng.standard_normal(dim) * shift_scale
    return q, t


# ---------------------------------------------------------------------------
# planar helpers shared by predicates and solver fast paths

def convex_hull_2d(points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Counterclockwise hull vertices (monotone chain); collinear points dropped.

    Degenerate inputs return 1 or 2 points.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.shape[0] <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def build(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                a = out[-1] - out[-2]
                b = p - out[-2]
                if a[0] * b[1] - a[1] * b[0] > tol:
                    break
                out.pop()
            out.append(p)
        return out

    lower = build(pts)
    upper = build(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if hull.shape[0] < 3:  # all collinear
        return np.array([pts[0], pts[-1]])
    return hull


def polygon_distance_2d(queries: np.ndarray, hull: np.ndarray) -> np.ndarray:
    """Euclidean distances from query points to a convex polygon (CCW hull).

    Vectorized over queries; hulls of 1 or 2 points are handled too.
    """
    q = np.atleast_2d(np.asarray(queries, dtype=float))
    h = np.atleast_2d(np.asarray(hull, dtype=float))
    m = h.shape[0]
    if m == 1:
        return np.linalg.norm(q - h[0], axis=1)
    starts = h
    ends = np.roll(h, -1, axis=0) if m > 2 else h[::-1]
    edges = ends - starts
    lengths2 = np.einsum("ij,ij->i", edges, edges)
    lengths2[lengths2 == 0.0] = 1.0
    rel = q[:, None, :] - starts[None, :, :]
    t = np.clip(np.einsum("qed,ed->qe", rel, edges) / lengths2, 0.0, 1.0)
    feet = starts[None, :, :] + t[..., None] * edges[None, :, :]
    d_edges = np.linalg.norm(q[:, None, :] - feet, axis=2).min(axis=1)
    if m <= 2:
        return d_edges
    # CCW polygon: inside iff every edge-to-point cross product is >= 0
    cross = np.einsum("qe,e->qe", rel[:, :, 1], edges[:, 0]) - \
        np.einsum("qe,e->qe", rel[:, :, 0], edges[:, 1])
    inside = np.all(cross >= -1e-12, axis=1)
    return np.where(inside, 0.0, d_edges)
