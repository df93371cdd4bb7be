"""Search-and-certify solvers for transversals, flats, and half-spheres.

Every solver runs the same two-phase recipe (antipodally symmetric grid
sweep, then simplex-reflection refinement) and never returns an unverified
object: residuals on accepted certificates are recomputed through the public
geometry operations, and anything that cannot be certified comes back as a
ResolutionError carrying the best residual found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .covering import SphericalClosedSet
from .errors import PreconditionError, ResolutionError
from .geometry import (
    EUCLIDEAN,
    GEO_TOL,
    SOLVE_TOL,
    CompactSet,
    Flat,
    Norm,
    OrientedHyperplane,
    convex_hull_2d,
    deviation,
    flat_distance,
    hyperplane_to_flat,
    is_connected_projection,
    orthonormal_complement,
    polygon_distance_2d,
    support,
)
from .grids import DirectionGrid, make_grid
from .search import argbest, refine, refine_on_sphere

# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class TransversalCertificate:
    """A hyperplane or k-flat meeting every set, with recomputed distances."""

    object: object                 # OrientedHyperplane or Flat
    distances: tuple
    residual: float
    contained_member: int | None = None   # fiber-containment incident, if seen


@dataclass(frozen=True)
class SeparationCertificate:
    hyperplane: OrientedHyperplane
    negative_side: tuple           # indices on H-
    positive_side: tuple           # indices on H+
    gap: float


@dataclass(frozen=True)
class PairwiseSeparation:
    """Separation branch of the family alternative, with representatives."""

    certificate: SeparationCertificate
    representatives: tuple         # one member index per family


@dataclass(frozen=True)
class EquidistantCertificate:
    flat: Flat
    distances: tuple
    common_distance: float
    spread: float


@dataclass(frozen=True)
class DeviationCertificate:
    flat: Flat
    deviations: tuple
    common_deviation: float
    spread: float


@dataclass(frozen=True)
class HalfSphere:
    """Half of a k-subsphere: {x in S^{n-1} ∩ span(basis) : x . pole >= 0}."""

    basis: np.ndarray
    pole: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        p = np.asarray(self.pole, dtype=float)
        if np.max(np.abs(b.T @ b - np.eye(b.shape[1]))) > 1e-9:
            raise ValueError("half-sphere basis must be orthonormal")
        inside = b @ (b.T @ p)
        if np.linalg.norm(p - inside) > 1e-9 or abs(np.linalg.norm(p) - 1.0) > 1e-9:
            raise ValueError("pole must be a unit vector inside the subspace")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "pole", inside / np.linalg.norm(inside))

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    def opposite(self) -> "HalfSphere":
        return HalfSphere(self.basis, -self.pole)

    def point_distance(self, y) -> float:
        """Geodesic distance from a unit vector to the half-sphere."""
        y = np.asarray(y, dtype=float)
        if self.k == 1:
            return float(np.arccos(np.clip(y @ self.pole, -1.0, 1.0)))
        y_l = self.basis.T @ y
        u = self.basis.T @ self.pole
        if float(y_l @ u) >= 0.0:
            return float(np.arccos(np.clip(np.linalg.norm(y_l), -1.0, 1.0)))
        w = y_l - (y_l @ u) * u
        return float(np.arccos(np.clip(np.linalg.norm(w), -1.0, 1.0)))

    def nearest_point(self, y) -> np.ndarray:
        """The half-sphere point closest to a unit vector y."""
        y = np.asarray(y, dtype=float)
        if self.k == 1:
            return self.pole
        y_l = self.basis.T @ y
        u = self.basis.T @ self.pole
        if float(y_l @ u) >= 0.0 and np.linalg.norm(y_l) > 1e-12:
            return self.basis @ (y_l / np.linalg.norm(y_l))
        w = y_l - (y_l @ u) * u
        if np.linalg.norm(w) <= 1e-12:
            w = np.zeros_like(u)
            w[int(np.argmin(np.abs(u)))] = 1.0
            w = w - (w @ u) * u
        return self.basis @ (w / np.linalg.norm(w))


@dataclass(frozen=True)
class HalfSphereCertificate:
    half_sphere: HalfSphere
    witnesses: tuple               # one point per set, on the half-sphere
    margin: float


@dataclass(frozen=True)
class ComplementaryAvoidance:
    half1: HalfSphere
    half2: HalfSphere
    avoided_first: tuple
    avoided_second: tuple
    margin: float


@dataclass(frozen=True)
class SectionsConfiguration:
    frame: np.ndarray              # basis of the witness subspace L
    direction: np.ndarray          # ambient support direction u in L
    touching: tuple                # indices within tol of a support hyperplane
    upper_support: float
    lower_support: float
    slack: float


@dataclass(frozen=True)
class AlternativesReport:
    """Which of the Helly-type alternatives a colored instance realizes."""

    holds: tuple
    empty_tuple: tuple | None = None
    small_transversal_family: int | None = None
    parallel_direction: np.ndarray | None = None
    inconclusive: bool = False
    notes: str = ""


# ---------------------------------------------------------------------------
# the shared interval-alternative engine


def check_partition(partition, count: int):
    i1 = tuple(int(i) for i in partition[0])
    i2 = tuple(int(i) for i in partition[1])
    if not i1 or not i2 or sorted(i1 + i2) != list(range(count)):
        raise ValueError("partition must split the index set into two nonempty parts")
    return i1, i2


def _alternative_engine(batch_intervals, grid: DirectionGrid, partition,
                        tol: float):
    """Transversal-or-separation search over per-direction interval systems.

    `batch_intervals(directions) -> (los, his)` with one column per item.
    Returns ("transversal", v, t, value) or ("separation", v, t, value);
    raises ResolutionError when neither branch certifies.
    """
    i1, i2 = partition
    nodes = grid.nodes
    los, his = batch_intervals(nodes)

    def neg_overlap(v):
        lo, hi = batch_intervals(v[None, :])
        return float(lo.max() - hi.min())

    overlap = his.min(axis=1) - los.max(axis=1)
    start = nodes[argbest(-overlap, nodes)]
    v1, f1 = refine_on_sphere(neg_overlap, start, scale=2.0 * grid.resolution)
    best_overlap = -f1
    if best_overlap >= -tol:
        lo, hi = batch_intervals(v1[None, :])
        t = 0.5 * (lo.max() + hi.min())
        return "transversal", v1, float(t), float(best_overlap)

    def neg_sep(v):
        lo, hi = batch_intervals(v[None, :])
        return float(hi[0, list(i1)].max() - lo[0, list(i2)].min())

    sep = los[:, list(i2)].min(axis=1) - his[:, list(i1)].max(axis=1)
    start = nodes[argbest(-sep, nodes)]
    v2, f2 = refine_on_sphere(neg_sep, start, scale=2.0 * grid.resolution)
    best_sep = -f2
    if best_sep >= -tol:
        lo, hi = batch_intervals(v2[None, :])
        t = 0.5 * (hi[0, list(i1)].max() + lo[0, list(i2)].min())
        return "separation", v2, float(t), float(best_sep)
    raise ResolutionError(
        "neither a transversal nor a separation certified at this resolution",
        best_residual=float(max(best_overlap, best_sep)),
        best_overlap=float(best_overlap), best_separation=float(best_sep))


def _set_interval_fun(sets):
    vertex_lists = [s.vertices for s in sets]

    def batch(directions):
        los = np.empty((directions.shape[0], len(sets)))
        his = np.empty_like(los)
        for i, verts in enumerate(vertex_lists):
            dots = directions @ verts.T
            los[:, i] = dots.min(axis=1)
            his[:, i] = dots.max(axis=1)
        return los, his

    return batch


def _check_grid(grid: DirectionGrid, n: int, k: int = 1):
    if grid.n != n or grid.k != k:
        raise ValueError(f"grid is for (n={grid.n}, k={grid.k}), "
                         f"instance needs (n={n}, k={k})")


def hyperplane_alternative(sets, partition, grid: DirectionGrid,
                           tol: float = SOLVE_TOL):
    """Either a hyperplane meeting all n+1 sets, or one separating the partition.

    Requires every set to project to a segment in every sampled direction;
    the underlying alternative theorem then guarantees one branch.
    """
    n = sets[0].dimension
    if len(sets) != n + 1:
        raise ValueError(f"need n+1 = {n + 1} sets in R^{n}, got {len(sets)}")
    _check_grid(grid, n)
    i1, i2 = check_partition(partition, len(sets))
    for si, body in enumerate(sets):
        if body.is_convex_piece:
            continue
        for rep in grid.representatives:
            if not is_connected_projection(body, grid.nodes[rep]):
                raise PreconditionError(
                    f"set {si} does not project to a segment in a sampled "
                    f"direction", set_index=si, direction=grid.nodes[rep])
    batch = _set_interval_fun(sets)
    branch, v, t, value = _alternative_engine(batch, grid, (i1, i2), tol)
    h = OrientedHyperplane(v, t)
    if branch == "transversal":
        as_flat = hyperplane_to_flat(h)
        distances = tuple(flat_distance(s, as_flat) for s in sets)
        lo, hi = batch(v[None, :])
        contained = None
        inner_lo, inner_hi = lo[0].max(), hi[0].min()
        for i in range(len(sets)):
            if lo[0, i] >= inner_lo - GEO_TOL and hi[0, i] <= inner_hi + GEO_TOL:
                contained = i
                break
        return TransversalCertificate(object=h, distances=distances,
                                      residual=float(max(distances)),
                                      contained_member=contained)
    gap = float(min(-support(sets[i], -v) for i in i2) -
                max(support(sets[i], v) for i in i1))
    return SeparationCertificate(hyperplane=h, negative_side=i1,
                                 positive_side=i2, gap=gap)


def pairwise_families_alternative(families, partition, grid: DirectionGrid,
                                  tol: float = SOLVE_TOL):
    """Hyperplane transversal to every member, or a separated representative
    system for the partition.

    Each family's members must be convex and pairwise intersecting, so the
    per-family fiber intersections are nonempty segments.
    """
    n = families[0][0].dimension
    if len(families) != n + 1:
        raise ValueError(f"need n+1 = {n + 1} families, got {len(families)}")
    _check_grid(grid, n)
    i1, i2 = check_partition(partition, len(families))
    for fi, fam in enumerate(families):
        for member in fam:
            if not member.is_convex_piece:
                raise ValueError(f"family {fi} has a non-convex member")
        for a, b in combinations(range(len(fam)), 2):
            from .geometry import _min_norm_point

            diff = (fam[a].vertices[:, None, :] -
                    fam[b].vertices[None, :, :]).reshape(-1, n)
            v0, _ = _min_norm_point(diff)
            if np.linalg.norm(v0) > GEO_TOL:
                raise PreconditionError(
                    f"members {a} and {b} of family {fi} do not intersect",
                    family=fi, pair=(a, b))

    member_verts = [[m.vertices for m in fam] for fam in families]

    def batch(directions):
        los = np.empty((directions.shape[0], len(families)))
        his = np.empty_like(los)
        for i, verts in enumerate(member_verts):
            mlos = np.stack([(directions @ v.T).min(axis=1) for v in verts])
            mhis = np.stack([(directions @ v.T).max(axis=1) for v in verts])
            los[:, i] = mlos.max(axis=0)
            his[:, i] = mhis.min(axis=0)
        return los, his

    los, his = batch(grid.nodes)
    worst = float((los - his).max())
    if worst > 100.0 * GEO_TOL:
        raise ResolutionError(
            "a per-family fiber intersection came out empty beyond tolerance",
            best_residual=worst)
    branch, v, t, value = _alternative_engine(batch, grid, (i1, i2), tol)
    h = OrientedHyperplane(v, t)
    if branch == "transversal":
        as_flat = hyperplane_to_flat(h)
        distances = tuple(flat_distance(m, as_flat)
                          for fam in families for m in fam)
        return TransversalCertificate(object=h, distances=distances,
                                      residual=float(max(distances)))
    reps = []
    for fi, fam in enumerate(families):
        ends = [(support(m, v), -support(m, -v)) for m in fam]
        if fi in i1:  # the member whose right end realizes the family segment
            reps.append(int(np.argmin([e[0] for e in ends])))
        else:
            reps.append(int(np.argmax([e[1] for e in ends])))
    gap = float(min(-support(families[i][reps[i]], -v) for i in i2) -
                max(support(families[i][reps[i]], v) for i in i1))
    cert = SeparationCertificate(hyperplane=h, negative_side=i1,
                                 positive_side=i2, gap=gap)
    return PairwiseSeparation(certificate=cert, representatives=tuple(reps))


# ---------------------------------------------------------------------------
# k-flat solvers


def _fiber_distances(sets, fiber_basis: np.ndarray, norm: Norm):
    """Callable q -> per-set distances from fiber point W q (batch over q).

    q has fiber coordinates; distances are measured in the ambient norm
    restricted to the fiber, which for the Euclidean norm reduces to plain
    coordinate distance.
    """
    w = fiber_basis
    if norm.is_euclidean and w.shape[1] == 1:
        spans = [( (s.vertices @ w[:, 0]).min(), (s.vertices @ w[:, 0]).max())
                 for s in sets]

        def dists(q):
            q = np.atleast_2d(q)[:, 0]
            out = np.empty((q.size, len(sets)))
            for i, (lo, hi) in enumerate(spans):
                out[:, i] = np.maximum(np.maximum(lo - q, q - hi), 0.0)
            return out

        return dists
    if norm.is_euclidean and w.shape[1] == 2:
        hulls = [[convex_hull_2d(p @ w) for p in s.pieces] for s in sets]

        def dists(q):
            q = np.atleast_2d(q)
            out = np.empty((q.shape[0], len(sets)))
            for i, piece_hulls in enumerate(hulls):
                out[:, i] = np.min(
                    np.stack([polygon_distance_2d(q, h) for h in piece_hulls]),
                    axis=0)
            return out

        return dists
    from .geometry import distance_point_set, project_out

    directions = orthonormal_complement(w)
    shadows = [project_out(s, directions) for s in sets]

    def dists(q):
        q = np.atleast_2d(q)
        out = np.empty((q.shape[0], len(sets)))
        for r, qq in enumerate(q):
            x = w @ qq
            out[r] = [distance_point_set(x, s, norm) for s in shadows]
        return out

    return dists


def _fiber_candidates(sets, fiber_basis: np.ndarray, radius: float):
    """Coarse fiber starting points: projected vertices, centroids, box grid."""
    w = fiber_basis
    coords = np.vstack([s.vertices @ w for s in sets])
    cands = [coords, coords.mean(axis=0, keepdims=True)]
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    axes = [np.linspace(l - 0.2 * (h - l + 1e-9), h + 0.2 * (h - l + 1e-9), 7)
            for l, h in zip(lo, hi)]
    mesh = np.meshgrid(*axes)
    cands.append(np.column_stack([m.ravel() for m in mesh]))
    out = np.vstack(cands)
    keep = np.linalg.norm(out, axis=1) <= radius
    return out[keep] if keep.any() else out


def _search_radius(sets) -> float:
    return 2.0 * max(float(np.linalg.norm(s.vertices, axis=1).max()) for s in sets)


def _spread(values: np.ndarray) -> np.ndarray:
    return values.max(axis=-1) - values.min(axis=-1)


def _flat_from_fiber(n: int, fiber_basis: np.ndarray, q: np.ndarray) -> Flat:
    direction = orthonormal_complement(fiber_basis)
    base = fiber_basis @ q
    return Flat(direction, base - direction @ (direction.T @ base))


def _check_fiber_preconditions(sets, grid: DirectionGrid, tol: float):
    from .predicates import projected_family_non_antipodal

    for rep in grid.representatives:
        ok, offender = projected_family_non_antipodal(sets, grid.frame(rep), tol)
        if not ok:
            raise PreconditionError(
                f"projected family is antipodal in a sampled fiber "
                f"(member {offender})", member=offender,
                frame=grid.frame(rep))


def _sweep_flats(sets, grid: DirectionGrid, norm: Norm, objective: str):
    """Coarse sweep over direction nodes with per-node fiber candidates.

    objective "spread" equalizes distances, "max" drives them to zero.
    Returns (best value, fiber basis, fiber point, node index).
    """
    radius = _search_radius(sets)
    best = (math.inf, None, None, None)
    for rep in grid.representatives:
        fiber = orthonormal_complement(grid.frame(rep))
        dists = _fiber_distances(sets, fiber, norm)
        cands = _fiber_candidates(sets, fiber, radius)
        table = dists(cands)
        vals = _spread(table) if objective == "spread" else table.max(axis=1)
        j = int(np.argmin(vals))
        if vals[j] < best[0]:
            best = (float(vals[j]), fiber, cands[j], rep)
    return best


def _refine_flat(sets, norm: Norm, fiber_basis, q0, objective: str,
                 scale: float):
    """Joint polish over (fiber span, fiber point) for the certified shapes."""
    n = fiber_basis.shape[0]
    fdim = fiber_basis.shape[1]

    def value(fiber, q):
        table = _fiber_distances(sets, fiber, norm)(q[None, :])[0]
        return float(table.max() - table.min()) if objective == "spread" \
            else float(table.max())

    if fdim == 1:
        w0 = fiber_basis[:, 0]

        def fun(z):
            v = z[:n]
            nv = np.linalg.norm(v)
            if nv < 1e-9:
                return math.inf
            return value(v[:, None] / nv, z[n:])

        z0 = np.concatenate([w0, q0])
        z, best = refine(fun, z0, scale=scale)
        w = z[:n] / np.linalg.norm(z[:n])
        return w[:, None], z[n:], best
    if fdim == 2 and n == 3:
        d0 = orthonormal_complement(fiber_basis)[:, 0]

        def fun(z):
            d = z[:n]
            nd = np.linalg.norm(d)
            if nd < 1e-9:
                return math.inf
            fiber = orthonormal_complement(d[:, None] / nd)
            p = fiber @ z[n:]
            return value(fiber, fiber.T @ p)

        z0 = np.concatenate([d0, q0])
        z, best = refine(fun, z0, scale=scale)
        d = z[:n] / np.linalg.norm(z[:n])
        fiber = orthonormal_complement(d[:, None])
        return fiber, z[n:], best
    # uncertified shapes: keep the direction, polish the fiber point only
    def fun(q):
        return value(fiber_basis, q)

    q, best = refine(fun, q0, scale=scale)
    return fiber_basis, q, best


def equidistant_k_flat(sets, k: int, norm: Norm = EUCLIDEAN,
                       grid: DirectionGrid | None = None,
                       tol: float = SOLVE_TOL, check_preconditions: bool = True):
    """A k-flat whose fiber distances to all n+1 sets agree within tol."""
    n = sets[0].dimension
    if len(sets) != n + 1:
        raise ValueError(f"need n+1 = {n + 1} sets in R^{n}, got {len(sets)}")
    if grid is None:
        grid = make_grid(n, k, 0.02 if n == 2 else 0.1)
    _check_grid(grid, n, k)
    if check_preconditions:
        _check_fiber_preconditions(sets, grid, GEO_TOL)
    value, fiber, q, rep = _sweep_flats(sets, grid, norm, "spread")
    fiber, q, best = _refine_flat(sets, norm, fiber, q, "spread",
                                  scale=2.0 * grid.resolution)
    flat = _flat_from_fiber(n, fiber, q)
    distances = tuple(flat_distance(s, flat, norm) for s in sets)
    spread = float(max(distances) - min(distances))
    if spread > tol:
        raise ResolutionError("equidistant flat not certified at this resolution",
                              best_residual=spread)
    return EquidistantCertificate(flat=flat, distances=distances,
                                  common_distance=float(np.mean(distances)),
                                  spread=spread)


def common_k_transversal(sets, k: int, norm: Norm = EUCLIDEAN,
                         grid: DirectionGrid | None = None,
                         tol: float = SOLVE_TOL):
    """A k-flat meeting all n+1 sets; needs the union (n-k)-convex as well."""
    n = sets[0].dimension
    if grid is None:
        grid = make_grid(n, k, 0.02 if n == 2 else 0.1)
    _check_grid(grid, n, k)
    _check_fiber_preconditions(sets, grid, GEO_TOL)
    union = CompactSet(tuple(p for s in sets for p in s.pieces))
    l = n - k
    from .predicates import is_l_convex

    l_grid = None if l == n else make_grid(n, l, max(grid.resolution, 0.05),
                                           grid.seed)
    ok, counterexample = is_l_convex(union, l, l_grid, tol=10.0 * tol) \
        if l != n else is_l_convex(union, l, grid, tol=10.0 * tol)
    if not ok:
        raise PreconditionError(
            f"the union is not {l}-convex at the sampled resolution",
            counterexample=counterexample)
    # start from the equidistant configuration, then drive the distance to 0
    eq = equidistant_k_flat(sets, k, norm, grid, tol=math.inf,
                            check_preconditions=False)
    fiber = orthonormal_complement(eq.flat.basis)
    q0 = fiber.T @ eq.flat.base
    value, fiber_sw, q_sw, rep = _sweep_flats(sets, grid, norm, "max")
    candidates = [(fiber, q0), (fiber_sw, q_sw)]
    best_result = None
    for fb, qq in candidates:
        fb2, q2, val = _refine_flat(sets, norm, fb, qq, "max",
                                    scale=2.0 * grid.resolution)
        if best_result is None or val < best_result[2]:
            best_result = (fb2, q2, val)
    flat = _flat_from_fiber(n, best_result[0], best_result[1])
    distances = tuple(flat_distance(s, flat, norm) for s in sets)
    residual = float(max(distances))
    if residual > tol:
        raise ResolutionError(
            "distances equalized but did not vanish; a hypothesis likely "
            "fails between grid samples", best_residual=residual)
    return TransversalCertificate(object=flat, distances=distances,
                                  residual=residual)


def equal_deviation_k_flat(sets, k: int, norm: Norm = EUCLIDEAN,
                           grid: DirectionGrid | None = None,
                           tol: float = SOLVE_TOL):
    """A k-flat from which all n+1 sets deviate equally."""
    n = sets[0].dimension
    if len(sets) != n + 1:
        raise ValueError(f"need n+1 = {n + 1} sets in R^{n}, got {len(sets)}")
    if grid is None:
        grid = make_grid(n, k, 0.02 if n == 2 else 0.1)
    _check_grid(grid, n, k)
    from .predicates import is_non_antipodal_family

    ok, offending = is_non_antipodal_family(sets)
    if not ok:
        raise PreconditionError(
            f"the family is antipodal (member {offending[0]})",
            member=offending[0], pair=offending[1])

    if not norm.is_euclidean:
        return _equal_deviation_generic(sets, k, norm, grid, tol)

    vert_list = [s.vertices for s in sets]

    def dev_table(fiber, qs):
        qs = np.atleast_2d(qs)
        out = np.empty((qs.shape[0], len(sets)))
        for i, verts in enumerate(vert_list):
            coords = verts @ fiber
            diff = coords[None, :, :] - qs[:, None, :]
            out[:, i] = np.linalg.norm(diff, axis=2).max(axis=1)
        return out

    radius = _search_radius(sets)
    best = (math.inf, None, None)
    for rep in grid.representatives:
        fiber = orthonormal_complement(grid.frame(rep))
        cands = _fiber_candidates(sets, fiber, radius)
        vals = _spread(dev_table(fiber, cands))
        j = int(np.argmin(vals))
        if vals[j] < best[0]:
            best = (float(vals[j]), fiber, cands[j])
    _, fiber, q0 = best
    n_dim = fiber.shape[0]
    fdim = fiber.shape[1]

    def fun(z):
        if fdim == 1:
            v = z[:n_dim]
            nv = np.linalg.norm(v)
            if nv < 1e-9:
                return math.inf
            return float(_spread(dev_table(v[:, None] / nv, z[n_dim:]))[0])
        d = z[:n_dim]
        nd = np.linalg.norm(d)
        if nd < 1e-9:
            return math.inf
        fb = orthonormal_complement(d[:, None] / nd)
        p = fb @ z[n_dim:]
        return float(_spread(dev_table(fb, (fb.T @ p)[None, :]))[0])

    if fdim == 1:
        z0 = np.concatenate([fiber[:, 0], q0])
    else:
        z0 = np.concatenate([orthonormal_complement(fiber)[:, 0], q0])
    z, _ = refine(fun, z0, scale=2.0 * grid.resolution)
    if fdim == 1:
        w = z[:n_dim] / np.linalg.norm(z[:n_dim])
        fiber_f, q_f = w[:, None], z[n_dim:]
    else:
        d = z[:n_dim] / np.linalg.norm(z[:n_dim])
        fiber_f = orthonormal_complement(d[:, None])
        q_f = z[n_dim:]
    flat = _flat_from_fiber(n, fiber_f, q_f)
    deviations = tuple(deviation(s, flat, norm) for s in sets)
    spread = float(max(deviations) - min(deviations))
    if spread > tol:
        raise ResolutionError("equal-deviation flat not certified at this "
                              "resolution", best_residual=spread)
    return DeviationCertificate(flat=flat, deviations=deviations,
                                common_deviation=float(np.mean(deviations)),
                                spread=spread)


def _equal_deviation_generic(sets, k, norm, grid, tol):
    def spread_of(flat):
        devs = [deviation(s, flat, norm) for s in sets]
        return max(devs) - min(devs)

    radius = _search_radius(sets)
    best = (math.inf, None, None)
    for rep in grid.representatives:
        fiber = orthonormal_complement(grid.frame(rep))
        for q in _fiber_candidates(sets, fiber, radius)[::4]:
            val = spread_of(_flat_from_fiber(sets[0].dimension, fiber, q))
            if val < best[0]:
                best = (val, fiber, q)
    _, fiber, q0 = best
    q, _ = refine(lambda q: spread_of(
        _flat_from_fiber(sets[0].dimension, fiber, q)), q0,
        scale=2.0 * grid.resolution)
    flat = _flat_from_fiber(sets[0].dimension, fiber, q)
    deviations = tuple(deviation(s, flat, norm) for s in sets)
    spread = float(max(deviations) - min(deviations))
    if spread > tol:
        raise ResolutionError("equal-deviation flat not certified at this "
                              "resolution", best_residual=spread)
    return DeviationCertificate(flat=flat, deviations=deviations,
                                common_deviation=float(np.mean(deviations)),
                                spread=spread)


# ---------------------------------------------------------------------------
# section support configurations


def polytope_sections_config(points, k: int, grid: DirectionGrid | None = None,
                             tol: float = SOLVE_TOL):
    """A subspace and direction where two disjoint support hyperplanes touch
    at least n+1 projected points.

    Sections are the orthogonal projections of the given points onto each
    subspace (the canonical continuous choice).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m, n = pts.shape
    if m < n + 1:
        raise ValueError(f"need at least n+1 = {n + 1} points, got {m}")
    needed = n + 1

    def config_values(coords_1d):
        hi = coords_1d.max()
        lo = coords_1d.min()
        slack = np.minimum(hi - coords_1d, coords_1d - lo)
        return hi, lo, np.sort(slack)[needed - 1]

    if k == 1:
        if grid is None:
            grid = make_grid(n, 1, 0.005 if n == 2 else 0.05)
        _check_grid(grid, n, 1)
        for rep in grid.representatives:
            c = pts @ grid.nodes[rep]
            if c.max() - c.min() <= tol:
                raise PreconditionError(
                    "projected polytope has empty interior in a sampled fiber",
                    direction=grid.nodes[rep])

        def objective(v):
            return config_values(pts @ v)[2]

        vals = np.array([objective(grid.nodes[i]) for i in range(len(grid))])
        start = grid.nodes[argbest(vals, grid.nodes)]
        v, best = refine_on_sphere(objective, start, scale=2.0 * grid.resolution)
        coords = pts @ v
        hi, lo, slack = config_values(coords)
        if slack > tol or hi - lo <= tol:
            raise ResolutionError("no certified touching configuration found",
                                  best_residual=float(slack))
        touching = tuple(int(i) for i in np.flatnonzero(
            np.minimum(hi - coords, coords - lo) <= tol))
        return SectionsConfiguration(frame=v[:, None], direction=v,
                                     touching=touching, upper_support=float(hi),
                                     lower_support=float(lo), slack=float(slack))
    if k == n:
        sphere = grid if grid is not None else make_grid(n, 1, 0.02)
        _check_grid(sphere, n, 1)
        centered = pts - pts.mean(axis=0)
        if np.linalg.matrix_rank(centered, tol=1e-9) < n:
            raise PreconditionError("the point set is degenerate: the polytope "
                                    "has empty interior")

        def objective(u):
            return config_values(pts @ u)[2]

        vals = np.array([objective(sphere.nodes[i]) for i in range(len(sphere))])
        start = sphere.nodes[argbest(vals, sphere.nodes)]
        u, best = refine_on_sphere(objective, start,
                                   scale=2.0 * sphere.resolution)
        coords = pts @ u
        hi, lo, slack = config_values(coords)
        if slack > tol or hi - lo <= tol:
            raise ResolutionError("no certified touching configuration found",
                                  best_residual=float(slack))
        touching = tuple(int(i) for i in np.flatnonzero(
            np.minimum(hi - coords, coords - lo) <= tol))
        return SectionsConfiguration(frame=np.eye(n), direction=u,
                                     touching=touching, upper_support=float(hi),
                                     lower_support=float(lo), slack=float(slack))
    # intermediate k: sweep frames x fiber directions (uncertified shapes)
    if grid is None:
        grid = make_grid(n, k, 0.1)
    _check_grid(grid, n, k)
    circle = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    best = (math.inf, None, None)
    for rep in grid.representatives:
        frame = grid.frame(rep)
        coords = pts @ frame
        if np.linalg.matrix_rank(coords - coords.mean(axis=0), tol=1e-9) < k:
            raise PreconditionError("projected polytope has empty interior in "
                                    "a sampled fiber", frame=frame)
        if k == 2:
            fibers = np.column_stack([np.cos(circle), np.sin(circle)])
        else:
            rng = np.random.default_rng(grid.seed)
            fibers = rng.standard_normal((128, k))
            fibers /= np.linalg.norm(fibers, axis=1, keepdims=True)
        for u in fibers:
            hi, lo, slack = config_values(coords @ u)
            if slack < best[0]:
                best = (float(slack), frame, u)
    slack, frame, u = best
    coords = pts @ frame @ u
    hi, lo = coords.max(), coords.min()
    if slack > tol or hi - lo <= tol:
        raise ResolutionError("no certified touching configuration found",
                              best_residual=float(slack))
    touching = tuple(int(i) for i in np.flatnonzero(
        np.minimum(hi - coords, coords - lo) <= tol))
    return SectionsConfiguration(frame=frame, direction=frame @ u,
                                 touching=touching, upper_support=float(hi),
                                 lower_support=float(lo), slack=float(slack))


# ---------------------------------------------------------------------------
# half-sphere piercing


def _subsphere_cap_margin(frame: np.ndarray, spherical_set) -> float:
    """min over caps of (distance from cap center to the subsphere - radius).

    Negative means the subsphere enters the open cap union.
    """
    proj = spherical_set.centers @ frame
    closeness = np.linalg.norm(np.atleast_2d(proj), axis=1)
    d = np.arccos(np.clip(closeness, -1.0, 1.0))
    return float((d - spherical_set.radii).min())


def _halfsphere_set_margin(half: HalfSphere, spherical_set) -> float:
    """min over caps of (distance from cap center to the half-sphere - radius)."""
    vals = [half.point_distance(c) - r
            for c, r in zip(spherical_set.centers, spherical_set.radii)]
    return float(min(vals))


def _check_subsphere_hypothesis(sets, k: int, grid: DirectionGrid):
    for rep in grid.representatives:
        frame = grid.frame(rep)
        for i, s in enumerate(sets):
            if _subsphere_cap_margin(frame, s) >= 0.0:
                raise PreconditionError(
                    f"set {i} misses a sampled k-subsphere", set_index=i,
                    frame=frame)


def _halfsphere_from_vector(z: np.ndarray, n: int, k: int) -> HalfSphere | None:
    cols = z.reshape(k, n).T
    q, r = np.linalg.qr(cols)
    if np.min(np.abs(np.diag(r))) < 1e-9:
        return None
    q = q * np.sign(np.diag(r))
    return HalfSphere(q, q[:, 0])


def _halfsphere_search(sets, k: int, grid: DirectionGrid, objective,
                       maximize: bool = False):
    """Sweep (subspace, pole) pairs, refine jointly; returns (half, value)."""
    n = sets[0].ambient_dim
    sign = -1.0 if maximize else 1.0

    candidates = []
    if k == 1:
        for i in range(len(grid)):
            v = grid.nodes[i]
            candidates.append((HalfSphere(v[:, None], v), v[None, :]))
    else:
        circle = np.linspace(0.0, 2.0 * math.pi, 48, endpoint=False)
        for rep in grid.representatives:
            frame = grid.frame(rep)
            if k == 2:
                poles = np.column_stack([np.cos(circle), np.sin(circle)])
            else:
                rng = np.random.default_rng(grid.seed + rep)
                poles = rng.standard_normal((64, k))
                poles /= np.linalg.norm(poles, axis=1, keepdims=True)
            for p in poles:
                pole = frame @ p
                basis = np.column_stack([pole, *(frame[:, j] for j in range(k))])
                q, r = np.linalg.qr(basis)
                q = q[:, :k] * np.sign(np.diag(r)[:k])
                candidates.append((HalfSphere(q, q[:, 0]), None))
    best = (math.inf, None)
    for half, _ in candidates:
        val = sign * objective(half)
        if val < best[0]:
            best = (float(val), half)
    start = best[1]

    def fun(z):
        half = _halfsphere_from_vector(z, n, k)
        if half is None:
            return math.inf
        return sign * objective(half)

    z0 = np.column_stack([start.pole] +
                         [start.basis[:, j] for j in range(1, k)]).T.ravel()
    z, val = refine(fun, z0, scale=2.0 * grid.resolution)
    half = _halfsphere_from_vector(z, n, k)
    if half is None or sign * objective(half) > best[0]:
        half = start
    return half, sign * (sign * objective(half))


def halfsphere_piercing(sets, k: int, grid: DirectionGrid | None = None,
                        tol: float = SOLVE_TOL):
    """A k-half-sphere meeting all n open cap-union subsets of S^{n-1}.

    Hypothesis (each set meets every k-subsphere) is checked in closed form
    over the sampled subspaces before searching.
    """
    n = sets[0].ambient_dim
    if len(sets) != n:
        raise ValueError(f"need n = {n} subsets of the sphere, got {len(sets)}")
    if grid is None:
        grid = make_grid(n, k, 0.02 if n == 2 else 0.1)
    _check_grid(grid, n, k)
    _check_subsphere_hypothesis(sets, k, grid)

    def objective(half):
        return max(_halfsphere_set_margin(half, s) for s in sets)

    half, value = _halfsphere_search(sets, k, grid, objective)
    if value > -tol:
        raise ResolutionError("no piercing half-sphere certified at this "
                              "resolution", best_residual=float(value))
    witnesses = []
    for s in sets:
        margins = [half.point_distance(c) - r
                   for c, r in zip(s.centers, s.radii)]
        j = int(np.argmin(margins))
        witness = half.nearest_point(s.caps[j].center)
        if not s.contains(witness, tol=-tol):
            raise ResolutionError("witness recheck failed",
                                  best_residual=float(value))
        witnesses.append(witness)
    return HalfSphereCertificate(half_sphere=half, witnesses=tuple(witnesses),
                                 margin=float(-value))


def complementary_halfsphere_alternative(sets, k: int, partition,
                                         grid: DirectionGrid | None = None,
                                         tol: float = SOLVE_TOL):
    """A half-sphere meeting all n+1 sets, or complementary halves avoiding
    the two partition classes."""
    n = sets[0].ambient_dim
    if len(sets) != n + 1:
        raise ValueError(f"need n+1 = {n + 1} subsets of the sphere, "
                         f"got {len(sets)}")
    if grid is None:
        grid = make_grid(n, k, 0.02 if n == 2 else 0.1)
    _check_grid(grid, n, k)
    i1, i2 = check_partition(partition, len(sets))
    _check_subsphere_hypothesis(sets, k, grid)

    def pierce_objective(half):
        return max(_halfsphere_set_margin(half, s) for s in sets)

    half, value = _halfsphere_search(sets, k, grid, pierce_objective)
    if value <= -tol:
        witnesses = tuple(half.nearest_point(
            s.caps[int(np.argmin([half.point_distance(c) - r
                                  for c, r in zip(s.centers, s.radii)]))].center)
            for s in sets)
        return HalfSphereCertificate(half_sphere=half, witnesses=witnesses,
                                     margin=float(-value))

    def avoid_objective(half):
        other = half.opposite()
        first = min(_halfsphere_set_margin(half, sets[i]) for i in i1)
        second = min(_halfsphere_set_margin(other, sets[i]) for i in i2)
        return min(first, second)

    half, value = _halfsphere_search(sets, k, grid, avoid_objective,
                                     maximize=True)
    if value >= -tol:
        return ComplementaryAvoidance(half1=half, half2=half.opposite(),
                                      avoided_first=i1, avoided_second=i2,
                                      margin=float(value))
    raise ResolutionError("neither branch of the half-sphere alternative "
                          "certified at this resolution",
                          best_residual=float(value))


# ---------------------------------------------------------------------------
# colored Helly-type alternatives, desk scale


def colored_transversal_check(families, k: int, m: int | None = None,
                              budget: int = 100_000,
                              tol: float = SOLVE_TOL) -> AlternativesReport:
    """Brute-force report on which Helly-type alternative an instance realizes.

    Alternative 1: some representative system has empty intersection.
    Alternative 2: some family where every subfamily of m+1 or fewer members
    has an (m-1)-flat transversal. Alternative 3 (when the family count is
    n-k+1): parallel k-flats, one transversal per family.
    """
    from .oracles import convex_tuple_feasible, line_transversal_oracle, \
        tuple_intersection_oracle

    n = families[0][0].dimension
    if n > 3:
        raise ValueError("colored checks are desk-scale: n <= 3")
    if any(len(f) > 6 for f in families):
        raise ValueError("colored checks are desk-scale: at most 6 members "
                         "per family")
    if m is None:
        m = k
    holds = []
    notes = []
    inconclusive = False

    try:
        report = tuple_intersection_oracle(families, budget=budget)
        empty_tuple = tuple(report.witness["empty_tuples"][0]) \
            if report.witness["empty"] else None
    except PreconditionError:
        empty_tuple = None
        inconclusive = True
        notes.append("tuple enumeration exceeded the budget")
    if empty_tuple is not None:
        holds.append(1)

    def subfamily_has_flat_transversal(members, flat_dim):
        vert_sets = [mem.pieces[0] for mem in members]
        if flat_dim <= 0:
            return convex_tuple_feasible(vert_sets)
        if flat_dim >= n:
            return True
        if flat_dim == n - 1:
            from .oracles import sweep_directions, _interval_table

            dirs = sweep_directions(n, 2048 if n == 2 else 10_000)
            los, his = _interval_table(members, dirs)
            return bool((his.min(axis=1) - los.max(axis=1)).max() >= -tol)
        report = line_transversal_oracle(members)
        return bool(report.witness["feasible"])

    small_family = None
    for fi, fam in enumerate(families):
        size = min(m + 1, len(fam))
        good = all(subfamily_has_flat_transversal([fam[j] for j in combo], m - 1)
                   for combo in combinations(range(len(fam)), size))
        if good:
            small_family = fi
            holds.append(2)
            break

    parallel_direction = None
    if len(families) == n - k + 1:
        sweep = make_grid(n, k, 0.02 if n == 2 else 0.1)
        for rep in sweep.representatives:
            fiber = orthonormal_complement(sweep.frame(rep))
            ok = True
            for fam in families:
                coords = [mem.vertices @ fiber for mem in fam]
                if fiber.shape[1] == 1:
                    lo = max(float(c.min()) for c in coords)
                    hi = min(float(c.max()) for c in coords)
                    ok = lo <= hi + tol
                else:
                    ok = convex_tuple_feasible(coords)
                if not ok:
                    break
            if ok:
                parallel_direction = sweep.frame(rep)
                holds.append(3)
                break
        if parallel_direction is None:
            notes.append("parallel-flat sweep is resolution-limited")
    if not holds:
        inconclusive = True
        notes.append("no alternative certified at this resolution")
    return AlternativesReport(holds=tuple(sorted(set(holds))),
                              empty_tuple=empty_tuple,
                              small_transversal_family=small_family,
                              parallel_direction=parallel_direction,
                              inconclusive=inconclusive,
                              notes="; ".join(notes))
