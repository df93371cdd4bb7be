"""Constructive covering theorems on discretized spheres, plus quota matching.

Covering sets are closed unions of spherical caps, so membership, mutual
distance, and antipodal clearance are all closed-form; the hypothesis checks
here are exact, only the final point searches are grid-plus-refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, ResolutionError
from .grids import DirectionGrid
from .search import argbest, refine_on_sphere


@dataclass(frozen=True)
class SphericalCap:
    """Closed cap {x : angle(x, center) <= radius} with radius in (0, pi)."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if abs(np.linalg.norm(c) - 1.0) > 1e-9:
            raise ValueError("cap center must be a unit vector")
        if not (0.0 < self.radius < math.pi):
            raise ValueError("cap radius must lie in (0, pi)")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class SphericalClosedSet:
    """Closed union of spherical caps on the unit sphere of R^{n+1}."""

    caps: tuple

    def __post_init__(self):
        if len(self.caps) == 0:
            raise ValueError("a spherical set needs at least one cap")
        caps = tuple(c if isinstance(c, SphericalCap) else SphericalCap(*c)
                     for c in self.caps)
        dims = {c.center.shape[0] for c in caps}
        if len(dims) != 1:
            raise ValueError("cap centers have inconsistent dimensions")
        object.__setattr__(self, "caps", caps)

    @property
    def ambient_dim(self) -> int:
        return self.caps[0].center.shape[0]

    @property
    def centers(self) -> np.ndarray:
        return np.stack([c.center for c in self.caps])

    @property
    def radii(self) -> np.ndarray:
        return np.array([c.radius for c in self.caps])

    def distance(self, points) -> np.ndarray:
        """Geodesic distance from each point to the set (0 inside)."""
        return np.maximum(self.signed_margin(points), 0.0)

    def signed_margin(self, points) -> np.ndarray:
        """min over caps of (angle to center - radius); <= 0 means inside."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        ang = np.arccos(np.clip(p @ self.centers.T, -1.0, 1.0))
        return (ang - self.radii).min(axis=1)

    def contains(self, point, tol: float = 0.0) -> bool:
        return bool(self.signed_margin(point)[0] <= tol)

    def antipodal_clearance(self) -> float:
        """Exact dist(U, -U): min over cap pairs of d(c_i, -c_j) - r_i - r_j."""
        cos = np.clip(self.centers @ (-self.centers).T, -1.0, 1.0)
        d = np.arccos(cos)
        return float(np.min(d - self.radii[:, None] - self.radii[None, :]))

    def rotated(self, rotation) -> "SphericalClosedSet":
        r = np.asarray(rotation, dtype=float)
        return SphericalClosedSet(tuple(SphericalCap(r @ c.center, c.radius)
                                        for c in self.caps))


def verify_covering(sets, grid: DirectionGrid, tol: float = 1e-9):
    """Every grid node must lie within tol of some set; else an uncovered witness."""
    dim = sets[0].ambient_dim
    if grid.k != 1 or grid.n != dim:
        raise ValueError("grid does not match the sphere dimension")
    dists = np.stack([s.distance(grid.nodes) for s in sets]).min(axis=0)
    worst = int(np.argmax(dists))
    if dists[worst] > tol:
        return False, grid.nodes[worst]
    return True, None


def check_no_antipodal_pairs(spherical_set: SphericalClosedSet) -> bool:
    """Exact for cap unions: no point x has both x and -x inside."""
    return spherical_set.antipodal_clearance() > 0.0


def _require_cover_hypotheses(cover, grid, context: str):
    covered, witness = verify_covering(cover, grid)
    if not covered:
        raise PreconditionError(f"{context}: covering fails at a grid node",
                                uncovered=witness)
    for i, s in enumerate(cover):
        if not check_no_antipodal_pairs(s):
            raise PreconditionError(
                f"{context}: set {i} contains an antipodal pair",
                set_index=i, clearance=s.antipodal_clearance())


def partition_of_unity_radius(cover) -> float:
    """Support radius for the distance bump functions: min clearance / 4.

    The construction needs dist(U_i, -U_i) > 2 * radius strictly.
    """
    return min(s.antipodal_clearance() for s in cover) / 4.0


def equivariant_gap_map(cover, points: np.ndarray, radius: float) -> np.ndarray:
    """g_i(x) = f_i(x) - f_i(-x) for the distance-based partition of unity f.

    Antisymmetric by construction: evaluating at -x flips the sign exactly.
    """
    pts = np.atleast_2d(points)
    bumps = np.stack([np.maximum(radius - s.distance(pts), 0.0) for s in cover],
                     axis=1)
    bumps_anti = np.stack([np.maximum(radius - s.distance(-pts), 0.0)
                           for s in cover], axis=1)
    f = bumps / bumps.sum(axis=1, keepdims=True)
    f_anti = bumps_anti / bumps_anti.sum(axis=1, keepdims=True)
    return f - f_anti


def _partition_target(sizes, count: int) -> np.ndarray:
    n1, n2 = sizes
    c = math.sqrt(n1 * n2 * count)
    return np.array([n2 / c] * n1 + [-n1 / c] * n2)


def find_partition_point(cover, partition, grid: DirectionGrid,
                         tol: float = 1e-3):
    """Point x in every set of F1 with -x in every set of F2.

    Strategy straight from the constructive proof: normalize the equivariant
    gap map to the sphere, chase the preimage of the partition's target point,
    then polish the true membership residuals.
    """
    sphere_dim = cover[0].ambient_dim - 1
    if len(cover) != sphere_dim + 2:
        raise PreconditionError(
            f"need exactly {sphere_dim + 2} covering sets on S^{sphere_dim}, "
            f"got {len(cover)}")
    i1, i2 = tuple(partition[0]), tuple(partition[1])
    if not i1 or not i2 or sorted(i1 + i2) != list(range(len(cover))):
        raise ValueError("partition must split the index set into two nonempty parts")
    _require_cover_hypotheses(cover, grid, "partition point")

    radius = partition_of_unity_radius(cover)
    order = list(i1) + list(i2)
    target = _partition_target((len(i1), len(i2)), len(cover))

    def gap_residual(points):
        g = equivariant_gap_map(cover, points, radius)[:, order]
        h = g / np.linalg.norm(g, axis=1, keepdims=True)
        return np.linalg.norm(h - target, axis=1)

    vals = gap_residual(grid.nodes)
    start = grid.nodes[argbest(vals, grid.nodes)]
    x, _ = refine_on_sphere(lambda p: float(gap_residual(p[None, :])[0]), start,
                            scale=2.0 * grid.resolution)

    def membership_residual(p):
        d1 = max(float(cover[i].distance(p[None, :])[0]) for i in i1)
        d2 = max(float(cover[i].distance(-p[None, :])[0]) for i in i2)
        return max(d1, d2)

    x, best = refine_on_sphere(lambda p: membership_residual(p), x,
                               scale=2.0 * grid.resolution)
    if best > tol:
        raise ResolutionError("partition point not certified at this resolution",
                              best_residual=best)
    res1 = tuple(float(cover[i].distance(x[None, :])[0]) for i in i1)
    res2 = tuple(float(cover[i].distance(-x[None, :])[0]) for i in i2)
    return PartitionPointCertificate(point=x, first=i1, second=i2,
                                     residuals_first=res1, residuals_second=res2)


@dataclass(frozen=True)
class PartitionPointCertificate:
    point: np.ndarray
    first: tuple
    second: tuple
    residuals_first: tuple
    residuals_second: tuple

    @property
    def residual(self) -> float:
        return max(self.residuals_first + self.residuals_second)


@dataclass(frozen=True)
class DeepPointCertificate:
    point: np.ndarray
    incident: tuple          # sets within tol of x or -x
    residuals: tuple         # min(dist(x, U_i), dist(-x, U_i)) per set
    count: int


def find_deep_point(cover, grid: DirectionGrid, tol: float = 1e-3):
    """Point where at least (sphere dim + 2) sets touch x or -x."""
    sphere_dim = cover[0].ambient_dim - 1
    needed = sphere_dim + 2
    _require_cover_hypotheses(cover, grid, "deep point")

    def residuals(p):
        pts = p[None, :]
        return np.array([min(float(s.distance(pts)[0]), float(s.distance(-pts)[0]))
                         for s in cover])

    def objective(p):
        return float(np.sort(residuals(p))[needed - 1])

    dists = np.stack([np.minimum(s.distance(grid.nodes),
                                 s.distance(-grid.nodes)) for s in cover])
    vals = np.sort(dists, axis=0)[needed - 1]
    start = grid.nodes[argbest(vals, grid.nodes)]
    x, best = refine_on_sphere(objective, start, scale=2.0 * grid.resolution)
    if best > tol:
        raise ResolutionError(
            f"no point with {needed} incidences found at this resolution",
            best_residual=best)
    res = residuals(x)
    incident = tuple(int(i) for i in np.flatnonzero(res <= tol))
    return DeepPointCertificate(point=x, incident=incident,
                                residuals=tuple(float(r) for r in res),
                                count=len(incident))


# ---------------------------------------------------------------------------
# invariant covers with inessentiality witnesses

def _validate_coloring(spherical_set: SphericalClosedSet, coloring,
                       tol: float = 1e-9):
    half_a, half_b = tuple(coloring[0]), tuple(coloring[1])
    caps = spherical_set.caps
    if sorted(half_a + half_b) != list(range(len(caps))):
        raise PreconditionError("coloring must partition the cap indices")
    for i in half_a:
        mirrored = -caps[i].center
        if not any(np.allclose(caps[j].center, mirrored, atol=1e-9)
                   and abs(caps[j].radius - caps[i].radius) <= 1e-9
                   for j in half_b):
            raise PreconditionError(
                "coloring is not equivariant: a cap's antipode is missing "
                "from the other half", cap_index=i)
    ua = SphericalClosedSet(tuple(caps[i] for i in half_a))
    ub = SphericalClosedSet(tuple(caps[i] for i in half_b))
    cos = np.clip(ua.centers @ ub.centers.T, -1.0, 1.0)
    gap = np.arccos(cos) - ua.radii[:, None] - ub.radii[None, :]
    if float(gap.min()) <= tol:
        raise PreconditionError("the two colored halves intersect",
                                gap=float(gap.min()))


@dataclass(frozen=True)
class CommonPointCertificate:
    point: np.ndarray
    incident: tuple
    residuals: tuple


def find_ls_intersection(cover, colorings, grid: DirectionGrid,
                         tol: float = 1e-3):
    """Common point of (sphere dim + 1) invariant inessential covering sets."""
    sphere_dim = cover[0].ambient_dim - 1
    needed = sphere_dim + 1
    covered, witness = verify_covering(cover, grid)
    if not covered:
        raise PreconditionError("covering fails at a grid node", uncovered=witness)
    for s, coloring in zip(cover, colorings):
        _validate_coloring(s, coloring)
    if len(cover) < needed:
        raise PreconditionError(
            f"only {len(cover)} sets cover the sphere: the covering theorem "
            f"requires at least {needed}, so the input is inconsistent",
            count=len(cover))

    def objective(p):
        d = np.sort(np.concatenate([s.distance(p[None, :]) for s in cover]))
        return float(d[needed - 1])

    dists = np.stack([s.distance(grid.nodes) for s in cover])
    vals = np.sort(dists, axis=0)[needed - 1]
    start = grid.nodes[argbest(vals, grid.nodes)]
    x, best = refine_on_sphere(objective, start, scale=2.0 * grid.resolution)
    if best > tol:
        raise ResolutionError(
            f"no common point of {needed} sets found at this resolution",
            best_residual=best)
    res = np.concatenate([s.distance(x[None, :]) for s in cover])
    incident = tuple(int(i) for i in np.flatnonzero(res <= tol))[:max(needed, 1)]
    return CommonPointCertificate(point=x, incident=incident,
                                  residuals=tuple(float(r) for r in res))


# ---------------------------------------------------------------------------
# generalized Hall matching

@dataclass(frozen=True)
class QuotaMatching:
    """Assignment tau: W -> V hitting every quota exactly."""

    assignment: dict
    quotas: dict

    def counts(self) -> dict:
        out = {v: 0 for v in self.quotas}
        for v in self.assignment.values():
            out[v] += 1
        return out


@dataclass(frozen=True)
class HallViolation:
    """Inclusion-minimal left subset whose neighborhood is too small."""

    subset: tuple
    neighborhood_size: int
    demand: int


def hall_matching(edges, quotas: dict, right=None):
    """Quota matching by vertex splitting plus augmenting paths; exact.

    Returns a QuotaMatching, or a HallViolation certifying infeasibility.
    """
    edge_list = [(v, w) for v, w in edges]
    lefts = list(quotas.keys())
    rights = list(right) if right is not None else \
        sorted({w for _, w in edge_list}, key=str)
    for v, w in edge_list:
        if v not in quotas:
            raise ValueError(f"edge endpoint {v!r} has no quota")
        if w not in rights:
            raise ValueError(f"edge endpoint {w!r} not in the right vertex set")
    for v, a in quotas.items():
        if not (isinstance(a, (int, np.integer)) and a >= 1):
            raise ValueError(f"quota of {v!r} must be a positive integer")
    demand = sum(quotas.values())
    if demand != len(rights):
        raise ValueError(f"quota sum {demand} must equal |W| = {len(rights)}")

    adj = {v: set() for v in lefts}
    for v, w in edge_list:
        adj[v].add(w)
    w_index = {w: i for i, w in enumerate(rights)}
    copies = [(v, c) for v in lefts for c in range(quotas[v])]
    copy_adj = [sorted(w_index[w] for w in adj[v]) for v, _ in copies]

    match_of_right = [-1] * len(rights)          # right -> copy index
    match_of_copy = [-1] * len(copies)

    def augment(ci, seen):
        for wi in copy_adj[ci]:
            if seen[wi]:
                continue
            seen[wi] = True
            if match_of_right[wi] == -1 or augment(match_of_right[wi], seen):
                match_of_right[wi] = ci
                match_of_copy[ci] = wi
                return True
        return False

    matched = 0
    for ci in range(len(copies)):
        if augment(ci, [False] * len(rights)):
            matched += 1

    if matched == len(rights):
        assignment = {rights[wi]: copies[ci][0]
                      for wi, ci in enumerate(match_of_right)}
        return QuotaMatching(assignment=assignment, quotas=dict(quotas))

    def deficient(subset):
        hood = set().union(*(adj[v] for v in subset)) if subset else set()
        want = sum(quotas[v] for v in subset)
        return len(hood) < want, len(hood), want

    # alternating reachability from an unmatched copy yields a Hall violator
    unmatched = [ci for ci in range(len(copies)) if match_of_copy[ci] == -1]
    reach_left = set()
    frontier = list(unmatched)
    seen_right = set()
    while frontier:
        ci = frontier.pop()
        if copies[ci][0] in reach_left and ci not in unmatched:
            pass
        reach_left.add(copies[ci][0])
        for wi in copy_adj[ci]:
            if wi in seen_right:
                continue
            seen_right.add(wi)
            nxt = match_of_right[wi]
            if nxt != -1:
                frontier.append(nxt)
    violator = sorted(reach_left, key=str)
    # greedy prune to an inclusion-minimal deficient subset
    changed = True
    while changed:
        changed = False
        for v in list(violator):
            trial = [u for u in violator if u != v]
            if trial and deficient(trial)[0]:
                violator = trial
                changed = True
                break
    bad, hood, want = deficient(violator)
    assert bad, "internal error: reachability set is not deficient"
    return HallViolation(subset=tuple(violator), neighborhood_size=hood,
                         demand=want)
