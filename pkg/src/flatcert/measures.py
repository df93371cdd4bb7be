"""Measures with deviation: reliable intersection, flatness, and
prescribed-fraction hyperplane partitions.

Atom clouds are made continuous through a midpoint-interpolated empirical
CDF per direction, so half-space mass varies continuously with the
hyperplane across each support span.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, ResolutionError
from .geometry import GEO_TOL, SOLVE_TOL, CompactSet, OrientedHyperplane, Segment
from .grids import DirectionGrid, make_grid
from .search import argbest, refine_on_sphere, refine_sphere_product


@dataclass(frozen=True)
class MeasureWithDeviation:
    """Weighted atoms plus a deviation eps in [0, 1/2)."""

    atoms: np.ndarray
    weights: np.ndarray
    eps: float

    def __post_init__(self):
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        weights = np.asarray(self.weights, dtype=float)
        if atoms.shape[0] != weights.shape[0] or atoms.shape[0] == 0:
            raise ValueError("need one weight per atom")
        if np.any(weights <= 0.0):
            raise ValueError("atom weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1")
        if not (0.0 <= self.eps < 0.5):
            raise ValueError("deviation must lie in [0, 1/2)")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "eps", float(self.eps))

    @classmethod
    def from_points(cls, points, eps: float = 0.0) -> "MeasureWithDeviation":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        w = np.full(pts.shape[0], 1.0 / pts.shape[0])
        return cls(pts, w, eps)

    @property
    def dimension(self) -> int:
        return self.atoms.shape[1]

    @property
    def support_hull(self) -> CompactSet:
        return CompactSet.from_points(self.atoms)

    def transformed(self, rotation, shift=None) -> "MeasureWithDeviation":
        r = np.asarray(rotation, dtype=float)
        t = 0.0 if shift is None else np.asarray(shift, dtype=float)
        return MeasureWithDeviation(self.atoms @ r.T + t, self.weights, self.eps)


@dataclass(frozen=True)
class DirectionalCDF:
    """Midpoint-interpolated empirical CDF of a measure along a direction.

    The value at the j-th distinct projected position is the cumulative
    weight below it plus half the weight sitting on it; between positions the
    CDF is linear, outside the span it clamps to 0 and 1.
    """

    direction: np.ndarray
    positions: np.ndarray
    values: np.ndarray

    def mass_below(self, offsets) -> np.ndarray:
        t = np.atleast_1d(np.asarray(offsets, dtype=float))
        out = np.interp(t, self.positions, self.values)
        out[t < self.positions[0]] = 0.0
        out[t > self.positions[-1]] = 1.0
        return out

    def quantile_clamped(self, alpha: float) -> float:
        """Total inverse: clamps to the span ends outside the value range."""
        return float(np.interp(alpha, self.values, self.positions))

    @property
    def span(self) -> Segment:
        return Segment(float(self.positions[0]), float(self.positions[-1]))


def directional_cdf(mu: MeasureWithDeviation, direction) -> DirectionalCDF:
    v = np.asarray(direction, dtype=float)
    t = mu.atoms @ v
    order = np.argsort(t, kind="stable")
    t = t[order]
    w = mu.weights[order]
    scale = 1.0 + float(np.abs(t).max())
    # merge coincident projections so breakpoint values stay strictly increasing
    starts = np.flatnonzero(np.concatenate(
        [[True], np.diff(t) > 1e-12 * scale]))
    positions = t[starts]
    group_w = np.add.reduceat(w, starts)
    below = np.concatenate([[0.0], np.cumsum(group_w)[:-1]])
    values = below + 0.5 * group_w
    return DirectionalCDF(direction=v, positions=positions, values=values)


def half_space_mass(mu: MeasureWithDeviation, h: OrientedHyperplane) -> float:
    """Interpolated mass of the closed negative side H-."""
    if mu.dimension != h.dimension:
        raise ValueError("measure and hyperplane dimensions disagree")
    return float(directional_cdf(mu, h.normal).mass_below(h.offset)[0])


def quantile(mu: MeasureWithDeviation, direction, alpha: float) -> float:
    """The unique offset where the directional CDF equals alpha.

    Defined on the closed value band of the interpolated CDF; outside it the
    CDF is flat at 0 or 1 and the inverse does not exist.
    """
    cdf = directional_cdf(mu, direction)
    lo, hi = float(cdf.values[0]), float(cdf.values[-1])
    if not (lo - 1e-12 <= alpha <= hi + 1e-12):
        raise ValueError(
            f"alpha={alpha} outside the invertible band [{lo}, {hi}] "
            f"for this direction")
    return cdf.quantile_clamped(alpha)


def reliable_interval(mu: MeasureWithDeviation, direction) -> Segment:
    """Offsets whose hyperplanes reliably intersect mu, clamped to the span."""
    cdf = directional_cdf(mu, direction)
    lo = cdf.quantile_clamped(max(mu.eps, float(cdf.values[0])))
    hi = cdf.quantile_clamped(min(1.0 - mu.eps, float(cdf.values[-1])))
    return Segment(min(lo, hi), max(lo, hi))


def reliably_intersects(h: OrientedHyperplane, mu: MeasureWithDeviation) -> bool:
    """Both closed sides carry mass at least eps."""
    mass = half_space_mass(mu, h)
    return mu.eps <= mass <= 1.0 - mu.eps


def almost_contains(mu: MeasureWithDeviation, h: OrientedHyperplane,
                    side: str = "negative") -> bool:
    """Strictly more than 1 - eps of the mass on the given side."""
    mass = half_space_mass(mu, h)
    if side == "negative":
        return mass > 1.0 - mu.eps
    if side == "positive":
        return 1.0 - mass > 1.0 - mu.eps
    raise ValueError("side must be 'negative' or 'positive'")


def almost_separates(h: OrientedHyperplane, first, second) -> bool:
    """Every measure of `first` almost in H-, every one of `second` in H+."""
    return all(almost_contains(mu, h, "negative") for mu in first) and \
        all(almost_contains(mu, h, "positive") for mu in second)


# ---------------------------------------------------------------------------
# the measure alternative


@dataclass(frozen=True)
class MeasureTransversal:
    hyperplane: OrientedHyperplane
    masses: tuple


@dataclass(frozen=True)
class MeasureSeparation:
    hyperplane: OrientedHyperplane
    masses: tuple
    negative_side: tuple
    positive_side: tuple


def _measure_interval_fun(measures):
    def batch(directions):
        los = np.empty((directions.shape[0], len(measures)))
        his = np.empty_like(los)
        for i, mu in enumerate(measures):
            for d in range(directions.shape[0]):
                seg = reliable_interval(mu, directions[d])
                los[d, i] = seg.lo
                his[d, i] = seg.hi
        return los, his

    return batch


def measure_alternative(measures, partition, grid: DirectionGrid,
                        tol: float = SOLVE_TOL):
    """A hyperplane reliably intersecting all measures, or one almost
    separating the partition classes."""
    from .solvers import _alternative_engine, _check_grid, check_partition

    n = measures[0].dimension
    if len(measures) != n + 1:
        raise ValueError(f"need n+1 = {n + 1} measures in R^{n}, "
                         f"got {len(measures)}")
    _check_grid(grid, n)
    i1, i2 = check_partition(partition, len(measures))
    branch, v, t, value = _alternative_engine(_measure_interval_fun(measures),
                                              grid, (i1, i2), tol)
    h = OrientedHyperplane(v, t)
    masses = tuple(half_space_mass(mu, h) for mu in measures)
    if branch == "transversal":
        bad = [i for i, mu in enumerate(measures)
               if not (mu.eps - tol <= masses[i] <= 1.0 - mu.eps + tol)]
        if bad:
            raise ResolutionError("transversal recheck failed",
                                  best_residual=value, measures=bad)
        return MeasureTransversal(hyperplane=h, masses=masses)
    if not almost_separates(h, [measures[i] for i in i1],
                            [measures[i] for i in i2]):
        raise ResolutionError("separation recheck failed (gap too thin)",
                              best_residual=value)
    return MeasureSeparation(hyperplane=h, masses=masses,
                             negative_side=i1, positive_side=i2)


# ---------------------------------------------------------------------------
# flatness of a measure family


@dataclass(frozen=True)
class FlatnessVerdict:
    status: str                    # "flat" | "not_flat" | "unknown"
    method: str = ""
    lift: np.ndarray | None = None         # chosen directions, one per class
    witness_cycle: np.ndarray | None = None

    @property
    def is_flat(self) -> bool:
        return self.status == "flat"


def _supports_separated(measures) -> bool:
    """Paper's sufficient condition: no (n-2)-flat meets every support hull.

    Exact for n=2 (disjoint hulls); for n=3 it relies on the one-sided line
    transversal sweep, so a miss is treated as evidence, not proof.
    """
    n = measures[0].dimension
    hulls = [mu.support_hull for mu in measures]
    if n == 2:
        from .geometry import _min_norm_point

        diff = (hulls[0].vertices[:, None, :] -
                hulls[1].vertices[None, :, :]).reshape(-1, 2)
        v, _ = _min_norm_point(diff)
        return float(np.linalg.norm(v)) > GEO_TOL
    if n == 3:
        from .oracles import line_transversal_oracle

        report = line_transversal_oracle(hulls)
        return not report.witness["feasible"]
    return False


def is_flat_family(measures, grid: DirectionGrid, tol: float = SOLVE_TOL):
    """Can the common reliable-direction set be lifted to the sphere?

    Tries the separated-supports sufficient condition first, then analyzes
    the sampled direction set: paired components lift, a self-antipodal
    component is an odd loop (NotFlat), an empty set is Unknown.
    """
    n = measures[0].dimension
    if len(measures) != n:
        raise ValueError(f"flatness is defined for n = {n} measures in R^{n}, "
                         f"got {len(measures)}")
    _check_sphere_grid(grid, n)
    if _supports_separated(measures):
        return FlatnessVerdict(status="flat", method="separated-supports")

    los, his = _measure_interval_fun(measures)(grid.nodes)
    in_y = his.min(axis=1) - los.max(axis=1) >= -tol
    if not np.any(in_y):
        return FlatnessVerdict(status="unknown", method="lift",
                               lift=None, witness_cycle=None)
    # connected components of the sampled set in the sphere graph
    comp = np.full(len(grid), -1)
    comp_id = 0
    for seed_node in np.flatnonzero(in_y):
        if comp[seed_node] != -1:
            continue
        stack = [int(seed_node)]
        comp[seed_node] = comp_id
        while stack:
            i = stack.pop()
            for j in grid.neighbors[i]:
                if in_y[j] and comp[j] == -1:
                    comp[j] = comp_id
                    stack.append(int(j))
        comp_id += 1
    chosen = []
    paired = set()
    for c in range(comp_id):
        if c in paired:
            continue
        nodes = np.flatnonzero(comp == c)
        anti_comps = set(comp[grid.antipode[nodes]])
        if c in anti_comps:
            cycle = _odd_cycle_witness(grid, in_y, comp, c)
            return FlatnessVerdict(status="not_flat", method="lift",
                                   witness_cycle=grid.nodes[cycle])
        paired.update(anti_comps)
        chosen.append(nodes)
    lift = np.vstack([grid.nodes[nodes] for nodes in chosen])
    return FlatnessVerdict(status="flat", method="lift", lift=lift)


def _odd_cycle_witness(grid: DirectionGrid, in_y, comp, c) -> np.ndarray:
    """BFS path from a node to its antipode inside one component."""
    from collections import deque

    start = int(np.flatnonzero(comp == c)[0])
    goal = int(grid.antipode[start])
    prev = {start: None}
    queue = deque([start])
    while queue:
        i = queue.popleft()
        if i == goal:
            break
        for j in grid.neighbors[i]:
            j = int(j)
            if in_y[j] and j not in prev:
                prev[j] = i
                queue.append(j)
    path = [goal]
    while prev.get(path[-1]) is not None:
        path.append(prev[path[-1]])
    return np.array(path[::-1], dtype=int)


def _check_sphere_grid(grid: DirectionGrid, n: int):
    if grid.n != n or grid.k != 1:
        raise ValueError(f"grid is for (n={grid.n}, k={grid.k}), "
                         f"needed a sphere grid in R^{n}")


# ---------------------------------------------------------------------------
# sandwich solvers


@dataclass(frozen=True)
class PartitionCertificate:
    hyperplane: OrientedHyperplane
    masses: tuple
    targets: tuple
    residual: float


def _best_offset(cdfs, targets):
    """Exact inner minimization of max_i |F_i(t) - target_i| over t.

    The upper envelope max(F_i - a_i) increases and the lower one decreases,
    so their crossing is found by bisection.
    """
    lo = min(float(c.positions[0]) for c in cdfs) - 1.0
    hi = max(float(c.positions[-1]) for c in cdfs) + 1.0

    def upward(t):
        return max(float(c.mass_below(t)[0]) - a for c, a in zip(cdfs, targets))

    def downward(t):
        return max(a - float(c.mass_below(t)[0]) for c, a in zip(cdfs, targets))

    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if upward(mid) - downward(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    return t, max(upward(t), downward(t))


def _sandwich_objective(measures, targets):
    def value(v):
        cdfs = [directional_cdf(mu, v) for mu in measures]
        return _best_offset(cdfs, targets)

    return value


def _sandwich_surrogate(measures, targets):
    """Residual at the mean of the per-measure target offsets.

    Upper-bounds the exact inner minimum and shares its zeros, so it is a
    sound sweep-ranking objective at a fraction of the cost.
    """

    def value(v):
        cdfs = [directional_cdf(mu, v) for mu in measures]
        t = float(np.mean([c.quantile_clamped(a)
                           for c, a in zip(cdfs, targets)]))
        return max(abs(float(c.mass_below(t)[0]) - a)
                   for c, a in zip(cdfs, targets))

    return value


def ham_sandwich(measures, grid: DirectionGrid | None = None,
                 tol: float = SOLVE_TOL):
    """A hyperplane halving every measure's interpolated mass."""
    d = measures[0].dimension
    if len(measures) != d:
        raise ValueError(f"need d = {d} measures in R^{d}, got {len(measures)}")
    if grid is None:
        grid = make_grid(d, 1, 0.01 if d == 2 else 0.08)
    _check_sphere_grid(grid, d)
    targets = tuple(0.5 for _ in measures)
    return _solve_sandwich(measures, targets, grid, tol)


def generalized_ham_sandwich(measures, alpha, grid: DirectionGrid | None = None,
                             tol: float = SOLVE_TOL,
                             flatness: FlatnessVerdict | None = None):
    """A hyperplane giving each flat measure its prescribed boundary fraction.

    Each alpha_i must equal eps_i or 1 - eps_i; the family must certify as
    flat (the verdict may be passed in to skip recomputation).
    """
    n = measures[0].dimension
    if len(measures) != n:
        raise ValueError(f"need n = {n} measures in R^{n}, got {len(measures)}")
    targets = tuple(float(a) for a in alpha)
    for i, (mu, a) in enumerate(zip(measures, targets)):
        if not (math.isclose(a, mu.eps, abs_tol=1e-12) or
                math.isclose(a, 1.0 - mu.eps, abs_tol=1e-12)):
            raise PreconditionError(
                f"alpha[{i}]={a} must equal eps={mu.eps} or 1-eps: arbitrary "
                f"fractions are only guaranteed at the deviation boundary",
                index=i)
        if mu.eps <= float(mu.weights.min()) / 2.0 and mu.eps > 0.0:
            raise PreconditionError(
                f"measure {i}: eps={mu.eps} is below half the smallest atom "
                f"weight, so boundary quantiles are not resolvable", index=i)
    if grid is None:
        grid = make_grid(n, 1, 0.01 if n == 2 else 0.08)
    _check_sphere_grid(grid, n)
    verdict = flatness if flatness is not None else is_flat_family(measures, grid)
    if not verdict.is_flat:
        raise PreconditionError(
            f"the measure family did not certify as flat ({verdict.status})",
            verdict=verdict)
    restrict = verdict.lift if verdict.lift is not None else None
    return _solve_sandwich(measures, targets, grid, tol, restrict=restrict)


def _solve_sandwich(measures, targets, grid: DirectionGrid, tol: float,
                    restrict: np.ndarray | None = None):
    value = _sandwich_objective(measures, targets)
    surrogate = _sandwich_surrogate(measures, targets)
    if restrict is not None and len(restrict):
        nodes = np.vstack([restrict, -restrict])
    else:
        nodes = grid.nodes
    vals = np.array([surrogate(v) for v in nodes])
    start = nodes[argbest(vals, nodes)]
    v, best = refine_on_sphere(surrogate, start, scale=2.0 * grid.resolution)
    t, best = value(v)
    # joint polish in (direction, offset) mops up the last digits
    def joint(vv, extra):
        cdfs = [directional_cdf(mu, vv) for mu in measures]
        return max(abs(float(c.mass_below(extra[0])[0]) - a)
                   for c, a in zip(cdfs, targets))

    v2, t2, best2 = refine_sphere_product(joint, v, [t],
                                          scale=0.5 * grid.resolution)
    if best2 < best:
        v, t, best = v2, float(t2[0]), best2
    h = OrientedHyperplane(v, float(t))
    masses = tuple(half_space_mass(mu, h) for mu in measures)
    residual = float(max(abs(m - a) for m, a in zip(masses, targets)))
    if residual > tol:
        raise ResolutionError("sandwich hyperplane not certified at this "
                              "resolution", best_residual=residual)
    return PartitionCertificate(hyperplane=h, masses=masses, targets=targets,
                                residual=residual)
