"""Independent brute-force references for the solvers.

Deliberately naive (dense sweeps, exhaustive tuples, no pruning): their only
job is to be trustworthy. Each run is summarized in an OracleReport whose
digest ties it to the exact instance data.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import PreconditionError
from .geometry import GEO_TOL, CompactSet, convex_hull_2d, orthonormal_complement, \
    polygon_distance_2d
from .grids import _hemisphere_spiral


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, CompactSet):
        return [p.tolist() for p in obj.pieces]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def instance_digest(payload) -> str:
    """SHA-256 over a canonical JSON rendering of the instance data."""
    text = json.dumps(_jsonable(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True)
class OracleReport:
    task: str
    instance_digest: str
    parameter_count: int
    best_objective: float
    witness: dict


def sweep_directions(n: int, count: int) -> np.ndarray:
    """Dense unit-direction sample: equal angles (n=2) or a full spiral (n=3)."""
    if n == 2:
        theta = 2.0 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if n == 3:
        half = _hemisphere_spiral((count + 1) // 2)
        return np.vstack([half, -half])[:count]
    raise ValueError(f"direction sweeps support n in {{2, 3}}, got {n}")


def _interval_table(sets, directions):
    """los[d, i], his[d, i] of the projection intervals for every direction."""
    los = np.empty((directions.shape[0], len(sets)))
    his = np.empty_like(los)
    for i, body in enumerate(sets):
        dots = directions @ body.vertices.T
        los[:, i] = dots.min(axis=1)
        his[:, i] = dots.max(axis=1)
    return los, his


def _measure_interval_table(measures, directions):
    from .measures import reliable_interval

    los = np.empty((directions.shape[0], len(measures)))
    his = np.empty_like(los)
    for i, mu in enumerate(measures):
        for d, v in enumerate(directions):
            seg = reliable_interval(mu, v)
            los[d, i] = seg.lo
            his[d, i] = seg.hi
    return los, his


def direction_sweep_oracle(items, task: str, resolution: int,
                           partition=None, alpha=None) -> OracleReport:
    """Exhaustive direction sweep for overlap / separation / mass objectives.

    The main solvers must match the reported optimum within 10 x the solver
    tolerance.
    """
    first = items[0]
    n = first.dimension if isinstance(first, CompactSet) else first.atoms.shape[1]
    minimum = 1024 if n == 2 else 10_000
    if resolution < minimum:
        raise ValueError(f"resolution {resolution} below the required {minimum} "
                         f"directions for n={n}")
    directions = sweep_directions(n, resolution)
    digest = instance_digest({"items": [_jsonable(getattr(x, "pieces", None)) or
                                        {"atoms": x.atoms, "weights": x.weights,
                                         "eps": x.eps} for x in items],
                              "task": task, "partition": partition,
                              "alpha": alpha})
    if task in ("overlap", "mass-overlap"):
        los, his = (_interval_table(items, directions) if task == "overlap"
                    else _measure_interval_table(items, directions))
        vals = his.min(axis=1) - los.max(axis=1)
        d = int(np.argmax(vals))
        witness = {"direction": directions[d],
                   "offset": 0.5 * (los[d].max() + his[d].min())}
        return OracleReport(task, digest, resolution, float(vals[d]),
                            _jsonable(witness))
    if task in ("separation", "mass-separation"):
        if partition is None:
            raise ValueError("separation sweep needs a partition")
        i1, i2 = (list(partition[0]), list(partition[1]))
        los, his = (_interval_table(items, directions) if task == "separation"
                    else _measure_interval_table(items, directions))
        vals = los[:, i2].min(axis=1) - his[:, i1].max(axis=1)
        d = int(np.argmax(vals))
        witness = {"direction": directions[d],
                   "offset": 0.5 * (his[d, i1].max() + los[d, i2].min())}
        return OracleReport(task, digest, resolution, float(vals[d]),
                            _jsonable(witness))
    if task == "mass-residual":
        from .measures import directional_cdf

        targets = np.full(len(items), 0.5) if alpha is None else np.asarray(alpha)
        best = math.inf
        best_witness = {}
        for v in directions:
            cdfs = [directional_cdf(mu, v) for mu in items]
            candidates = np.concatenate(
                [c.positions for c in cdfs] +
                [[c.quantile_clamped(t)] for c, t in zip(cdfs, targets)])
            masses = np.stack([c.mass_below(candidates) for c in cdfs])
            residuals = np.abs(masses - targets[:, None]).max(axis=0)
            t = int(np.argmin(residuals))
            if residuals[t] < best:
                best = float(residuals[t])
                best_witness = {"direction": v, "offset": float(candidates[t])}
        return OracleReport(task, digest, resolution, best, _jsonable(best_witness))
    raise ValueError(f"unknown sweep task {task!r}")


# ---------------------------------------------------------------------------
# convex feasibility

def convex_tuple_feasible(vertex_sets, tol: float = GEO_TOL) -> bool:
    """Do the convex hulls of the given vertex arrays share a point? (LP)"""
    arrays = [np.atleast_2d(np.asarray(v, dtype=float)) for v in vertex_sets]
    n = arrays[0].shape[1]
    sizes = [a.shape[0] for a in arrays]
    total = sum(sizes)
    # variables: barycentric weights per set; hull points must all coincide
    a_eq = []
    b_eq = []
    offset = [0]
    for s in sizes:
        offset.append(offset[-1] + s)
    for i in range(1, len(arrays)):
        rows = np.zeros((n, total))
        rows[:, offset[0]:offset[1]] = arrays[0].T
        rows[:, offset[i]:offset[i + 1]] = -arrays[i].T
        a_eq.append(rows)
        b_eq.append(np.zeros(n))
    for i in range(len(arrays)):
        row = np.zeros((1, total))
        row[0, offset[i]:offset[i + 1]] = 1.0
        a_eq.append(row)
        b_eq.append(np.ones(1))
    res = linprog(np.zeros(total), A_eq=np.vstack(a_eq),
                  b_eq=np.concatenate(b_eq), bounds=[(0.0, None)] * total,
                  method="highs")
    return res.status == 0


def tuple_intersection_oracle(families, budget: int = 100_000) -> OracleReport:
    """Convex feasibility of every system of representatives, exhaustively."""
    sizes = [len(f) for f in families]
    total = int(np.prod(sizes))
    if total > budget:
        raise PreconditionError(
            f"{total} representative tuples exceed the budget {budget}",
            sizes=sizes, budget=budget)
    digest = instance_digest([[_jsonable(m) for m in f] for f in families])
    empty = []
    from itertools import product

    for combo in product(*[range(s) for s in sizes]):
        members = [families[i][j] for i, j in enumerate(combo)]
        if not all(m.is_convex_piece for m in members):
            raise ValueError("tuple oracle expects convex (single-piece) members")
        if not convex_tuple_feasible([m.pieces[0] for m in members]):
            empty.append(combo)
    witness = {"total": total, "empty": len(empty),
               "empty_tuples": [list(c) for c in empty[:32]]}
    return OracleReport("tuple-intersection", digest, total,
                        float(len(empty)), witness)


def flat_meets_hull(flat, vertices, tol: float = GEO_TOL) -> bool:
    """Does the flat meet conv(vertices)? (LP feasibility)"""
    v = np.atleast_2d(np.asarray(vertices, dtype=float))
    m, n = v.shape
    k = flat.k
    # lam @ v = base + basis @ t
    a_eq = np.zeros((n + 1, m + k))
    a_eq[:n, :m] = v.T
    if k:
        a_eq[:n, m:] = -flat.basis
    a_eq[n, :m] = 1.0
    b_eq = np.concatenate([flat.base, [1.0]])
    bounds = [(0.0, None)] * m + [(None, None)] * k
    res = linprog(np.zeros(m + k), A_eq=a_eq, b_eq=b_eq, bounds=bounds,
                  method="highs")
    return res.status == 0


def line_transversal_oracle(sets, resolution: int | None = None) -> OracleReport:
    """Dense sweep over line parameterizations in R^2 or R^3.

    One-sided: "infeasible" means not found at this resolution.
    """
    n = sets[0].dimension
    if n not in (2, 3):
        raise ValueError("line transversal oracle supports n in {2, 3}")
    digest = instance_digest([_jsonable(s) for s in sets])
    if n == 2:
        count = resolution or 4096
        directions = sweep_directions(2, count)
        los, his = _interval_table(sets, directions)
        vals = his.min(axis=1) - los.max(axis=1)
        d = int(np.argmax(vals))
        best = float(vals[d])
        witness = {"feasible": bool(best >= -GEO_TOL),
                   "normal": directions[d],
                   "offset": 0.5 * (los[d].max() + his[d].min()),
                   "residual": max(0.0, -best)}
        return OracleReport("line-transversal", digest, count, best,
                            _jsonable(witness))
    count = resolution or 10_000
    directions = sweep_directions(3, count)[: count // 2]  # lines are unoriented
    best = math.inf
    best_witness = {}

    def fiber_residual(d, queries):
        w = orthonormal_complement(d[:, None])
        hulls = [convex_hull_2d(s.vertices @ w) for s in sets]
        if queries is None:
            pts = np.vstack(hulls)
            lo = pts.min(axis=0)
            hi = pts.max(axis=0)
            gx = np.linspace(lo[0], hi[0], 12)
            gy = np.linspace(lo[1], hi[1], 12)
            queries = np.column_stack([g.ravel() for g in np.meshgrid(gx, gy)])
            queries = np.vstack([queries,
                                 np.stack([h.mean(axis=0) for h in hulls])])
        dists = np.stack([polygon_distance_2d(np.atleast_2d(queries), h)
                          for h in hulls])
        worst = dists.max(axis=0)
        q = int(np.argmin(worst))
        return float(worst[q]), np.atleast_2d(queries)[q]

    for d in directions:
        val, q = fiber_residual(d, None)
        if val < best:
            best = val
            best_witness = {"direction": d, "fiber_point": q}
    # polish the sweep winner so near-feasible lines are not misreported
    from .search import refine

    d0 = np.asarray(best_witness["direction"], dtype=float)
    q0 = np.asarray(best_witness["fiber_point"], dtype=float)

    def fun(z):
        d = z[:3]
        nd = np.linalg.norm(d)
        if nd < 1e-9:
            return math.inf
        return fiber_residual(d / nd, z[3:][None, :])[0]

    z, val = refine(fun, np.concatenate([d0, q0]), scale=0.05)
    if val < best:
        d = z[:3] / np.linalg.norm(z[:3])
        best = float(val)
        best_witness = {"direction": d, "fiber_point": z[3:]}
    best_witness["feasible"] = bool(best <= 1e-7)
    best_witness["residual"] = best
    return OracleReport("line-transversal", digest, count // 2, best,
                        _jsonable(best_witness))
