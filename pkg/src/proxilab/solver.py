"""Exact-at-tolerance LP, vertex enumeration, and convex feasibility.

The LP solver is a dense two-phase simplex with Bland's rule, which trades
speed for determinism; every problem in this library has at most a few dozen
variables.  Equality constraints are encoded as inequality pairs so a single
code path handles everything.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from . import bodies as _bodies
from .errors import (
    ConvergenceError,
    DimTooLargeError,
    DimensionMismatchError,
    InfeasibleError,
    UnboundedError,
)
from .polytopes import HPolytope, LinearProgram, VPolytope, as_vector
from .spaces import NormSpec, dual_generators, is_polyhedral, norm_eval

COST_TOL = 1e-11
PIVOT_TOL = 1e-10
FEASIBILITY_TOL = 1e-9
VERTEX_DEDUP_TOL = 1e-8
VERTEX_ENUM_DIM_CAP = 4
FEASIBILITY_SLACK_TOL = 1e-7
MAX_PIVOTS = 50_000


def solve_lp(lp: LinearProgram) -> tuple[float, np.ndarray]:
    """Minimize the LP objective; returns ``(value, optimal point)``.

    Raises :class:`InfeasibleError` / :class:`UnboundedError` accordingly.
    """
    rows = [lp.feasible.normals]
    offs = [lp.feasible.offsets]
    for normal, value in lp.equalities:
        rows.append(np.vstack([normal, -normal]))
        offs.append(np.array([value, -value]))
    A = np.vstack(rows)
    b = np.concatenate(offs)
    x = _simplex_free(lp.objective, A, b)
    return float(lp.objective @ x), x


def minimize_linear(c, H: HPolytope, equalities: Sequence[tuple] = ()) -> tuple[float, np.ndarray]:
    """Convenience wrapper around :func:`solve_lp`."""
    return solve_lp(LinearProgram(np.asarray(c, dtype=float), H, tuple(equalities)))


def _simplex_free(c: np.ndarray, A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Two-phase simplex for ``min c.x`` s.t. ``A x <= b`` with free variables."""
    try:
        return _simplex_core(c, A, b)
    except ConvergenceError:
        # Deterministic anti-degeneracy nudge: relax each row by a distinct
        # tiny amount, which breaks the ties that stalled the first attempt.
        m = A.shape[0]
        nudge = 1e-10 * (1.0 + np.abs(b)) * (1.0 + np.arange(m) / max(1, m))
        x = _simplex_core(c, A, b + nudge)
        viol = float(np.max(A @ x - b)) if m else 0.0
        if viol > 1e-7:
            raise ConvergenceError("simplex failed even after perturbation", viol)
        return x


def _simplex_core(c: np.ndarray, A: np.ndarray, b: np.ndarray) -> np.ndarray:
    m, n = A.shape
    if c.shape[0] != n:
        raise DimensionMismatchError("objective/constraint dimension mismatch")

    # Row scaling for conditioning; the feasible set is unchanged.
    scale = np.linalg.norm(A, axis=1)
    scale[scale < 1e-300] = 1.0
    A = A / scale[:, None]
    b = b / scale

    sign = np.where(b < 0.0, -1.0, 1.0)
    A2 = sign[:, None] * np.hstack([A, -A])
    b2 = sign * b
    slack = np.diag(sign)
    art_rows = np.flatnonzero(sign < 0.0)
    n_art = art_rows.size
    art = np.zeros((m, n_art))
    art[art_rows, np.arange(n_art)] = 1.0

    n_struct = 2 * n + m
    T = np.hstack([A2, slack, art, b2[:, None]])
    basis = np.empty(m, dtype=int)
    basis[sign > 0.0] = 2 * n + np.flatnonzero(sign > 0.0)
    basis[art_rows] = n_struct + np.arange(n_art)

    # Phase 1: minimize the sum of artificial variables.
    if n_art:
        cost1 = np.zeros(n_struct + n_art)
        cost1[n_struct:] = 1.0
        obj = _reduced_cost_row(T, basis, cost1)
        obj = _pivot_loop(T, basis, obj, allowed=n_struct + n_art)
        if -obj[-1] > 1e-7:
            raise InfeasibleError("phase-1 optimum is positive: empty feasible region")
        keep = _drive_out_artificials(T, basis, n_struct)
        T, basis = _drop_artificial_columns(T, basis, n_struct, keep)
        m = T.shape[0]

    # Phase 2: original objective over structural columns.
    cost2 = np.concatenate([c, -c, np.zeros(T.shape[1] - 1 - 2 * n)])
    obj = _reduced_cost_row(T, basis, cost2)
    obj = _pivot_loop(T, basis, obj, allowed=T.shape[1] - 1)

    full = np.zeros(T.shape[1] - 1)
    full[basis] = T[:, -1]
    x = full[:n] - full[n : 2 * n]
    viol = float(np.max(A @ x - b)) if m else 0.0
    if viol > 1e-7:
        raise ConvergenceError("simplex returned an infeasible point", viol)
    return x


def _reduced_cost_row(T: np.ndarray, basis: np.ndarray, cost: np.ndarray) -> np.ndarray:
    obj = np.concatenate([cost, [0.0]])
    cb = cost[basis]
    nz = np.abs(cb) > 0.0
    if np.any(nz):
        obj = obj - cb[nz] @ T[nz]
    return obj


def _pivot_loop(T: np.ndarray, basis: np.ndarray, obj: np.ndarray, allowed: int) -> np.ndarray:
    """Simplex iterations in place; ``allowed`` caps entering columns.

    Dantzig pricing with largest-pivot tie-breaking by default; after a long
    degenerate stretch it switches to Bland's rule, which cannot cycle.
    """
    m = T.shape[0]
    bland = False
    stall = 0
    prev_val = obj[-1]
    for _ in range(MAX_PIVOTS):
        negative = np.flatnonzero(obj[:allowed] < -COST_TOL)
        if negative.size == 0:
            return obj
        if not bland:
            order = negative[np.argsort(obj[negative])]
        else:
            order = negative
        j = -1
        pos = np.empty(0, dtype=int)
        for cand in order:
            pos = np.flatnonzero(T[:, cand] > PIVOT_TOL)
            if pos.size:
                j = int(cand)
                break
            if obj[cand] < -1e-7:
                raise UnboundedError("objective unbounded below on the feasible region")
        if j < 0:
            return obj  # only noise-level reduced costs remain
        col = T[:, j]
        ratios = T[pos, -1] / col[pos]
        best = np.min(ratios)
        ties = pos[ratios <= best + 1e-9 * (1.0 + abs(best))]
        if bland:
            i = int(ties[np.argmin(basis[ties])])
        else:
            i = int(ties[np.argmax(col[ties])])
        piv = T[i, j]
        T[i] /= piv
        other = np.arange(m) != i
        T[other] -= np.outer(T[other, j], T[i])
        obj -= obj[j] * T[i]
        basis[i] = j
        if obj[-1] > prev_val - 1e-13:
            stall += 1
            if stall > 20 * (m + 1):
                bland = True
        else:
            stall = 0
        prev_val = obj[-1]
    raise ConvergenceError("simplex exceeded its pivot budget", float(-obj[-1]))


def _drive_out_artificials(T: np.ndarray, basis: np.ndarray, n_struct: int) -> list[int]:
    """Pivot basic artificials onto structural columns; returns rows to keep."""
    m = T.shape[0]
    keep = []
    for i in range(m):
        if basis[i] < n_struct:
            keep.append(i)
            continue
        row = T[i, :n_struct]
        candidates = np.flatnonzero(np.abs(row) > PIVOT_TOL)
        if candidates.size == 0:
            continue  # redundant constraint row; drop it
        j = int(candidates[np.argmax(np.abs(row[candidates]))])
        piv = T[i, j]
        T[i] /= piv
        other = np.arange(m) != i
        T[other] -= np.outer(T[other, j], T[i])
        basis[i] = j
        keep.append(i)
    return keep


def _drop_artificial_columns(T, basis, n_struct, keep_rows):
    cols = list(range(n_struct)) + [T.shape[1] - 1]
    T2 = T[np.asarray(keep_rows, dtype=int)][:, cols]
    basis2 = basis[np.asarray(keep_rows, dtype=int)]
    return np.ascontiguousarray(T2), basis2


def lp_duality_gap(lp: LinearProgram, value: float, point: np.ndarray) -> tuple[float, float]:
    """Reconstruct the objective from active constraints.

    Returns ``(gap, stationarity_residual)`` where the multipliers are found by
    an auxiliary LP; both should be tiny for a true optimum.
    """
    rows = [lp.feasible.normals]
    offs = [lp.feasible.offsets]
    for normal, v in lp.equalities:
        rows.append(np.vstack([normal, -normal]))
        offs.append(np.array([v, -v]))
    A = np.vstack(rows)
    b = np.concatenate(offs)
    resid = A @ point - b
    active = np.flatnonzero(resid >= -1e-6)
    if active.size == 0:
        return abs(float(lp.objective @ point)), float(np.linalg.norm(lp.objective))
    Aact = A[active]
    k, n = Aact.shape
    # Find lambda >= 0 with Aact^T lambda = -c, minimizing the l_inf residual t.
    # Variables (lambda, t); rows encode |Aact^T lambda + c| <= t and lambda >= 0.
    big = np.vstack([
        np.hstack([Aact.T, -np.ones((n, 1))]),
        np.hstack([-Aact.T, -np.ones((n, 1))]),
        np.hstack([-np.eye(k), np.zeros((k, 1))]),
    ])
    offsets = np.concatenate([-lp.objective, lp.objective, np.zeros(k)])
    cvec = np.zeros(k + 1)
    cvec[-1] = 1.0
    t, sol = minimize_linear(cvec, HPolytope(big, offsets))
    lam = np.maximum(sol[:k], 0.0)
    gap = abs(float(lp.objective @ point + lam @ b[active]))
    return gap, max(0.0, float(t))


def enumerate_vertices(P: HPolytope) -> VPolytope:
    """All vertices of a bounded H-polytope (dimension capped at 4)."""
    d = P.dim
    if d > VERTEX_ENUM_DIM_CAP:
        raise DimTooLargeError(f"vertex enumeration capped at dim {VERTEX_ENUM_DIM_CAP}")
    scale = np.linalg.norm(P.normals, axis=1)
    good = scale > 1e-300
    normals = P.normals[good] / scale[good, None]
    offsets = P.offsets[good] / scale[good]
    m = normals.shape[0]
    if m < d:
        raise UnboundedError("fewer independent constraints than dimensions")

    # Emptiness, then boundedness along every coordinate axis.
    feas = HPolytope(normals, offsets)
    minimize_linear(np.zeros(d), feas)  # raises InfeasibleError if empty
    for j in range(d):
        e = np.zeros(d)
        for s in (1.0, -1.0):
            e[j] = s
            minimize_linear(e, feas)  # raises UnboundedError if unbounded
        e[j] = 0.0

    combos = np.array(list(combinations(range(m), d)), dtype=int)
    verts = []
    chunk = 20_000
    for start in range(0, combos.shape[0], chunk):
        idx = combos[start : start + chunk]
        Asub = normals[idx]                      # (c, d, d)
        bsub = offsets[idx]                      # (c, d)
        dets = np.abs(np.linalg.det(Asub))
        ok = dets > 1e-10
        if not np.any(ok):
            continue
        X = np.linalg.solve(Asub[ok], bsub[ok][..., None])[..., 0]
        viol = X @ normals.T - offsets[None, :]
        feasible = np.max(viol, axis=1) <= FEASIBILITY_TOL
        if np.any(feasible):
            verts.append(X[feasible])
    if not verts:
        raise InfeasibleError("no vertex found; polytope may be empty at tolerance")
    return VPolytope(_dedup_points(np.vstack(verts), VERTEX_DEDUP_TOL))


def _dedup_points(points: np.ndarray, tol: float) -> np.ndarray:
    order = np.lexsort(points.T[::-1])
    pts = points[order]
    kept: list[np.ndarray] = []
    for p in pts:
        if not kept or all(np.max(np.abs(p - q)) > tol for q in kept):
            kept.append(p)
    return np.array(kept)


def optimal_face(objective, H: HPolytope, value: float, slack: float = 1e-9) -> VPolytope:
    """Vertices of the optimal face ``{z in H : objective.z <= value + slack}``."""
    cut = HPolytope(np.atleast_2d(np.asarray(objective, dtype=float)), np.array([value + slack]))
    return enumerate_vertices(H.stack(cut))


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: Optional[np.ndarray]
    slack: float


def convex_feasibility(
    balls: Sequence[tuple],
    body,
    n: NormSpec,
    seed: int = 0,
) -> FeasibilityResult:
    """Decide whether all the balls (and the optional body) share a point.

    Minimizes ``max_i (||z - c_i|| - r_i)`` together with the body constraint
    terms; the optimum is the reported ``slack`` and the minimizer is the
    ``witness``.  Feasible means slack <= 1e-7.  When the body is a subspace
    (or a subspace ball) the candidate ``z`` is parametrized inside its span,
    so the subspace constraint holds exactly.
    """
    centers = [as_vector(c, n.dim) for c, _ in balls]
    radii = [float(r) for _, r in balls]
    if any(r < 0 for r in radii):
        raise ValueError("ball radii must be nonnegative")

    if is_polyhedral(n) and _bodies.is_lp_encodable(body):
        return _feasibility_lp(centers, radii, body, n)
    return _feasibility_iterative(centers, radii, body, n, seed)


def _feasibility_lp(centers, radii, body, n) -> FeasibilityResult:
    gens = dual_generators(n)
    d = n.dim
    basis = _bodies.body_basis(body)
    if basis is not None:
        k = basis.shape[0]
        lift = basis.T  # z = lift @ coef
        nvar = k + 1
    else:
        lift = np.eye(d)
        nvar = d + 1

    rows, offs = [], []
    for c, r in zip(centers, radii):
        # <g, z - c> - t <= r  for every dual generator g
        G = gens @ lift
        rows.append(np.hstack([G, -np.ones((G.shape[0], 1))]))
        offs.append(gens @ c + r)
    brow, boff = _bodies.body_rows(body, n, lift)
    if brow is not None:
        rows.append(np.hstack([brow, -np.ones((brow.shape[0], 1))]))
        offs.append(boff)
    H = HPolytope(np.vstack(rows), np.concatenate(offs))
    obj = np.zeros(nvar)
    obj[-1] = 1.0
    slack, sol = minimize_linear(obj, H)
    witness = lift @ sol[:-1]
    return FeasibilityResult(slack <= FEASIBILITY_SLACK_TOL, witness, float(slack))


def _feasibility_iterative(centers, radii, body, n, seed) -> FeasibilityResult:
    from .optimize import minimize_convex

    basis = _bodies.body_basis(body)
    lift = basis.T if basis is not None else np.eye(n.dim)
    nvar = lift.shape[1]
    extra = _bodies.body_penalty_terms(body, n, lift)

    def fun(u):
        z = lift @ u
        best, grad = -np.inf, np.zeros(nvar)
        for c, r in zip(centers, radii):
            v = norm_eval(z - c, n) - r
            if v > best:
                best = v
                grad = lift.T @ _subgrad(z - c, n)
        for term in extra:
            v, g = term(u)
            if v > best:
                best, grad = v, g
        return best, grad

    # lift has orthonormal columns (or is the identity), so lift.T pulls back.
    starts = [lift.T @ np.mean(centers, axis=0)]
    rng = np.random.default_rng(seed)
    span = max(1.0, max(np.linalg.norm(c) + r for c, r in zip(centers, radii)))
    for _ in range(2):
        starts.append(rng.standard_normal(nvar) * span)
    best = None
    for u0 in starts:
        u, val = minimize_convex(fun, u0, tol=1e-10, max_iter=600)
        if best is None or val < best[1]:
            best = (u, val)
    witness = lift @ best[0]
    return FeasibilityResult(best[1] <= FEASIBILITY_SLACK_TOL, witness, float(best[1]))


def _subgrad(v, n):
    from .spaces import norm_subgradient

    return norm_subgradient(v, n)
