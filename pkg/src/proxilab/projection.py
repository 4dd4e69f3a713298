"""Set-valued metric projection: distances, minimizer sets, near-minimizer
sets, and Hausdorff metrics between represented sets.

Representation policy: the minimizer set is an exact ``Face`` (polytope) only
when both the norm and the body are polyhedral and the enumeration dimension
is at most 4; it is a ``Singleton`` for strictly convex norms; otherwise it is
``Sampled`` with an estimated covering radius.  Subspace-flavoured bodies are
handled in coefficient space, which both cuts the dimension and makes the
subspace constraint exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .bodies import (
    ConvexBody,
    NormBall,
    Polytope,
    Subspace,
    SubspaceBall,
    body_basis,
    body_penalty_terms,
    body_rows,
    check_dims,
    is_lp_encodable,
    membership_violation,
)
from .errors import DimTooLargeError, DimensionMismatchError, InfeasibleError
from .optimize import min_over_hull_l2, minimize_convex
from .polytopes import HPolytope, LinearProgram, VPolytope, as_vector
from .solver import enumerate_vertices, minimize_linear, solve_lp
from .spaces import (
    Lp,
    NormSpec,
    dual_generators,
    is_polyhedral,
    is_strictly_convex,
    norm_eval,
    norm_subgradient,
)

FACE_DIM_CAP = 4
FACE_SLACK = 1e-9
DEFAULT_SAMPLES = 10_000


@dataclass(frozen=True)
class Singleton:
    point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", as_vector(self.point))


@dataclass(frozen=True)
class Face:
    polytope: VPolytope


@dataclass(frozen=True)
class Sampled:
    points: np.ndarray
    coverage_radius: float

    def __post_init__(self):
        object.__setattr__(self, "points", np.atleast_2d(np.asarray(self.points, dtype=float)))


MinimizerSet = Union[Singleton, Face, Sampled]


@dataclass(frozen=True)
class NearSetSpec:
    delta: float

    def __post_init__(self):
        if not (self.delta >= 0.0 and math.isfinite(self.delta)):
            raise ValueError("delta must be finite and nonnegative")


@dataclass(frozen=True)
class ProjectionResult:
    distance: float
    minimizers: MinimizerSet


def set_points(S: MinimizerSet) -> np.ndarray:
    """Representative points of a minimizer set, as rows."""
    if isinstance(S, Singleton):
        return S.point[None, :]
    if isinstance(S, Face):
        return S.polytope.vertices
    if isinstance(S, Sampled):
        return S.points
    raise TypeError(f"unknown minimizer set {type(S).__name__}")


# ---------------------------------------------------------------------------
# Distance and minimizers


def distance(x, C: ConvexBody, n: NormSpec) -> float:
    """``d(x, C) = inf_{z in C} ||x - z||``."""
    x = as_vector(x, n.dim)
    check_dims(C, n)
    return _solve(x, C, n)[0]


def project(x, C: ConvexBody, n: NormSpec, seed: int = 0) -> ProjectionResult:
    """Distance together with a representation of the minimizer set."""
    x = as_vector(x, n.dim)
    check_dims(C, n)
    d, zstar, lift = _solve(x, C, n)

    if _exact_face_available(C, n, lift):
        face = _near_face(x, C, n, d, FACE_SLACK, lift)
        return ProjectionResult(d, face)
    if is_strictly_convex(n):
        return ProjectionResult(d, Singleton(zstar))
    sampled = _polished_minimizers(x, C, n, d, zstar, lift, seed)
    return ProjectionResult(d, sampled)


def near_minimizer_set(
    x,
    C: ConvexBody,
    n: NormSpec,
    spec: NearSetSpec,
    seed: int = 0,
    samples: int = DEFAULT_SAMPLES,
) -> MinimizerSet:
    """The near-minimizer set ``{z in C : ||x - z|| <= d(x, C) + delta}``."""
    x = as_vector(x, n.dim)
    check_dims(C, n)
    d, zstar, lift = _solve(x, C, n)
    delta = spec.delta
    if _exact_face_available(C, n, lift):
        return _near_face(x, C, n, d, max(delta, FACE_SLACK), lift)
    if delta <= 0.0:
        return project(x, C, n, seed=seed).minimizers
    return _sampled_near_set(x, C, n, d, zstar, lift, delta, seed, samples)


def _exact_face_available(C, n, lift) -> bool:
    return is_polyhedral(n) and is_lp_encodable(C) and lift.shape[1] <= FACE_DIM_CAP


def _lift_for(C: ConvexBody, n: NormSpec) -> np.ndarray:
    basis = body_basis(C)
    return basis.T if basis is not None else np.eye(n.dim)


def _solve(x, C, n) -> tuple[float, np.ndarray, np.ndarray]:
    """Distance, one minimizer, and the coefficient lift used."""
    lift = _lift_for(C, n)
    if isinstance(C, NormBall):
        # d(x, rB) = max(0, ||x|| - r) holds for every norm; the radial point
        # is always one minimizer.
        nx = norm_eval(x, n)
        if nx <= C.radius:
            return 0.0, x.copy(), lift
        return nx - C.radius, x * (C.radius / nx), lift
    if is_polyhedral(n) and is_lp_encodable(C):
        return _lp_distance(x, C, n, lift)
    return _iterative_distance(x, C, n, lift)


def _lp_distance(x, C, n, lift):
    gens = dual_generators(n)
    k = lift.shape[1]
    G = gens @ lift
    rows = [np.hstack([-G, -np.ones((G.shape[0], 1))])]
    offs = [-(gens @ x)]
    brows, boffs = body_rows(C, n, lift)
    if brows is not None:
        rows.append(np.hstack([brows, np.zeros((brows.shape[0], 1))]))
        offs.append(boffs)
    obj = np.zeros(k + 1)
    obj[-1] = 1.0
    try:
        d, sol = minimize_linear(obj, HPolytope(np.vstack(rows), np.concatenate(offs)))
    except InfeasibleError:
        raise InfeasibleError("the body is empty; no projection exists") from None
    return max(0.0, float(d)), lift @ sol[:k], lift


def _near_face(x, C, n, d, delta, lift) -> Face:
    gens = dual_generators(n)
    G = gens @ lift
    rows = [-G]
    offs = [d + delta - gens @ x]
    brows, boffs = body_rows(C, n, lift)
    if brows is not None:
        rows.append(brows)
        offs.append(boffs)
    H = HPolytope(np.vstack(rows), np.concatenate(offs))
    verts = enumerate_vertices(H).vertices
    return Face(VPolytope(verts @ lift.T))


def _iterative_distance(x, C, n, lift):
    if isinstance(C, Subspace) and isinstance(n, Lp) and n.p == 2.0:
        u = lift.T @ x
        z = lift @ u
        return float(np.linalg.norm(x - z)), z, lift
    if isinstance(C, SubspaceBall) and isinstance(n, Lp) and n.p == 2.0:
        u = lift.T @ x
        nu = float(np.linalg.norm(u))
        if nu > C.radius:
            u = u * (C.radius / nu)
        z = lift @ u
        return float(np.linalg.norm(x - z)), z, lift
    terms = body_penalty_terms(C, n, lift)
    starts = [lift.T @ x]
    if isinstance(C, Polytope):
        try:
            _, z0 = minimize_linear(np.zeros(n.dim), C.H)
            starts.append(lift.T @ z0)
        except InfeasibleError:
            raise InfeasibleError("the body is empty; no projection exists") from None
    starts.append(np.zeros(lift.shape[1]))

    lam = 8.0
    for _ in range(6):
        best = None
        for u0 in starts:
            u, _ = minimize_convex(
                lambda u, _l=lam: _penalized(u, x, n, lift, terms, _l),
                u0,
                tol=1e-12,
                max_iter=600,
            )
            z = lift @ u
            val = norm_eval(x - z, n)
            viol = membership_violation(z, C, n)
            if best is None or (viol, val) < (best[0], best[1]):
                best = (viol, val, z, u)
        if best[0] <= 1e-9:
            return best[1], best[2], lift
        lam *= 8.0
    return best[1], best[2], lift


def _penalized(u, x, n, lift, terms, lam):
    z = lift @ u
    val = norm_eval(x - z, n)
    grad = -lift.T @ norm_subgradient(x - z, n)
    worst, gworst = 0.0, None
    for term in terms:
        v, g = term(u)
        if v > worst:
            worst, gworst = v, g
    if gworst is not None and worst > 0.0:
        val += lam * worst
        grad = grad + lam * gworst
    return val, grad


# ---------------------------------------------------------------------------
# Sampled representations


def _feasible_extent(x, C, n, lift, u0, w, radius) -> float:
    """Largest t >= 0 with ``lift(u0 + t w)`` in the body and within the ball
    ``||x - z|| <= radius``; the feasible t-set is an interval containing 0."""

    def bad(t: float) -> bool:
        z = lift @ (u0 + t * w)
        if norm_eval(x - z, n) > radius + 1e-12:
            return True
        return membership_violation(z, C, n) > 1e-12

    hi = 1.0
    if bad(0.0):
        return 0.0
    grow = 0
    while not bad(hi):
        hi *= 2.0
        grow += 1
        if grow > 60:
            return hi
    lo = 0.0 if hi == 1.0 else hi / 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if bad(mid):
            hi = mid
        else:
            lo = mid
    return lo


def _sampled_near_set(x, C, n, d, zstar, lift, delta, seed, samples) -> Sampled:
    rng = np.random.default_rng(seed)
    k = lift.shape[1]
    u0 = lift.T @ zstar
    radius = d + delta
    boundary_share = 0.7
    pts = [zstar.copy()]
    for _ in range(samples):
        w = rng.standard_normal(k)
        nw = np.linalg.norm(w)
        if nw < 1e-12:
            continue
        w /= nw
        t = _feasible_extent(x, C, n, lift, u0, w, radius)
        if t <= 0.0:
            continue
        if rng.random() >= boundary_share:
            t *= rng.random()
        pts.append(lift @ (u0 + t * w))
    points = np.array(pts)
    coverage = _coverage_estimate(x, C, n, lift, u0, radius, points, seed + 1)
    return Sampled(points, coverage)


def _coverage_estimate(x, C, n, lift, u0, radius, points, seed, probes: int = 64) -> float:
    rng = np.random.default_rng(seed)
    k = lift.shape[1]
    worst = 0.0
    for _ in range(probes):
        w = rng.standard_normal(k)
        nw = np.linalg.norm(w)
        if nw < 1e-12:
            continue
        w /= nw
        t = _feasible_extent(x, C, n, lift, u0, w, radius) * rng.random()
        z = lift @ (u0 + t * w)
        gap = min(norm_eval(z - p, n) for p in points[:: max(1, len(points) // 2000)])
        worst = max(worst, gap)
    return worst


def _polished_minimizers(x, C, n, d, zstar, lift, seed, starts: int = 16) -> Sampled:
    """Minimizer set for non-strictly-convex, non-polyhedral norms: bundle
    re-solves from spread starts, each landing somewhere in the optimal set."""
    rng = np.random.default_rng(seed)
    terms = body_penalty_terms(C, n, lift)
    u0 = lift.T @ zstar
    scale = max(1.0, d)
    pts = [zstar]
    for _ in range(starts):
        u_init = u0 + scale * rng.standard_normal(u0.size)
        lam = 64.0
        u, _ = minimize_convex(
            lambda u, _l=lam: _penalized(u, x, n, lift, terms, _l), u_init, tol=1e-12, max_iter=500
        )
        z = lift @ u
        if norm_eval(x - z, n) <= d + 1e-8 and membership_violation(z, C, n) <= 1e-8:
            pts.append(z)
    points = _dedup_rows(np.array(pts), 1e-9)
    if len(points) == 1:
        coverage = 0.0
    else:
        coverage = max(
            min(norm_eval(p - q, n) for j, q in enumerate(points) if j != i)
            for i, p in enumerate(points)
        )
    return Sampled(points, coverage)


def _dedup_rows(points: np.ndarray, tol: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in points:
        if not kept or all(np.max(np.abs(p - q)) > tol for q in kept):
            kept.append(p)
    return np.array(kept)


# ---------------------------------------------------------------------------
# Distances between represented sets


def point_set_distance(p, S: MinimizerSet, n: NormSpec) -> float:
    """``d(p, S)`` in the norm ``n``."""
    p = as_vector(p, n.dim)
    if isinstance(S, Singleton):
        return norm_eval(p - S.point, n)
    if isinstance(S, Sampled):
        return float(min(norm_eval(p - q, n) for q in S.points))
    if isinstance(S, Face):
        return _point_face_distance(p, S.polytope, n)
    raise TypeError(f"unknown minimizer set {type(S).__name__}")


def _point_face_distance(p, poly: VPolytope, n) -> float:
    V = poly.vertices
    if V.shape[0] == 1:
        return norm_eval(p - V[0], n)
    if is_polyhedral(n):
        gens = dual_generators(n)
        k = V.shape[0]
        # Variables (lambda, t): gauge(p - V^T lambda) <= t over the simplex.
        rows = [np.hstack([-(gens @ V.T), -np.ones((gens.shape[0], 1))])]
        offs = [-(gens @ p)]
        rows.append(np.hstack([-np.eye(k), np.zeros((k, 1))]))
        offs.append(np.zeros(k))
        obj = np.zeros(k + 1)
        obj[-1] = 1.0
        eq = (np.concatenate([np.ones(k), [0.0]]), 1.0)
        val, _ = solve_lp(
            LinearProgram(obj, HPolytope(np.vstack(rows), np.concatenate(offs)), (eq,))
        )
        return max(0.0, float(val))
    if isinstance(n, Lp) and n.p == 2.0:
        return min_over_hull_l2(p, V)
    # General norm over the hull: exact-penalty bundle on hull coefficients.
    k = V.shape[0]

    def fun(lam):
        z = V.T @ lam
        val = norm_eval(p - z, n)
        grad = -V @ norm_subgradient(p - z, n)
        pen = np.maximum(-lam, 0.0)
        val += 50.0 * float(np.sum(pen)) + 50.0 * abs(float(np.sum(lam) - 1.0))
        grad = grad - 50.0 * (pen > 0) + 50.0 * np.sign(np.sum(lam) - 1.0)
        return val, grad

    lam0 = np.full(k, 1.0 / k)
    lam, _ = minimize_convex(fun, lam0, tol=1e-12, max_iter=500)
    lam = np.maximum(lam, 0.0)
    s = lam.sum()
    lam = lam / s if s > 0 else np.full(k, 1.0 / k)
    return norm_eval(p - V.T @ lam, n)


def excess(A: MinimizerSet, B: MinimizerSet, n: NormSpec) -> float:
    """One-sided excess ``e(A, B) = sup_{a in A} d(a, B)``.

    Exact for Singleton/Face inputs (a convex function attains its sup over a
    polytope at a vertex); a lower bound when ``A`` is Sampled.
    """
    return float(max(point_set_distance(a, B, n) for a in set_points(A)))


def hausdorff_distance(A: MinimizerSet, B: MinimizerSet, n: NormSpec) -> float:
    """``max(e(A, B), e(B, A))``."""
    return max(excess(A, B, n), excess(B, A, n))
