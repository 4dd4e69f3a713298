"""Iterative convex minimization used where no exact LP encoding exists.

``minimize_convex`` is a proximal bundle method: subgradient linearizations
accumulate into a cutting-plane model, and each step minimizes the model plus
a proximal quadratic.  That subproblem is solved in its dual form, a small
QP over the probability simplex, by projected gradient, so the iterative
pipeline never touches the LP solver and stays numerically benign even when
cuts become nearly parallel.  The aggregate subgradient and linearization
error give a standard epsilon-subgradient stopping certificate.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]


def minimize_convex(
    fun: Objective,
    x0,
    tol: float = 1e-10,
    max_iter: int = 400,
    bundle_size: int = 30,
) -> tuple[np.ndarray, float]:
    """Minimize a convex ``fun`` returning ``(value, subgradient)`` pairs."""
    x = np.asarray(x0, dtype=float).copy()
    f, g = fun(x)
    # Cuts in global form: cut_i(y) = intercepts[i] + grads[i] @ y <= fun(y).
    grads = [g.copy()]
    intercepts = [f - g @ x]
    tau = 1.0
    lam_warm = np.ones(1)
    stall = 0

    for _ in range(max_iter):
        G = np.array(grads)
        vals = np.array(intercepts) + G @ x  # linearization values at the center
        lam = _simplex_qp(tau, G, vals, lam_warm)
        lam_warm = lam
        g_agg = G.T @ lam
        eps_agg = max(0.0, f - float(lam @ vals))
        scale = 1.0 + float(np.linalg.norm(x))
        if eps_agg + scale * float(np.linalg.norm(g_agg)) <= tol * max(1.0, abs(f)):
            break
        d = -tau * g_agg
        model_val = float(np.max(vals + G @ d))
        predicted = f - (model_val + float(d @ d) / (2.0 * tau))
        fn, gn = fun(x + d)
        grads.append(gn.copy())
        intercepts.append(fn - gn @ (x + d))
        if len(grads) > bundle_size:
            # Compress: evict the two least active cuts and keep the aggregate
            # cut, which preserves the convergence guarantee.
            order = np.argsort(lam)[:2]
            for j in sorted(map(int, order), reverse=True):
                grads.pop(j)
                intercepts.pop(j)
            grads.append(g_agg.copy())
            intercepts.append(float(lam @ vals) - float(g_agg @ x))
        lam_warm = np.full(len(grads), 1.0 / len(grads))

        improved = fn <= f - 0.1 * max(predicted, 0.0)
        if fn <= f - 1e-14 * max(1.0, abs(f)):
            stall = 0
        else:
            stall += 1
            if stall >= 50:
                break
        if improved:
            x = x + d
            f, g = fn, gn
            tau = min(tau * 1.6, 1e8)
        else:
            if fn < f:
                x = x + d
                f, g = fn, gn
            tau = max(tau * 0.4, 1e-10)
    return x, f


def _simplex_qp(tau: float, G: np.ndarray, vals: np.ndarray, warm: np.ndarray) -> np.ndarray:
    """``argmin_{lam in simplex} (tau/2)||G^T lam||^2 - lam @ vals``.

    Primal active-set method; the dual of the proximal bundle subproblem
    ``min_d max_i(vals_i + g_i . d) + ||d||^2 / (2 tau)``.  The Hessian can be
    singular, so the KKT solves carry a tiny ridge.
    """
    k = G.shape[0]
    if k == 1:
        return np.ones(1)
    Q = tau * (G @ G.T) + 1e-13 * np.eye(k)
    lam = warm if warm.shape[0] == k else np.full(k, 1.0 / k)
    lam = project_to_simplex(lam)
    free = lam > 0.0

    for _ in range(4 * k + 10):
        idx = np.flatnonzero(free)
        nf = idx.size
        kkt = np.zeros((nf + 1, nf + 1))
        kkt[:nf, :nf] = Q[np.ix_(idx, idx)]
        kkt[:nf, nf] = 1.0
        kkt[nf, :nf] = 1.0
        rhs = np.concatenate([vals[idx], [1.0]])
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        target = np.zeros(k)
        target[idx] = sol[:nf]
        mu = sol[nf]

        if np.min(target[idx]) >= -1e-12:
            lam = np.maximum(target, 0.0)
            s = lam.sum()
            lam = lam / s if s > 0 else np.full(k, 1.0 / k)
            grad = Q @ lam - vals
            fixed = np.flatnonzero(~free)
            if fixed.size == 0:
                return lam
            worst = int(fixed[np.argmin(grad[fixed])])
            if grad[worst] >= mu - 1e-11 * (1.0 + abs(mu)):
                return lam
            free[worst] = True
            continue

        # Step toward the equality-QP solution until a coordinate hits zero.
        delta = target - lam
        blocking = np.flatnonzero((delta < -1e-300) & free)
        steps = -lam[blocking] / delta[blocking]
        t = min(1.0, float(np.min(steps))) if blocking.size else 1.0
        lam = lam + t * delta
        hit = blocking[steps <= t + 1e-15] if blocking.size else np.empty(0, dtype=int)
        for j in hit:
            lam[j] = 0.0
            free[j] = False
        if not np.any(free):
            free[int(np.argmax(vals))] = True
            lam[:] = 0.0
            lam[int(np.argmax(vals))] = 1.0
    return project_to_simplex(lam)


def project_to_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort algorithm)."""
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, y.size + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[rho - 1] / rho
    return np.maximum(y - theta, 0.0)


def min_over_hull_l2(point: np.ndarray, vertices: np.ndarray, tol: float = 1e-12) -> float:
    """Euclidean distance from a point to the convex hull of ``vertices``.

    Projected gradient on hull coefficients with simplex projection.
    """
    V = np.atleast_2d(vertices)
    k = V.shape[0]
    if k == 1:
        return float(np.linalg.norm(point - V[0]))
    lam = np.full(k, 1.0 / k)
    G = V @ V.T
    lip = max(float(np.linalg.eigvalsh(G).max()), 1e-12)
    step = 1.0 / lip
    Vp = V @ point
    prev = np.inf
    for _ in range(2000):
        grad = G @ lam - Vp
        lam = project_to_simplex(lam - step * grad)
        obj = 0.5 * float(lam @ (G @ lam)) - float(Vp @ lam)
        if abs(prev - obj) <= tol * max(1.0, abs(obj)):
            break
        prev = obj
    return float(np.linalg.norm(point - V.T @ lam))


def dykstra_ball_projection(
    y: np.ndarray,
    centers: np.ndarray,
    radii: np.ndarray,
    tol: float = 1e-12,
    max_iter: int = 20_000,
) -> np.ndarray:
    """Euclidean projection of ``y`` onto an intersection of l2 balls.

    Dykstra's alternating projections; the intersection must be nonempty.
    """
    centers = np.atleast_2d(centers)
    radii = np.asarray(radii, dtype=float).ravel()
    m = centers.shape[0]
    z = y.astype(float).copy()
    incr = np.zeros((m, y.size))
    for sweep in range(max_iter):
        shift = 0.0
        for i in range(m):
            w = z + incr[i]
            delta = w - centers[i]
            dist = np.linalg.norm(delta)
            if dist <= radii[i]:
                proj = w
            else:
                proj = centers[i] + delta * (radii[i] / dist)
            incr[i] = w - proj
            shift = max(shift, float(np.max(np.abs(proj - z))))
            z = proj
        if shift <= tol:
            break
    return z
