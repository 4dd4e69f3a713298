"""Closed convex bodies that projections are taken onto.

Variants: a linear subspace, a ball of a subspace (in the ambient norm), the
ambient norm ball, and a generic H-polytope.  Subspace-flavoured bodies carry
an explicit basis; computational routines parametrize points as ``z = Q^T u``
with ``Q`` an orthonormalized copy of that basis, so the subspace constraint
is satisfied exactly by construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DimensionMismatchError
from .polytopes import HPolytope, as_vector
from .spaces import NormSpec, dual_generators, norm_eval, norm_subgradient


@dataclass(frozen=True)
class Subspace:
    basis: np.ndarray

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if np.linalg.matrix_rank(B) < B.shape[0]:
            raise ValueError("subspace basis vectors must be linearly independent")
        object.__setattr__(self, "basis", B)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def rank(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class SubspaceBall:
    """``{z in span(basis) : ||z|| <= radius}`` in the ambient norm."""

    basis: np.ndarray
    radius: float

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if np.linalg.matrix_rank(B) < B.shape[0]:
            raise ValueError("subspace basis vectors must be linearly independent")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "basis", B)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def rank(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class NormBall:
    """The ambient ball ``{z : ||z|| <= radius}``."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class Polytope:
    H: HPolytope


ConvexBody = Union[Subspace, SubspaceBall, NormBall, Polytope]


def body_ambient_dim(body: ConvexBody, default: Optional[int] = None) -> Optional[int]:
    if isinstance(body, (Subspace, SubspaceBall)):
        return body.dim
    if isinstance(body, Polytope):
        return body.H.dim
    return default


def check_dims(body: ConvexBody, n: NormSpec) -> None:
    d = body_ambient_dim(body)
    if d is not None and d != n.dim:
        raise DimensionMismatchError(f"body lives in dim {d}, norm in dim {n.dim}")


def orthonormal_basis(B: np.ndarray) -> np.ndarray:
    """Orthonormalized row basis (rows span the same subspace)."""
    q, _ = np.linalg.qr(B.T)
    return q.T[: B.shape[0]]


def body_basis(body: ConvexBody) -> Optional[np.ndarray]:
    """Orthonormal row basis when the body lives inside a subspace, else None."""
    if isinstance(body, (Subspace, SubspaceBall)):
        return orthonormal_basis(body.basis)
    return None


def is_lp_encodable(body: Optional[ConvexBody]) -> bool:
    return body is None or isinstance(body, (Subspace, SubspaceBall, NormBall, Polytope))


def body_rows(body: Optional[ConvexBody], n: NormSpec, lift: np.ndarray):
    """Halfspace rows in the lifted variable ``u`` (where ``z = lift @ u``).

    Returns ``(rows, offsets)`` encoding the body as ``rows @ u <= offsets``,
    or ``(None, None)`` when the lift already captures the body (subspaces).
    Ball constraints require a polyhedral ambient norm.
    """
    if body is None or isinstance(body, Subspace):
        return None, None
    if isinstance(body, (NormBall, SubspaceBall)):
        gens = dual_generators(n)
        return gens @ lift, np.full(gens.shape[0], float(body.radius))
    if isinstance(body, Polytope):
        return body.H.normals @ lift, body.H.offsets.copy()
    raise TypeError(f"unknown body {type(body).__name__}")


def body_penalty_terms(body: Optional[ConvexBody], n: NormSpec, lift: np.ndarray):
    """Convex violation terms ``u -> (value, subgradient)`` for iterative solvers."""
    terms = []
    if body is None or isinstance(body, Subspace):
        return terms
    if isinstance(body, (NormBall, SubspaceBall)):
        r = float(body.radius)

        def ball_term(u, _r=r):
            z = lift @ u
            return norm_eval(z, n) - _r, lift.T @ norm_subgradient(z, n)

        terms.append(ball_term)
        return terms
    if isinstance(body, Polytope):
        normals = body.H.normals
        scale = np.linalg.norm(normals, axis=1)
        scale[scale < 1e-300] = 1.0
        normals = normals / scale[:, None]
        offsets = body.H.offsets / scale

        def poly_term(u):
            z = lift @ u
            resid = normals @ z - offsets
            j = int(np.argmax(resid))
            return float(resid[j]), lift.T @ normals[j]

        terms.append(poly_term)
        return terms
    raise TypeError(f"unknown body {type(body).__name__}")


def membership_violation(z, body: ConvexBody, n: NormSpec) -> float:
    """How far ``z`` is from lying in the body (0 means member).

    Subspace residuals are measured as the ambient norm of the orthogonal
    residual; polytope rows report their scaled linear violation.
    """
    z = as_vector(z, n.dim)
    if isinstance(body, Subspace):
        Q = orthonormal_basis(body.basis)
        return norm_eval(z - Q.T @ (Q @ z), n)
    if isinstance(body, SubspaceBall):
        Q = orthonormal_basis(body.basis)
        span = norm_eval(z - Q.T @ (Q @ z), n)
        return max(span, norm_eval(z, n) - body.radius)
    if isinstance(body, NormBall):
        return max(0.0, norm_eval(z, n) - body.radius)
    if isinstance(body, Polytope):
        scale = np.linalg.norm(body.H.normals, axis=1)
        scale[scale < 1e-300] = 1.0
        return max(0.0, float(np.max((body.H.normals @ z - body.H.offsets) / scale)))
    raise TypeError(f"unknown body {type(body).__name__}")


def contains(z, body: ConvexBody, n: NormSpec, tol: float = 1e-8) -> bool:
    return membership_violation(z, body, n) <= tol


def scale_body(body: ConvexBody, alpha: float) -> ConvexBody:
    """The dilated body ``alpha * C`` for ``alpha > 0``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if isinstance(body, Subspace):
        return body
    if isinstance(body, SubspaceBall):
        return SubspaceBall(body.basis, alpha * body.radius)
    if isinstance(body, NormBall):
        return NormBall(alpha * body.radius)
    if isinstance(body, Polytope):
        return Polytope(HPolytope(body.H.normals, alpha * body.H.offsets))
    raise TypeError(f"unknown body {type(body).__name__}")


def translate_body(body: ConvexBody, shift) -> ConvexBody:
    """Translate a polytope body; other variants have no translated counterpart."""
    if isinstance(body, Polytope):
        shift = as_vector(shift, body.H.dim)
        return Polytope(HPolytope(body.H.normals, body.H.offsets + body.H.normals @ shift))
    raise TypeError(f"{type(body).__name__} bodies cannot be translated")
