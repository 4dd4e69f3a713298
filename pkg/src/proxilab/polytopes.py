"""Halfspace and vertex representations of convex polytopes.

These are plain data containers; all algorithms that operate on them
(LP solving, vertex enumeration) live in :mod:`proxilab.solver`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-D float array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.shape[0]}")
    return v


@dataclass(frozen=True)
class HPolytope:
    """Intersection of halfspaces ``normals @ z <= offsets``."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        normals = np.atleast_2d(np.asarray(self.normals, dtype=float))
        offsets = np.asarray(self.offsets, dtype=float).ravel()
        if normals.shape[0] != offsets.shape[0]:
            raise DimensionMismatchError("one offset per normal required")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def nrows(self) -> int:
        return self.normals.shape[0]

    def violation(self, z) -> float:
        """Largest constraint violation at ``z`` (<= 0 means feasible)."""
        z = as_vector(z, self.dim)
        return float(np.max(self.normals @ z - self.offsets))

    def contains(self, z, tol: float = 1e-9) -> bool:
        return self.violation(z) <= tol

    def stack(self, other: "HPolytope") -> "HPolytope":
        if other.dim != self.dim:
            raise DimensionMismatchError("cannot stack polytopes of different dimension")
        return HPolytope(
            np.vstack([self.normals, other.normals]),
            np.concatenate([self.offsets, other.offsets]),
        )


def box(dim: int, radius: float) -> HPolytope:
    """The cube ``|z_j| <= radius``."""
    eye = np.eye(dim)
    return HPolytope(np.vstack([eye, -eye]), np.full(2 * dim, float(radius)))


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of finitely many points (rows of ``vertices``)."""

    vertices: np.ndarray

    def __post_init__(self):
        verts = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if verts.shape[0] == 0:
            raise ValueError("a VPolytope needs at least one vertex")
        object.__setattr__(self, "vertices", verts)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def nvertices(self) -> int:
        return self.vertices.shape[0]


@dataclass(frozen=True)
class LinearProgram:
    """Minimize ``objective @ z`` over ``feasible`` intersected with equalities."""

    objective: np.ndarray
    feasible: HPolytope
    equalities: tuple = field(default_factory=tuple)

    def __post_init__(self):
        obj = as_vector(self.objective, self.feasible.dim)
        eqs = []
        for normal, value in self.equalities:
            eqs.append((as_vector(normal, self.feasible.dim), float(value)))
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "equalities", tuple(eqs))

    @property
    def dim(self) -> int:
        return self.feasible.dim
