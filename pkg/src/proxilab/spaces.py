"""Finite-dimensional real normed spaces.

Three norm families are supported:

* ``Lp(p, dim)`` for ``1 <= p <= inf``;
* ``Polyhedral(generators, dim)`` with gauge ``max_k |<g_k, x>|``
  (the generators must span, so the gauge is a genuine norm);
* ``SupDirectSum(inner, extra_dims)``, the sup-norm direct sum of an inner
  normed space with ``extra_dims`` additional real coordinates, i.e.
  ``||(w, s)|| = max(||w||_inner, max_j |s_j|)``.

Vectors are plain 1-D numpy arrays.  ``l1`` is treated as polyhedral via its
``2^dim`` sign-pattern generators, which keeps the LP pipeline exact; that
representation is capped at ``dim <= 8``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Union

import numpy as np

from .errors import DimTooLargeError, DimensionMismatchError, NoExactHRepError
from .polytopes import HPolytope, as_vector

L1_POLYHEDRAL_DIM_CAP = 8


@dataclass(frozen=True)
class Lp:
    p: float
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not (self.p >= 1.0):
            raise ValueError(f"p must satisfy p >= 1, got {self.p}")


@dataclass(frozen=True)
class Polyhedral:
    """Norm ``max_k |<g_k, x>|`` induced by a spanning set of generators."""

    generators: np.ndarray
    dim: int

    def __post_init__(self):
        gens = np.atleast_2d(np.asarray(self.generators, dtype=float))
        if gens.shape[1] != self.dim:
            raise DimensionMismatchError("generator dimension mismatch")
        if np.linalg.matrix_rank(gens) < self.dim:
            raise ValueError("generators must span the space for the gauge to be a norm")
        object.__setattr__(self, "generators", gens)


@dataclass(frozen=True)
class SupDirectSum:
    inner: "NormSpec"
    extra_dims: int

    def __post_init__(self):
        if self.extra_dims < 1:
            raise ValueError("extra_dims must be positive")

    @property
    def dim(self) -> int:
        return self.inner.dim + self.extra_dims


NormSpec = Union[Lp, Polyhedral, SupDirectSum]


@dataclass(frozen=True)
class Space:
    dim: int
    norm: NormSpec

    def __post_init__(self):
        if self.norm.dim != self.dim:
            raise DimensionMismatchError("norm dimension must equal space dimension")


def linf(dim: int) -> Lp:
    return Lp(math.inf, dim)


def l2(dim: int) -> Lp:
    return Lp(2.0, dim)


def l1(dim: int) -> Lp:
    return Lp(1.0, dim)


def norm_eval(v, n: NormSpec) -> float:
    """Evaluate ``||v||`` in the given norm."""
    v = as_vector(v, n.dim)
    return _norm_eval(v, n)


def _norm_eval(v: np.ndarray, n: NormSpec) -> float:
    if isinstance(n, Lp):
        if math.isinf(n.p):
            return float(np.max(np.abs(v))) if v.size else 0.0
        if n.p == 1.0:
            return float(np.sum(np.abs(v)))
        if n.p == 2.0:
            return float(np.linalg.norm(v))
        return float(np.sum(np.abs(v) ** n.p) ** (1.0 / n.p))
    if isinstance(n, Polyhedral):
        return float(np.max(np.abs(n.generators @ v)))
    if isinstance(n, SupDirectSum):
        k = n.inner.dim
        head = _norm_eval(v[:k], n.inner)
        tail = float(np.max(np.abs(v[k:])))
        return max(head, tail)
    raise TypeError(f"unknown norm spec {type(n).__name__}")


def norm_subgradient(v, n: NormSpec) -> np.ndarray:
    """A subgradient of ``||.||`` at ``v``: a dual-unit vector ``g`` with ``<g, v> = ||v||``.

    At ``v = 0`` the zero vector is returned (a valid subgradient).
    """
    v = as_vector(v, n.dim)
    return _norm_subgradient(v, n)


def _norm_subgradient(v: np.ndarray, n: NormSpec) -> np.ndarray:
    if isinstance(n, Lp):
        if math.isinf(n.p):
            g = np.zeros_like(v)
            if v.size:
                j = int(np.argmax(np.abs(v)))
                if v[j] != 0.0:
                    g[j] = np.sign(v[j])
            return g
        if n.p == 1.0:
            return np.sign(v)
        nv = _norm_eval(v, n)
        if nv == 0.0:
            return np.zeros_like(v)
        if n.p == 2.0:
            return v / nv
        return np.sign(v) * (np.abs(v) / nv) ** (n.p - 1.0)
    if isinstance(n, Polyhedral):
        vals = n.generators @ v
        j = int(np.argmax(np.abs(vals)))
        if vals[j] == 0.0:
            return np.zeros_like(v)
        return np.sign(vals[j]) * n.generators[j]
    if isinstance(n, SupDirectSum):
        k = n.inner.dim
        g = np.zeros_like(v)
        head = _norm_eval(v[:k], n.inner)
        tail = float(np.max(np.abs(v[k:])))
        if head >= tail:
            g[:k] = _norm_subgradient(v[:k], n.inner)
        else:
            j = k + int(np.argmax(np.abs(v[k:])))
            g[j] = np.sign(v[j])
        return g
    raise TypeError(f"unknown norm spec {type(n).__name__}")


def is_polyhedral(n: NormSpec) -> bool:
    """True when the unit ball admits an exact halfspace representation here."""
    if isinstance(n, Lp):
        if math.isinf(n.p):
            return True
        return n.p == 1.0 and n.dim <= L1_POLYHEDRAL_DIM_CAP
    if isinstance(n, Polyhedral):
        return True
    if isinstance(n, SupDirectSum):
        return is_polyhedral(n.inner)
    return False


def is_strictly_convex(n: NormSpec) -> bool:
    if isinstance(n, Lp):
        return 1.0 < n.p < math.inf or n.dim == 1
    return False


def dual_generators(n: NormSpec) -> np.ndarray:
    """Rows ``g`` with ``||v|| = max_g <g, v>`` exactly (polyhedral norms only).

    The set is closed under negation, so the max really computes the gauge.
    """
    if isinstance(n, Lp):
        if math.isinf(n.p):
            eye = np.eye(n.dim)
            return np.vstack([eye, -eye])
        if n.p == 1.0:
            if n.dim > L1_POLYHEDRAL_DIM_CAP:
                raise DimTooLargeError(
                    f"l1 sign-pattern generators are capped at dim {L1_POLYHEDRAL_DIM_CAP}"
                )
            return np.array(list(product((1.0, -1.0), repeat=n.dim)))
        raise NoExactHRepError(f"no exact H-rep for the strictly convex norm p={n.p}")
    if isinstance(n, Polyhedral):
        return np.vstack([n.generators, -n.generators])
    if isinstance(n, SupDirectSum):
        inner_rows = dual_generators(n.inner)
        k, e = n.inner.dim, n.extra_dims
        head = np.hstack([inner_rows, np.zeros((inner_rows.shape[0], e))])
        eye = np.eye(e)
        tail = np.hstack([np.zeros((2 * e, k)), np.vstack([eye, -eye])])
        return np.vstack([head, tail])
    raise TypeError(f"unknown norm spec {type(n).__name__}")


def unit_ball_hrep(n: NormSpec) -> HPolytope:
    """The unit ball as an H-polytope; raises for strictly convex norms."""
    rows = dual_generators(n)
    return HPolytope(rows, np.ones(rows.shape[0]))


def random_unit_vector(n: NormSpec, seed: int) -> np.ndarray:
    """Deterministic unit vector: a normalized Gaussian sample."""
    rng = np.random.default_rng(seed)
    while True:
        v = rng.standard_normal(n.dim)
        nv = _norm_eval(v, n)
        if nv > 1e-8:
            return v / nv


def random_unit_vectors(n: NormSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` unit vectors drawn from an existing generator."""
    out = np.empty((count, n.dim))
    for i in range(count):
        while True:
            v = rng.standard_normal(n.dim)
            nv = _norm_eval(v, n)
            if nv > 1e-8:
                out[i] = v / nv
                break
    return out
