"""Riemannian target manifolds (N, g) with closed-form exp/log.

Three backends: Euclidean R^n, the flat torus R^n/Z^n with the unit
lattice, and the unit round sphere S^2 embedded in R^3.  All core
operations are vectorized over arrays of points/vectors with the
coordinate dimension last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CutLocusError

_SPHERE_NORM_TOL = 1e-12
_SPHERE_TANGENT_TOL = 1e-10


class AmbientSpace:
    """Base class for the ambient manifold (N, g)."""

    kind: str
    dim: int        # manifold dimension of N
    coord_dim: int  # length of stored coordinate vectors

    def inner(self, p: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Metric g_p(v, w); induced dot product for every backend."""
        return np.sum(np.asarray(v) * np.asarray(w), axis=-1)

    def norm(self, p: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.sqrt(self.inner(p, v, v))

    def exp(self, p: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dist(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        return self.norm(p, self.log(p, q))

    def injectivity_radius(self, p=None) -> float:
        raise NotImplementedError

    def project_tangent(self, p: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Project an ambient-coordinate vector onto T_p N."""
        return np.asarray(v, dtype=float)

    def to_spec(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}

    @staticmethod
    def from_spec(spec: dict) -> "AmbientSpace":
        kind = spec["kind"]
        if kind == "euclidean":
            return Euclidean(int(spec["dim"]))
        if kind == "flat_torus":
            return FlatTorus(int(spec["dim"]))
        if kind == "sphere2":
            return Sphere2()
        raise ValueError(f"unknown ambient kind {kind!r}")

    def __eq__(self, other):
        return (
            isinstance(other, AmbientSpace)
            and self.kind == other.kind
            and self.dim == other.dim
        )

    def __hash__(self):
        return hash((self.kind, self.dim))

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class Euclidean(AmbientSpace):
    kind = "euclidean"

    def __init__(self, dim: int):
        if dim < 2:
            raise ValueError("euclidean ambient needs dim >= 2")
        self.dim = dim
        self.coord_dim = dim

    def exp(self, p, v):
        return np.asarray(p, float) + np.asarray(v, float)

    def log(self, p, q):
        return np.asarray(q, float) - np.asarray(p, float)

    def injectivity_radius(self, p=None) -> float:
        return np.inf


class FlatTorus(AmbientSpace):
    """R^n / Z^n with the flat metric of the unit lattice.

    Coordinates reduce to the fundamental domain [0, 1)^n.  The logarithm
    picks the shortest lattice representative; exact half-lattice ties
    resolve deterministically to the positive representative.
    """

    kind = "flat_torus"

    def __init__(self, dim: int):
        if dim < 2:
            raise ValueError("flat torus ambient needs dim >= 2")
        self.dim = dim
        self.coord_dim = dim

    def reduce(self, p):
        return np.mod(np.asarray(p, float), 1.0)

    def exp(self, p, v):
        return self.reduce(np.asarray(p, float) + np.asarray(v, float))

    def log(self, p, q):
        d = np.asarray(q, float) - np.asarray(p, float)
        # shortest representative in (-1/2, 1/2]; ties go positive
        return 0.5 - np.mod(0.5 - d, 1.0)

    def injectivity_radius(self, p=None) -> float:
        return 0.5


class Sphere2(AmbientSpace):
    """Unit round sphere S^2, points stored as unit 3-vectors."""

    kind = "sphere2"
    dim = 2
    coord_dim = 3

    _antipodal_tol = 1e-8

    def project_tangent(self, p, v):
        p = np.asarray(p, float)
        v = np.asarray(v, float)
        return v - np.sum(p * v, axis=-1, keepdims=True) * p

    def exp(self, p, v):
        p = np.asarray(p, float)
        v = np.asarray(v, float)
        r = np.linalg.norm(v, axis=-1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            direction = np.where(r > 0.0, v / np.where(r == 0.0, 1.0, r), 0.0)
        return np.cos(r) * p + np.sin(r) * direction

    def log(self, p, q):
        p = np.asarray(p, float)
        q = np.asarray(q, float)
        cosang = np.clip(np.sum(p * q, axis=-1), -1.0, 1.0)
        ang = np.arccos(cosang)
        if np.any(ang > np.pi - self._antipodal_tol):
            raise CutLocusError("log undefined near antipodal points on sphere2")
        w = q - cosang[..., None] * p
        nw = np.linalg.norm(w, axis=-1)
        scale = np.where(nw > 0.0, ang / np.where(nw == 0.0, 1.0, nw), 0.0)
        return scale[..., None] * w

    def dist(self, p, q):
        cosang = np.clip(np.sum(np.asarray(p) * np.asarray(q), axis=-1), -1.0, 1.0)
        return np.arccos(cosang)

    def injectivity_radius(self, p=None) -> float:
        return np.pi


@dataclass(frozen=True)
class AmbientPoint:
    """A single point of N, with backend invariants checked on creation."""

    space: AmbientSpace
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.shape != (self.space.coord_dim,):
            raise ValueError("coordinate length does not match ambient space")
        if self.space.kind == "flat_torus":
            coords = np.mod(coords, 1.0)
        if self.space.kind == "sphere2":
            if abs(np.linalg.norm(coords) - 1.0) > _SPHERE_NORM_TOL:
                raise ValueError("sphere2 points must be unit vectors")
        object.__setattr__(self, "coords", coords)


@dataclass(frozen=True)
class TangentVec:
    """A tangent vector of N at a base point."""

    base: AmbientPoint
    comp: np.ndarray

    def __post_init__(self):
        comp = np.asarray(self.comp, dtype=float)
        if comp.shape != self.base.coords.shape:
            raise ValueError("component length does not match base point")
        if self.base.space.kind == "sphere2":
            if abs(float(np.dot(comp, self.base.coords))) > _SPHERE_TANGENT_TOL:
                raise ValueError("sphere2 tangent vectors must be orthogonal to the base point")
        object.__setattr__(self, "comp", comp)

    @property
    def space(self) -> AmbientSpace:
        return self.base.space


def metric_inner(space: AmbientSpace, v: TangentVec, w: TangentVec) -> float:
    """g(v, w) for tangent vectors at a common base point."""
    if not np.array_equal(v.base.coords, w.base.coords):
        raise ValueError("metric_inner requires a common base point")
    return float(space.inner(v.base.coords, v.comp, w.comp))


def exp_map(space: AmbientSpace, v: TangentVec) -> AmbientPoint:
    """Riemannian exponential exp_{base}(v)."""
    return AmbientPoint(space, space.exp(v.base.coords, v.comp))


def log_map(space: AmbientSpace, p: AmbientPoint, q: AmbientPoint) -> TangentVec:
    """Riemannian logarithm: the vector v with exp_p(v) = q, shortest representative."""
    return TangentVec(p, space.log(p.coords, q.coords))


def injectivity_radius(space: AmbientSpace, p: AmbientPoint | None = None) -> float:
    """Injectivity radius at p (constant for every backend)."""
    return space.injectivity_radius(None if p is None else p.coords)
