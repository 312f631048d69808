"""Exact geometry of S^2, S^2 x R and the quotient S^2 x S^1(r).

Points of the sphere are stored as unit 3-vectors, tangent vectors of the
product as a horizontal 3-vector plus a vertical component along xi.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _config
from .errors import InputDomainError

__all__ = [
    "SpherePoint",
    "ProdPoint",
    "ProdVector",
    "Isometry",
    "XI",
    "sphere_distance",
    "sphere_geodesic",
    "prod_distance",
    "apply_isometry",
    "ricci",
    "curvature_tensor",
    "reflection_fixing_circle",
    "rotation_about_axis",
]


def _as3(v):
    a = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise InputDomainError("non-finite coordinates")
    return a


@dataclass(frozen=True)
class SpherePoint:
    coords: np.ndarray

    def __post_init__(self):
        c = _as3(self.coords)
        n = np.linalg.norm(c)
        if n < 1e-300:
            raise InputDomainError("zero vector is not a point of S^2")
        object.__setattr__(self, "coords", c / n)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


@dataclass(frozen=True)
class ProdPoint:
    base: SpherePoint
    height: float = 0.0

    def __post_init__(self):
        if not isinstance(self.base, SpherePoint):
            object.__setattr__(self, "base", SpherePoint(self.base))
        object.__setattr__(self, "height", float(self.height))

    @property
    def p(self):
        return self.base.coords

    def chordal(self):
        """Coordinates in the ambient R^4 = R^3 x R."""
        return np.append(self.base.coords, self.height)


@dataclass(frozen=True)
class ProdVector:
    base: SpherePoint
    horizontal: np.ndarray = field(default_factory=lambda: np.zeros(3))
    vertical: float = 0.0

    def __post_init__(self):
        if not isinstance(self.base, SpherePoint):
            object.__setattr__(self, "base", SpherePoint(self.base))
        h = _as3(self.horizontal)
        scale = max(1.0, np.linalg.norm(h))
        if abs(h @ self.base.coords) > _config.UNIT_TOL * scale * 10:
            raise InputDomainError("horizontal part is not tangent to S^2")
        # remove rounding residue so the tangency invariant holds exactly
        h = h - (h @ self.base.coords) * self.base.coords
        object.__setattr__(self, "horizontal", h)
        object.__setattr__(self, "vertical", float(self.vertical))

    def as4(self):
        return np.append(self.horizontal, self.vertical)

    def dot(self, other: "ProdVector") -> float:
        return float(self.horizontal @ other.horizontal + self.vertical * other.vertical)

    def norm2(self) -> float:
        return self.dot(self)

    def __add__(self, other):
        _same_base(self, other)
        return ProdVector(self.base, self.horizontal + other.horizontal, self.vertical + other.vertical)

    def __sub__(self, other):
        _same_base(self, other)
        return ProdVector(self.base, self.horizontal - other.horizontal, self.vertical - other.vertical)

    def __mul__(self, s):
        return ProdVector(self.base, self.horizontal * s, self.vertical * s)

    __rmul__ = __mul__


def XI(base) -> ProdVector:
    """The unit vertical field at ``base``."""
    return ProdVector(base, np.zeros(3), 1.0)


def _same_base(u: ProdVector, v: ProdVector):
    if np.linalg.norm(u.base.coords - v.base.coords) > _config.GEOM_TOL:
        raise InputDomainError("tangent vectors live at different base points")


def sphere_distance(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    # atan2 form keeps full precision near 0 and pi; same value as clamped arccos
    return float(np.arctan2(np.linalg.norm(np.cross(p, q)), np.clip(p @ q, -1.0, 1.0)))


def sphere_geodesic(p, u, s: float) -> SpherePoint:
    """Walk arc length ``s`` from ``p`` along the great circle with unit tangent ``u``."""
    p = np.asarray(p.coords if isinstance(p, SpherePoint) else p, dtype=float)
    u = _as3(u)
    if abs(np.linalg.norm(p) - 1.0) > 1e-9:
        raise InputDomainError("p is not on the unit sphere")
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise InputDomainError("direction must be a unit vector")
    if abs(u @ p) > 1e-9:
        raise InputDomainError("direction must be tangent at p")
    return SpherePoint(np.cos(s) * p + np.sin(s) * u)


def prod_distance(x: ProdPoint, y: ProdPoint) -> float:
    d = sphere_distance(x.base.coords, y.base.coords)
    return float(np.hypot(d, x.height - y.height))


def reflection_fixing_circle(axis) -> np.ndarray:
    """Orthogonal reflection of R^3 fixing the great circle with unit normal ``axis``."""
    n = _as3(axis)
    n = n / np.linalg.norm(n)
    return np.eye(3) - 2.0 * np.outer(n, n)


def rotation_about_axis(axis, angle: float) -> np.ndarray:
    k = _as3(axis)
    k = k / np.linalg.norm(k)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


ISOMETRY_KINDS = (
    "sphere-rotation",
    "vertical-translation",
    "slice-reflection",
    "vertical-plane-reflection",
    "vertical-geodesic-rotation",
    "horizontal-geodesic-rotation",
    "composite",
)


@dataclass(frozen=True)
class Isometry:
    """(p, t) -> (Q p, sign * t + shift)."""

    kind: str
    matrix: np.ndarray = field(default_factory=lambda: np.eye(3))
    sign: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if self.kind not in ISOMETRY_KINDS:
            raise InputDomainError(f"unknown isometry kind {self.kind!r}")
        Q = np.asarray(self.matrix, dtype=float)
        if Q.shape != (3, 3) or not np.allclose(Q.T @ Q, np.eye(3), atol=1e-9):
            raise InputDomainError("sphere part must be an orthogonal 3x3 matrix")
        if self.sign not in (1.0, -1.0, 1, -1):
            raise InputDomainError("height part must be t -> +-t + c")
        object.__setattr__(self, "matrix", Q)
        object.__setattr__(self, "sign", float(self.sign))
        object.__setattr__(self, "shift", float(self.shift))

    # constructors -------------------------------------------------------
    @classmethod
    def identity(cls):
        return cls("composite")

    @classmethod
    def sphere_rotation(cls, axis, angle):
        return cls("sphere-rotation", rotation_about_axis(axis, angle))

    @classmethod
    def vertical_translation(cls, c):
        return cls("vertical-translation", np.eye(3), 1.0, c)

    @classmethod
    def slice_reflection(cls, t0):
        return cls("slice-reflection", np.eye(3), -1.0, 2.0 * t0)

    @classmethod
    def vertical_plane_reflection(cls, axis):
        return cls("vertical-plane-reflection", reflection_fixing_circle(axis))

    @classmethod
    def vertical_geodesic_rotation(cls, p0):
        return cls("vertical-geodesic-rotation", rotation_about_axis(p0, np.pi))

    @classmethod
    def horizontal_geodesic_rotation(cls, axis, t0):
        return cls("horizontal-geodesic-rotation", reflection_fixing_circle(axis), -1.0, 2.0 * t0)

    # algebra ------------------------------------------------------------
    def __matmul__(self, other: "Isometry") -> "Isometry":
        """``(self @ other)(x) == self(other(x))``."""
        return Isometry(
            "composite",
            self.matrix @ other.matrix,
            self.sign * other.sign,
            self.sign * other.shift + self.shift,
        )

    def inverse(self) -> "Isometry":
        return Isometry(self.kind, self.matrix.T, self.sign, -self.sign * self.shift)

    def apply(self, points: np.ndarray, heights: np.ndarray):
        """Vectorised action on arrays of base points (n, 3) and heights (n,)."""
        return np.asarray(points) @ self.matrix.T, self.sign * np.asarray(heights) + self.shift

    @property
    def preserves_orientation(self) -> bool:
        return np.linalg.det(self.matrix) * self.sign > 0


def apply_isometry(g: Isometry, x: ProdPoint) -> ProdPoint:
    if not isinstance(g, Isometry):
        raise InputDomainError("expected an Isometry")
    return ProdPoint(SpherePoint(g.matrix @ x.base.coords), g.sign * x.height + g.shift)


def ricci(v: ProdVector) -> float:
    """Ric(v) = |v|^2 - <v, xi>^2."""
    return float(v.horizontal @ v.horizontal)


def curvature_tensor(x: ProdVector, y: ProdVector, z: ProdVector) -> ProdVector:
    """R(X,Y)Z of S^2 x R written through the metric and xi."""
    _same_base(x, y)
    _same_base(y, z)
    xi = XI(x.base)
    xz, yz = x.dot(z), y.dot(z)
    xx, yx, zx = x.dot(xi), y.dot(xi), z.dot(xi)
    out = x * yz - y * xz + y * (xx * zx) - x * (yx * zx) + xi * (xz * yx - yz * xx)
    return out
