"""Triangulated surfaces in S^2 x R and in the quotient S^2 x S^1(r)."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import kernels
from .errors import InputDomainError, MeshQualityError

MIN_FACE_AREA = 1e-14


def cross4(a, b, c):
    """Vector n with n . x = det[a; b; c; x] for all x (rows broadcast)."""
    M = np.stack(np.broadcast_arrays(a, b, c), axis=-2)  # (..., 3, 4)
    out = np.empty(M.shape[:-2] + (4,))
    # exactly singular minors make LAPACK warn; their determinant is still 0
    with np.errstate(divide="ignore", invalid="ignore"):
        for k in range(4):
            cols = [j for j in range(4) if j != k]
            out[..., k] = (-1) ** (3 + k) * np.linalg.det(M[..., cols])
    return out


def wrap_heights(heights, period):
    if period is None:
        return np.asarray(heights, dtype=float)
    return np.mod(heights, period)


@dataclass
class SurfaceMesh:
    points: np.ndarray
    heights: np.ndarray
    faces: np.ndarray
    tags: list = field(default=None)
    normals: Optional[np.ndarray] = None
    nu: Optional[np.ndarray] = None
    period: Optional[float] = None  # 2 pi r for meshes living in the quotient

    def __post_init__(self):
        self.points = np.array(self.points, dtype=float).reshape(-1, 3)
        norms = np.linalg.norm(self.points, axis=1)
        if np.any(norms == 0):
            raise InputDomainError("zero base point")
        # rows already unit to rounding are left alone so reloading is a fixed point
        off = np.abs(norms - 1.0) > 4 * np.finfo(float).eps
        if off.any():
            self.points[off] = self.points[off] / norms[off, None]
        self.heights = np.asarray(self.heights, dtype=float).reshape(-1)
        if self.heights.shape[0] != self.points.shape[0]:
            raise InputDomainError("points/heights length mismatch")
        self.faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if self.tags is None:
            self.tags = [None] * len(self.points)
        if self.period is not None:
            self.period = float(self.period)
            self.heights = np.mod(self.heights, self.period)

    # -- basic sizes -------------------------------------------------------
    @property
    def n_vertices(self):
        return self.points.shape[0]

    @property
    def n_faces(self):
        return self.faces.shape[0]

    def copy(self, **changes):
        return replace(self, **changes)

    # -- geometry ----------------------------------------------------------
    def face_coords(self):
        """Chordal R^4 coordinates per face corner, heights unwrapped locally."""
        P = self.points[self.faces]
        H = self.heights[self.faces].copy()
        if self.period is not None:
            ref = H[:, :1]
            H = ref + (np.mod(H - ref + 0.5 * self.period, self.period) - 0.5 * self.period)
        return np.concatenate([P, H[..., None]], axis=-1)

    def chordal(self):
        return np.column_stack([self.points, self.heights])

    def face_areas(self):
        X = self.face_coords().reshape(-1, 4)
        F = np.arange(X.shape[0]).reshape(-1, 3)
        return kernels.face_areas(X, F)

    def area(self):
        return float(self.face_areas().sum())

    def area_gradient(self):
        """Gradient of the total chordal area w.r.t. every vertex (n, 4)."""
        X = self.face_coords().reshape(-1, 4)
        F = np.arange(X.shape[0]).reshape(-1, 3)
        total, g = kernels.chordal_area_gradient(X, F)
        grad = np.zeros((self.n_vertices, 4))
        np.add.at(grad, self.faces.reshape(-1), g)
        return total, grad

    def face_normals_at(self, corner: int = 0):
        """Unit normal of every face in the tangent space at one of its corners."""
        X = self.face_coords()
        P = np.zeros((self.n_faces, 4))
        P[:, :3] = X[:, corner, :3]
        e1 = X[:, 1] - X[:, 0]
        e2 = X[:, 2] - X[:, 0]
        e1 = e1 - np.einsum("ij,ij->i", e1, P)[:, None] * P
        e2 = e2 - np.einsum("ij,ij->i", e2, P)[:, None] * P
        n = cross4(P, e1, e2)
        nn = np.linalg.norm(n, axis=1)
        nn[nn == 0] = 1.0
        return n / nn[:, None]

    def compute_normals(self):
        """Area-weighted vertex normals projected to the product tangent space."""
        A = self.face_areas()
        acc = np.zeros((self.n_vertices, 4))
        for corner in range(3):
            n = self.face_normals_at(corner)
            np.add.at(acc, self.faces[:, corner], n * A[:, None])
        acc[:, :3] -= np.einsum("ij,ij->i", acc[:, :3], self.points)[:, None] * self.points
        nrm = np.linalg.norm(acc, axis=1)
        nrm[nrm == 0] = 1.0
        N = acc / nrm[:, None]
        return N

    def with_normals(self, normals=None):
        N = self.compute_normals() if normals is None else np.asarray(normals, dtype=float)
        nu = np.clip(N[:, 3], -1.0, 1.0)
        return self.copy(normals=N, nu=nu)

    # -- combinatorics ---------------------------------------------------
    def edges(self):
        """Unique undirected edges (k, 2) and the number of faces on each."""
        E = np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]])
        E = np.sort(E, axis=1)
        uniq, counts = np.unique(E, axis=0, return_counts=True)
        return uniq, counts

    def boundary_edges(self):
        E, c = self.edges()
        return E[c == 1]

    def is_watertight(self):
        _, c = self.edges()
        return bool(np.all(c == 2))

    def validate(self):
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= self.n_vertices):
            raise MeshQualityError("face index out of range")
        A = self.face_areas()
        bad = np.flatnonzero(A <= MIN_FACE_AREA)
        if bad.size:
            raise MeshQualityError(f"{bad.size} degenerate faces (min area {A.min():.3e})")
        _, c = self.edges()
        if np.any(c > 2):
            raise MeshQualityError("non-manifold edge shared by more than two faces")
        if self.nu is not None and (np.any(self.nu < -1 - 1e-12) or np.any(self.nu > 1 + 1e-12)):
            raise MeshQualityError("angle function outside [-1, 1]")
        return self

    def vertex_faces(self):
        """CSR-style incidence: list of face indices for every vertex."""
        order = np.argsort(self.faces.reshape(-1), kind="stable")
        verts = self.faces.reshape(-1)[order]
        starts = np.searchsorted(verts, np.arange(self.n_vertices + 1))
        return [order[starts[i]:starts[i + 1]] // 3 for i in range(self.n_vertices)]

    def vertex_areas(self):
        A = self.face_areas()
        out = np.zeros(self.n_vertices)
        for k in range(3):
            np.add.at(out, self.faces[:, k], A / 3.0)
        return out

    def diameter_estimate(self):
        X = self.chordal()
        return float(np.linalg.norm(X.max(axis=0) - X.min(axis=0)))

    def mean_edge_length(self):
        X = self.face_coords()
        L = np.linalg.norm(X[:, [1, 2, 0]] - X, axis=-1)
        return float(L.mean())
