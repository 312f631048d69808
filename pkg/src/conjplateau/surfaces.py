"""The boundary pentagon of the Plateau problem and reference surfaces.

The reference surfaces (slices, vertical cylinders and vertical helicoids)
double as solver fixtures and as inputs of the topology checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError
from .manifold import ProdPoint, prod_distance
from .mesh import SurfaceMesh
from .sphtrig import HingeSpec, TriangleData, solve_hinge

CLOSURE_TOL = 1e-10


@dataclass(frozen=True)
class ContourSpec:
    hinge: HingeSpec
    h_tilde: float

    def __post_init__(self):
        if not (0.0 < self.h_tilde <= math.pi / 2 + 1e-12):
            raise InputDomainError(f"h_tilde={self.h_tilde} outside (0, pi/2]")

    @classmethod
    def from_values(cls, a_tilde, b_tilde, gamma, h_tilde):
        return cls(HingeSpec(a_tilde, b_tilde, gamma), h_tilde)

    @property
    def symmetric(self) -> bool:
        return abs(self.hinge.a_tilde - self.hinge.b_tilde) < 1e-14


@dataclass(frozen=True)
class EdgeRecord:
    label: str  # "12", "23", ...
    kind: str  # "vertical-geodesic" or "horizontal-geodesic"
    start: ProdPoint
    end: ProdPoint
    length: float


@dataclass(frozen=True)
class GeodesicPolygon:
    spec: ContourSpec
    triangle: TriangleData
    vertices: tuple  # ProdPoints labelled 1..5 (index 0..4)
    edges: tuple

    def vertex(self, label: int) -> ProdPoint:
        return self.vertices[label - 1]

    def edge(self, label: str) -> EdgeRecord:
        for e in self.edges:
            if e.label == label:
                return e
        raise KeyError(label)

    def corner_angle(self, label: int) -> float:
        """Interior angle of the pentagon at a vertex, from the adjacent edge directions."""
        prev_edge = self.edges[(label - 2) % 5]
        next_edge = self.edges[(label - 1) % 5]
        x = self.vertex(label)
        u = _edge_direction(next_edge.end, x)
        v = _edge_direction(prev_edge.start, x)
        return float(math.atan2(_norm_wedge(u, v), u @ v))


def _edge_direction(target: ProdPoint, at: ProdPoint):
    """Unit initial velocity (horizontal 3-vector, vertical) of the geodesic from ``at`` to ``target``."""
    p, q = at.p, target.p
    dt = target.height - at.height
    horiz = q - (p @ q) * p
    n = np.linalg.norm(horiz)
    if n > 1e-15:
        d = math.atan2(n, p @ q)
        horiz = horiz / n * d
    v = np.append(horiz, dt)
    return v / np.linalg.norm(v)


def _norm_wedge(u, v):
    return math.sqrt(max(0.0, (u @ u) * (v @ v) - (u @ v) ** 2))


def hinge_points(hinge: HingeSpec):
    """Canonical base points (P5, P1, P4): P5 at the north pole, P1 on the x-z meridian."""
    a, b, g = hinge.a_tilde, hinge.b_tilde, hinge.gamma
    p5 = np.array([0.0, 0.0, 1.0])
    p1 = np.array([math.sin(a), 0.0, math.cos(a)])
    p4 = np.array([math.sin(b) * math.cos(g), math.sin(b) * math.sin(g), math.cos(b)])
    return p5, p1, p4


def build_contour(spec: ContourSpec) -> GeodesicPolygon:
    tri = solve_hinge(spec.hinge)
    p5, p1, p4 = hinge_points(spec.hinge)
    h = spec.h_tilde
    v = (
        ProdPoint(p1, h),
        ProdPoint(p1, 0.0),
        ProdPoint(p4, 0.0),
        ProdPoint(p4, h),
        ProdPoint(p5, h),
    )
    kinds = {
        "12": "vertical-geodesic",
        "23": "horizontal-geodesic",
        "34": "vertical-geodesic",
        "45": "horizontal-geodesic",
        "51": "horizontal-geodesic",
    }
    edges = []
    for i in range(5):
        s, e = v[i], v[(i + 1) % 5]
        label = f"{i + 1}{(i + 1) % 5 + 1}"
        edges.append(EdgeRecord(label, kinds[label], s, e, prod_distance(s, e)))
    poly = GeodesicPolygon(spec, tri, v, tuple(edges))
    expected = {"12": h, "23": tri.c, "34": h, "45": spec.hinge.b_tilde, "51": spec.hinge.a_tilde}
    for e in edges:
        if abs(e.length - expected[e.label]) > CLOSURE_TOL:
            raise AssertionError(f"edge {e.label} length {e.length} != {expected[e.label]}")
    return poly


# ---------------------------------------------------------------- slices


def _icosahedron():
    t = (1.0 + math.sqrt(5.0)) / 2.0
    V = np.array(
        [
            [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
            [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
            [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
        ],
        dtype=float,
    )
    F = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ]
    )
    return V / np.linalg.norm(V, axis=1)[:, None], F


def _merge_points(P, tol=1e-12):
    from scipy.spatial import cKDTree

    tree = cKDTree(P)
    pairs = tree.query_pairs(tol, output_type="ndarray")
    parent = np.arange(len(P))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = np.array([find(i) for i in range(len(P))])
    uniq, inverse = np.unique(roots, return_inverse=True)
    return uniq, inverse


def slice_mesh(t0: float, resolution: int, warp: float = 0.0) -> SurfaceMesh:
    """Geodesic icosphere of frequency ``resolution`` at height ``t0``.

    ``warp`` applies a smooth tangential displacement field so that the mesh has
    no symmetry left; useful for convergence studies.
    """
    if int(resolution) != resolution or resolution < 2:
        raise InputDomainError("resolution must be an integer >= 2")
    n = int(resolution)
    V0, F0 = _icosahedron()
    pts = []
    faces = []
    for a, b, c in F0:
        A, B, C = V0[a], V0[b], V0[c]
        base = len(pts)
        index = {}
        for i in range(n + 1):
            for j in range(n + 1 - i):
                k = n - i - j
                index[(i, j)] = base + len(index)
                pts.append((k * A + i * B + j * C) / n)
        for i in range(n):
            for j in range(n - i):
                faces.append((index[(i, j)], index[(i + 1, j)], index[(i, j + 1)]))
                if j + i + 1 < n:
                    faces.append((index[(i + 1, j)], index[(i + 1, j + 1)], index[(i, j + 1)]))
    P = np.array(pts)
    P /= np.linalg.norm(P, axis=1)[:, None]
    keep, inv = _merge_points(P, 1e-9)
    P = P[keep]
    F = inv[np.asarray(faces)]
    if warp:
        P = _sphere_warp(P, warp)
    F = _orient_outward(P, F)
    heights = np.full(len(P), float(t0))
    N = np.zeros((len(P), 4))
    N[:, 3] = 1.0
    return SurfaceMesh(P, heights, F, tags=["slice"] * len(P), normals=N, nu=np.ones(len(P)))


def _sphere_warp(P, amp):
    """Smooth tangential displacement, then renormalisation."""
    x, y, z = P.T
    disp = np.column_stack([np.sin(2 * y + 0.3), np.sin(3 * z + 0.1), np.cos(2 * x - 0.2)]) * amp
    disp -= np.einsum("ij,ij->i", disp, P)[:, None] * P
    Q = P + disp
    return Q / np.linalg.norm(Q, axis=1)[:, None]


def _orient_outward(P, F):
    d = np.einsum("ij,ij->i", P[F[:, 0]], np.cross(P[F[:, 1]], P[F[:, 2]]))
    F = F.copy()
    flip = d < 0
    F[flip] = F[flip][:, [0, 2, 1]]
    return F


# ---------------------------------------------------------------- cylinders


def _circle_frame(axis):
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    seed = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = seed - (seed @ n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return n, e1, e2


def _grid_faces(nu, nt, wrap_u=True, sew=None):
    """Triangulate an (nu x nt) periodic grid; ``sew(i)`` maps column i at the top row to the bottom row."""
    def vid(i, j):
        return (i % nu) * nt + j

    faces = []
    for i in range(nu if wrap_u else nu - 1):
        for j in range(nt):
            a = vid(i, j)
            b = vid(i + 1, j)
            if j + 1 < nt:
                c, d = vid(i + 1, j + 1), vid(i, j + 1)
            else:
                c, d = sew(i + 1), sew(i)
            faces.append((a, b, c))
            faces.append((a, c, d))
    return np.asarray(faces, dtype=np.int64)


def cylinder_mesh(great_circle, r: float, resolution: int, warp: float = 0.0) -> SurfaceMesh:
    """Vertical torus Gamma x S^1(r) over the great circle with unit normal ``great_circle``."""
    if int(resolution) != resolution or resolution < 3:
        raise InputDomainError("resolution must be an integer >= 3")
    if r <= 0:
        raise InputDomainError("r must be positive")
    n, e1, e2 = _circle_frame(great_circle)
    period = 2 * math.pi * r
    nu_ = int(resolution)
    nt = 2 * max(2, int(math.ceil(resolution * r / 2)))  # even: the t = pi r row exists
    u = 2 * math.pi * np.arange(nu_) / nu_
    t = period * np.arange(nt) / nt
    U, T = np.meshgrid(u, t, indexing="ij")
    if warp:
        U = U + warp * np.sin(T / r) * np.cos(U)
        T = T + warp * r * np.sin(U + 0.4)
    P = np.cos(U)[..., None] * e1 + np.sin(U)[..., None] * e2
    P = P.reshape(-1, 3)
    H = T.reshape(-1)
    F = _grid_faces(nu_, nt, sew=lambda i: (i % nu_) * nt)
    N = np.zeros((len(P), 4))
    N[:, :3] = np.broadcast_to(n, P.shape)  # horizontal, normal to the plane of the circle
    return SurfaceMesh(P, H, F, tags=["cylinder"] * len(P), normals=N, nu=np.zeros(len(P)), period=period)


# ---------------------------------------------------------------- helicoids


def helicoid_mesh(pitch: float, r: float, resolution: int) -> SurfaceMesh:
    """Vertical helicoid of pitch ``pitch`` closed up in S^2 x S^1(r).

    Every height carries a full great circle through the poles, rotated by
    2*pi*t/pitch.  ``pitch == 2 pi r`` closes to a torus; ``pitch == 4 pi r``
    identifies (u, t + 2 pi r) with (-u, t), giving a Klein bottle.
    """
    if r <= 0 or pitch <= 0:
        raise InputDomainError("pitch and r must be positive")
    period = 2 * math.pi * r
    if abs(pitch - period) <= 1e-9 * period:
        klein = False
    elif abs(pitch - 2 * period) <= 1e-9 * period:
        klein = True
    else:
        raise InputDomainError("pitch must equal 2*pi*r (torus) or 4*pi*r (Klein bottle)")
    if int(resolution) != resolution or resolution < 2:
        raise InputDomainError("resolution must be an integer >= 2")
    nu_ = 4 * int(resolution)  # multiple of 4: both poles and the equator are sampled
    nt = 2 * max(2, int(round(2 * resolution * r)))  # even: the t = pi r row exists
    u = 2 * math.pi * np.arange(nu_) / nu_
    t = period * np.arange(nt) / nt
    U, T = np.meshgrid(u, t, indexing="ij")
    omega = 2 * math.pi / pitch
    P = np.stack(
        [np.sin(U) * np.cos(omega * T), np.sin(U) * np.sin(omega * T), np.cos(U)], axis=-1
    ).reshape(-1, 3)
    H = T.reshape(-1)
    if klein:
        sew = lambda i: ((-i) % nu_) * nt  # noqa: E731
    else:
        sew = lambda i: (i % nu_) * nt  # noqa: E731
    F = _grid_faces(nu_, nt, sew=sew)
    mesh = SurfaceMesh(P, H, F, tags=["helicoid"] * len(P), period=period)
    mesh.tags = [
        "pole" if (i // nt) % (nu_ // 2) == 0 else "helicoid" for i in range(len(P))
    ]
    return mesh.with_normals(helicoid_normals(P, H, omega))


def helicoid_normals(P, H, omega):
    """Exact unit normals of the helicoid at the given points."""
    # tangent vectors: d/du and d/dt of the parametrisation, evaluated via (p, t)
    phi = omega * H
    axis_dir = np.column_stack([np.cos(phi), np.sin(phi), np.zeros_like(phi)])
    pole = np.array([0.0, 0.0, 1.0])
    # d/du lies along the great circle through the poles containing p
    w = np.cross(np.cross(axis_dir, pole), P)  # tangent along the meridian
    # d/dt = omega * (z x p) + xi
    rot = omega * np.cross(np.broadcast_to(pole, P.shape), P)
    T1 = np.column_stack([w, np.zeros(len(P))])
    T2 = np.column_stack([rot, np.ones(len(P))])
    X = np.column_stack([P, np.zeros(len(P))])
    from .mesh import cross4

    N = cross4(X, T1, T2)
    N /= np.linalg.norm(N, axis=1)[:, None]
    return N
