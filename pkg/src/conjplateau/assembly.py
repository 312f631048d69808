"""Reflection orbits of a fundamental piece, sewn into a compact mesh in S^2 x S^1(r)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.spatial import cKDTree

from .conjugation import PrismData
from .errors import AssemblyError, InconsistentConfigurationError, InputDomainError
from .manifold import Isometry
from .mesh import SurfaceMesh
from .plateau import PlateauSolution
from .sphtrig import genus_from_copies

ANGLE_MATCH_TOL = 2e-3
SNAP_FRACTION = 1e-6
WORD_BUDGET = 64
KEY_DIGITS = 6
FAMILIES = ("cube", "balloon", "pk", "rosenberg")


@dataclass(frozen=True)
class TilingSpec:
    family: str
    k: int | None = None
    d: int | None = None
    mode: str = "single"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputDomainError(f"unknown family {self.family!r}")
        if self.family == "balloon" and (self.k is None or self.k < 1):
            raise InputDomainError("balloon family needs k >= 1")
        if self.family == "pk" and (self.k is None or self.k < 3):
            raise InputDomainError("pk family needs k >= 3")
        if self.family == "rosenberg":
            if self.d is None or self.d < 2:
                raise InputDomainError("rosenberg family needs d >= 2")
            if self.mode not in ("single", "double"):
                raise InputDomainError("rosenberg mode is 'single' or 'double'")

    @property
    def angles(self):
        """Prism angles (alpha, beta, gamma) of the conjugate families."""
        if self.family == "cube":
            return (math.pi / 3, math.pi / 3, math.pi / 2)
        if self.family == "balloon":
            return (math.pi / 2, math.pi / 2, math.pi / self.k)
        if self.family == "pk":
            return (math.pi / self.k, math.pi / 2, math.pi / 2)
        raise InputDomainError("the rosenberg family has no prism")

    @property
    def gamma(self):
        if self.family == "rosenberg":
            return math.pi / self.d
        return self.angles[2]

    @property
    def copies(self) -> int:
        if self.family == "cube":
            return 48
        if self.family in ("balloon", "pk"):
            return 8 * self.k
        return (8 if self.mode == "single" else 16) * self.d

    @property
    def expected_chi(self) -> int:
        if self.family == "rosenberg":
            return (2 if self.mode == "single" else 4) * (1 - self.d)
        return 2 - 2 * genus_from_copies(self.copies, self.gamma)

    @property
    def orientable(self) -> bool:
        return not (self.family == "rosenberg" and self.mode == "single")


@dataclass
class AssembledSurface:
    mesh: SurfaceMesh
    r: float
    copies: int
    generator_log: list = field(default_factory=list)
    spec: TilingSpec | None = None
    seam_gap: float = 0.0
    snap_displacement: float = 0.0
    copy_of_face: np.ndarray | None = None

    @property
    def period(self):
        return 2 * math.pi * self.r

    @property
    def quotient_circumference(self):
        return self.period


# ---------------------------------------------------------------- group orbits


def _key(g: Isometry, period: float):
    shift = g.shift % period
    if period - shift < 10.0 ** (-KEY_DIGITS):
        shift = 0.0
    return (tuple(np.round(g.matrix, KEY_DIGITS).ravel() + 0.0), int(g.sign), round(shift, KEY_DIGITS))


def orbit(generators, period: float, budget: int = WORD_BUDGET, limit: int = 100000):
    """Breadth-first closure of the group generated by ``generators`` modulo the period.

    Returns the list of distinct elements, identity first.  Raises when new
    elements still appear after ``budget`` generations.
    """
    ident = Isometry.identity()
    seen = {_key(ident, period): ident}
    frontier = [ident]
    for _ in range(budget):
        new = []
        for g in frontier:
            for s in generators:
                h = s @ g
                key = _key(h, period)
                if key not in seen:
                    h = Isometry("composite", h.matrix, h.sign, h.shift % period)
                    seen[key] = h
                    new.append(h)
        if not new:
            return list(seen.values())
        if len(seen) > limit:
            break
        frontier = new
    raise AssemblyError(f"orbit did not close within {budget} generations ({len(seen)} elements)")


def _quotient_coords(points, heights, period):
    R = period / (2 * math.pi)
    ang = 2 * math.pi * np.asarray(heights) / period
    return np.column_stack([points, R * np.cos(ang), R * np.sin(ang)])


def _circular_mean(h, period):
    ang = 2 * math.pi * np.asarray(h) / period
    m = math.atan2(np.sin(ang).mean(), np.cos(ang).mean())
    return (m * period / (2 * math.pi)) % period


def sew_copies(piece_points, piece_heights, piece_faces, elements, period, snap_tol):
    """Apply every element to the piece and identify coincident vertices.

    Orientation-reversing elements have their faces rewound so the copies carry
    a consistent normal field wherever the result is orientable.  Returns
    (mesh, worst seam gap, per-face copy index).
    """
    nv = len(piece_points)
    P_all, H_all, F_all, owner = [], [], [], []
    for i, g in enumerate(elements):
        P, H = g.apply(piece_points, piece_heights)
        F = piece_faces + i * nv
        if not g.preserves_orientation:
            F = F[:, [0, 2, 1]]
        P_all.append(P)
        H_all.append(H % period)
        F_all.append(F)
        owner.append(np.full(len(F), i))
    P = np.vstack(P_all)
    H = np.concatenate(H_all)
    F = np.vstack(F_all)
    owner = np.concatenate(owner)

    X = _quotient_coords(P, H, period)
    tree = cKDTree(X)
    pairs = tree.query_pairs(snap_tol, output_type="ndarray")
    ds = DisjointSet(range(len(P)))
    for a, b in pairs:
        ds.merge(int(a), int(b))
    roots = np.array([ds[i] for i in range(len(P))])
    uniq, inv = np.unique(roots, return_inverse=True)
    gap = 0.0
    newP = np.zeros((len(uniq), 3))
    newH = np.zeros(len(uniq))
    order = np.argsort(inv, kind="stable")
    bounds = np.searchsorted(inv[order], np.arange(len(uniq) + 1))
    for c in range(len(uniq)):
        members = order[bounds[c]:bounds[c + 1]]
        if len(members) == 1:
            newP[c], newH[c] = P[members[0]], H[members[0]]
            continue
        # orbit average once, then back onto the manifold
        p = P[members].mean(axis=0)
        newP[c] = p / np.linalg.norm(p)
        newH[c] = _circular_mean(H[members], period)
        spread = np.linalg.norm(X[members] - X[members].mean(axis=0), axis=1).max()
        gap = max(gap, float(spread))
    F = inv[F]
    keep = (F[:, 0] != F[:, 1]) & (F[:, 1] != F[:, 2]) & (F[:, 0] != F[:, 2])
    F, owner = F[keep], owner[keep]
    srt = np.sort(F, axis=1)
    _, first = np.unique(srt, axis=0, return_index=True)
    if len(first) != len(F):
        raise AssemblyError(f"{len(F) - len(first)} faces covered by more than one copy")
    mesh = SurfaceMesh(newP, newH, F, period=period)
    return mesh, gap, owner


def _boundary_gap(mesh: SurfaceMesh):
    E = mesh.boundary_edges()
    if len(E) == 0:
        return 0.0
    X = _quotient_coords(mesh.points, mesh.heights, mesh.period)
    verts = np.unique(E)
    tree = cKDTree(X[verts])
    d, _ = tree.query(X[verts], k=2)
    return float(d[:, 1].min())


# ---------------------------------------------------------------- conjugate families


def _side_opposite(A, B, C):
    """Spherical side opposite the angle A (polar cosine rule)."""
    return math.acos(max(-1.0, min(1.0, (math.cos(A) + math.cos(B) * math.cos(C)) / (math.sin(B) * math.sin(C)))))


def ideal_triangle(prism: PrismData, angles):
    """Triangle with the family's exact angles, placed on top of the prism base."""
    alpha, beta, gamma = angles
    A, B, C = (np.asarray(prism.vertices[k], dtype=float) for k in "ABC")
    side_CA = _side_opposite(beta, alpha, gamma)
    side_CB = _side_opposite(alpha, beta, gamma)
    toA = A - (A @ C) * C
    toA /= np.linalg.norm(toA)
    sense = math.copysign(1.0, np.dot(C, np.cross(A, B)))
    perp = sense * np.cross(C, toA)
    toB = math.cos(gamma) * toA + math.sin(gamma) * perp
    A2 = math.cos(side_CA) * C + math.sin(side_CA) * toA
    B2 = math.cos(side_CB) * C + math.sin(side_CB) * toB
    return A2, B2, C.copy()


def idealize_piece(piece: SurfaceMesh, prism: PrismData, angles):
    """Map the piece so its prism walls land on the ideal triangle's great circles.

    The linear map sending A, B, C to the ideal vertices takes planes through the
    origin to planes through the origin, so each wall circle goes to the ideal one.
    Wall-tagged vertices are then projected onto their circles and corner 5 onto
    the ideal vertex C; the largest displacement of any vertex is returned.
    """
    A, B, C = (np.asarray(prism.vertices[k], dtype=float) for k in "ABC")
    A2, B2, C2 = ideal_triangle(prism, angles)
    M = np.column_stack([A2, B2, C2]) @ np.linalg.inv(np.column_stack([A, B, C]))
    P = piece.points @ M.T
    P /= np.linalg.norm(P, axis=1)[:, None]
    normals = {
        "wall23": np.cross(A2, B2),
        "wall45": np.cross(B2, C2),
        "wall51": np.cross(C2, A2),
    }
    tags = np.array([t or "" for t in piece.tags])
    for name, n in normals.items():
        n = n / np.linalg.norm(n)
        mask = tags == name
        if name == "wall23":
            mask |= np.isin(tags, ["corner2", "corner3"])
        elif name == "wall45":
            mask |= tags == "corner4"
        else:
            mask |= tags == "corner1"
        Q = P[mask] - np.outer(P[mask] @ n, n)
        Q /= np.linalg.norm(Q, axis=1)[:, None]
        P[mask] = Q
    c5 = tags == "corner5"
    P[c5] = C2
    moved = float(np.linalg.norm(P - piece.points, axis=1).max())
    return P, moved, (A2, B2, C2)


def family_generators(vertices, h: float):
    """Wall reflections of the triangle plus the two slice reflections bounding the slab."""
    A, B, C = vertices
    gens = [Isometry.vertical_plane_reflection(np.cross(p, q)) for p, q in ((A, B), (B, C), (C, A))]
    gens += [Isometry.slice_reflection(0.0), Isometry.slice_reflection(h)]
    return gens


def orbit_assemble(piece: SurfaceMesh, prism: PrismData, spec: TilingSpec, snap_tol: float | None = None) -> AssembledSurface:
    """Compact surface from a conjugate piece by reflections in the prism walls and slices."""
    if spec.family == "rosenberg":
        raise InputDomainError("use rosenberg_assemble for the rosenberg family")
    angles = spec.angles
    got = (prism.alpha, prism.beta, prism.gamma)
    worst = max(abs(x - y) for x, y in zip(got, angles))
    if worst > ANGLE_MATCH_TOL:
        raise InconsistentConfigurationError(
            f"prism angles {tuple(round(v, 6) for v in got)} differ from the {spec.family} family by {worst:.3e}"
        )
    P, moved, verts = idealize_piece(piece, prism, angles)
    h = prism.h
    period = 2 * h
    elements = orbit(family_generators(verts, h), period)
    if len(elements) != spec.copies:
        raise AssemblyError(f"orbit has {len(elements)} elements, the family needs {spec.copies}")
    diam = piece.diameter_estimate()
    tol = SNAP_FRACTION * diam if snap_tol is None else snap_tol
    mesh, gap, owner = sew_copies(P, piece.heights, piece.faces, elements, period, tol)
    if not mesh.is_watertight():
        raise AssemblyError(
            f"assembled mesh has {len(mesh.boundary_edges())} boundary edges", gap=_boundary_gap(mesh)
        )
    return AssembledSurface(mesh, h / math.pi, len(elements), elements, spec, gap, moved, owner)


# ---------------------------------------------------------------- direct reflection family


def rosenberg_generators(sol: PlateauSolution):
    """Half-turns about the five boundary geodesics of the source contour."""
    poly = sol.contour
    h_t = sol.spec.h_tilde
    P1, P4, P5 = (poly.vertex(i).p for i in (1, 4, 5))
    return [
        Isometry.vertical_geodesic_rotation(P1),
        Isometry.horizontal_geodesic_rotation(np.cross(P1, P4), 0.0),
        Isometry.vertical_geodesic_rotation(P4),
        Isometry.horizontal_geodesic_rotation(np.cross(P4, P5), h_t),
        Isometry.horizontal_geodesic_rotation(np.cross(P5, P1), h_t),
    ]


def rosenberg_assemble(sol: PlateauSolution, r_mode: str = "single", snap_tol: float | None = None) -> AssembledSurface:
    """Reflect the source Plateau piece across its boundary geodesics until the orbit closes.

    ``single`` uses the vertical period 2 h~ (r = h~/pi); ``double`` doubles it.
    """
    hinge = sol.spec.hinge
    d = math.pi / hinge.gamma
    if abs(d - round(d)) > 1e-9 or round(d) < 2:
        raise InputDomainError(f"gamma={hinge.gamma} is not pi/d with d >= 2")
    tri = sol.contour.triangle
    if abs(tri.alpha_tilde - math.pi / 2) > 1e-9 or abs(tri.beta_tilde - math.pi / 2) > 1e-9:
        raise InputDomainError("half-turns about the vertical edges tile only when both base angles are pi/2")
    spec = TilingSpec("rosenberg", d=int(round(d)), mode=r_mode)
    h_t = sol.spec.h_tilde
    period = (2.0 if r_mode == "single" else 4.0) * h_t
    elements = orbit(rosenberg_generators(sol), period)
    piece = sol.mesh
    diam = piece.diameter_estimate()
    tol = SNAP_FRACTION * diam if snap_tol is None else snap_tol
    mesh, gap, owner = sew_copies(piece.points, piece.heights, piece.faces, elements, period, tol)
    if not mesh.is_watertight():
        raise AssemblyError(
            f"assembled mesh has {len(mesh.boundary_edges())} boundary edges", gap=_boundary_gap(mesh)
        )
    return AssembledSurface(mesh, period / (2 * math.pi), len(elements), elements, spec, gap, 0.0, owner)


# ---------------------------------------------------------------- checks


def euler_characteristic_of(mesh: SurfaceMesh) -> int:
    E, _ = mesh.edges()
    used = np.unique(mesh.faces)
    return int(len(used) - len(E) + mesh.n_faces)


@dataclass
class GenusReport:
    chi: int
    expected_chi: int | None
    genus: int | None
    formula: str
    match: bool


def genus_consistency(surface: AssembledSurface, gamma: float | None = None) -> GenusReport:
    """Compare V - E + F with the genus the copy count predicts."""
    from .topology import orientability

    mesh = surface.mesh
    if not mesh.is_watertight():
        raise InputDomainError("genus bookkeeping needs a watertight mesh")
    chi = euler_characteristic_of(mesh)
    spec = surface.spec
    if spec is None:
        return GenusReport(chi, None, None, "skipped: no copy count", True)
    orientable = orientability(mesh)
    if spec.family == "rosenberg":
        expected = spec.expected_chi
        genus = 2 - chi if not orientable else 1 - chi // 2
        formula = "chi = 2(1-d)" if spec.mode == "single" else "chi = 4(1-d)"
    else:
        g = genus_from_copies(surface.copies, spec.gamma if gamma is None else gamma)
        expected = 2 - 2 * g
        genus = g
        formula = f"g = 1 + m(pi - gamma)/(4 pi) = {g}"
    match = chi == expected and orientable == spec.orientable
    if not match:
        raise AssemblyError(
            f"{spec.family}: V-E+F = {chi}, expected {expected} ({formula}); orientable={orientable}"
        )
    return GenusReport(chi, expected, genus, formula, match)


def symmetry_defect(surface: AssembledSurface, g: Isometry) -> float:
    """Largest distance from an image vertex to the nearest vertex of the mesh."""
    mesh = surface.mesh
    P, H = g.apply(mesh.points, mesh.heights)
    X = _quotient_coords(mesh.points, mesh.heights, mesh.period)
    Y = _quotient_coords(P, H % mesh.period, mesh.period)
    d, _ = cKDTree(X).query(Y)
    return float(d.max())


def vertical_translation(surface: AssembledSurface, fraction: float = 0.5) -> Isometry:
    return Isometry.vertical_translation(fraction * surface.period)
