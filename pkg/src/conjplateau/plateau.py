"""Minimal vertical graph spanning the pentagon, and its boundary measurements.

The domain triangle is cut into three curvilinear quads, one per corner.  Each
quad is a tensor grid radiating from its corner, which gives two things for
free: geometric grading toward the corners, and at the two bottom corners a
row of coincident base points that become the vertices of the vertical edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .errors import (
    GraphViolationError,
    MeshQualityError,
    NotApplicableError,
    SolverFailure,
)
from .mesh import MIN_FACE_AREA, SurfaceMesh
from .surfaces import ContourSpec, GeodesicPolygon, _merge_points, build_contour, hinge_points

GRADING_RINGS = 4
GRADING_RATIO = 0.5
SAMPLES_PER_EDGE = 8
ROUNDOFF_DECREASE = 1e-12
NEWTON_STEPS = tuple(0.5**i for i in range(11))
STAGNATION_ITERS = 10
ROUNDOFF_GRADIENT = 1e3
FLAT_BASE = 1e-12
FLAT_SMOOTHING = 1e-5


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def level_sizes(level: int):
    """Radial and angular subdivisions for a refinement level."""
    if int(level) != level or level < 1:
        raise ValueError("resolution level must be a positive integer")
    n = 2 ** (int(level) + 1)
    return n, n


# ---------------------------------------------------------------- domain mesh


@dataclass
class DomainMesh:
    points: np.ndarray
    faces: np.ndarray
    tags: list
    fixed: np.ndarray  # bool mask of Dirichlet vertices
    boundary_value: np.ndarray
    index: dict  # named ordered vertex lists
    init: np.ndarray


def _far_polyline(a, mid, b, k):
    s = np.linspace(0.0, 1.0, k + 1)[:, None]
    first = _unit((1 - s) * a + s * mid)
    second = _unit((1 - s[1:]) * mid + s[1:] * b)
    return np.vstack([first, second])


def _xi_rows(n):
    graded = [(1.0 / n) * GRADING_RATIO ** k for k in range(GRADING_RINGS, 0, -1)]
    return np.array([0.0] + graded + [i / n for i in range(1, n + 1)])


def build_domain_mesh(spec: ContourSpec, level: int) -> DomainMesh:
    n, k = level_sizes(level)
    h = spec.h_tilde
    p5, p1, p4 = hinge_points(spec.hinge)
    mc, ma, mb = _unit(p1 + p4), _unit(p5 + p1), _unit(p5 + p4)
    centre = _unit(p1 + p4 + p5)
    xs = _xi_rows(n)
    patches = {
        "Q1": (p1, _far_polyline(mc, centre, ma, k)),
        "Q4": (p4, _far_polyline(mc, centre, mb, k)),
        "Q5": (p5, _far_polyline(ma, centre, mb, k)),
    }
    nrow, ncol = len(xs), 2 * k + 1

    pts, tags, ids = [], [], {}
    for name, (corner, far) in patches.items():
        grid = _unit((1 - xs)[:, None, None] * corner + xs[:, None, None] * far[None, :, :])
        grid[0] = corner
        base = len(pts)
        ids[name] = base + np.arange(nrow * ncol).reshape(nrow, ncol)
        pts.extend(grid.reshape(-1, 3))
        for i in range(nrow):
            for j in range(ncol):
                tags.append(_patch_tag(name, i, j, nrow, ncol))
    pts = np.asarray(pts)

    # merge seams; corner copies of the vertical edges stay distinct
    keep_apart = np.zeros(len(pts), dtype=bool)
    keep_apart[ids["Q1"][0]] = True
    keep_apart[ids["Q4"][0]] = True
    mergeable = np.flatnonzero(~keep_apart)
    rep = np.arange(len(pts))
    uniq, inv = _merge_points(pts[mergeable], 1e-10)
    rep[mergeable] = mergeable[uniq][inv]
    used = np.unique(rep)
    renumber = -np.ones(len(pts), dtype=np.int64)
    renumber[used] = np.arange(len(used))
    new_id = renumber[rep]
    points = pts[used]
    new_tags = [None] * len(used)
    for old in range(len(pts)):
        t = tags[old]
        cur = new_tags[new_id[old]]
        new_tags[new_id[old]] = _merge_tag(cur, t)

    faces = []
    for name, grid_ids in ids.items():
        g = new_id[grid_ids]
        patch_faces = []
        for i in range(nrow - 1):
            for j in range(ncol - 1):
                a, b, c, d = g[i, j], g[i + 1, j], g[i + 1, j + 1], g[i, j + 1]
                if i > 0 and (i + j) % 2:
                    tri = [(a, b, d), (b, c, d)]
                else:
                    tri = [(a, b, c), (a, c, d)]
                patch_faces.extend(f for f in tri if len(set(f)) == 3)
        patch_faces = np.asarray(patch_faces, dtype=np.int64)
        # orient the whole patch so that faces are counterclockwise seen from outside
        probe = g[nrow // 2, k // 2], g[nrow // 2 + 1, k // 2], g[nrow // 2 + 1, k // 2 + 1]
        P = points[list(probe)]
        if np.dot(P[0], np.cross(P[1], P[2])) < 0:
            patch_faces = patch_faces[:, [0, 2, 1]]
        faces.append(patch_faces)
    faces = np.vstack(faces)

    nv = len(points)
    fixed = np.zeros(nv, dtype=bool)
    value = np.zeros(nv)
    for i, t in enumerate(new_tags):
        if t in ("edge23", "corner2", "corner3"):
            fixed[i], value[i] = True, 0.0
        elif t in ("edge45", "edge51", "corner1", "corner4", "corner5"):
            fixed[i], value[i] = True, h

    index = {}
    c1 = new_id[ids["Q1"][0]]  # P1 copies from height 0 (vertex 2) to h (vertex 1)
    c4 = new_id[ids["Q4"][0]]
    index["edge12"] = c1[::-1].copy()  # ordered from vertex 1 down to vertex 2
    index["edge34"] = c4.copy()  # from vertex 3 up to vertex 4
    index["ring12"] = new_id[ids["Q1"][1]]
    index["ring34"] = new_id[ids["Q4"][1]]
    # graded rows around the two vertical edges, row 0 being the copies themselves
    index["rows12"] = new_id[ids["Q1"][: GRADING_RINGS + 2]]
    index["rows34"] = new_id[ids["Q4"][: GRADING_RINGS + 2]]
    index["edge23"] = np.concatenate([new_id[ids["Q1"][:, 0]], new_id[ids["Q4"][::-1, 0]][1:]])
    index["edge45"] = np.concatenate([new_id[ids["Q4"][:, -1]], new_id[ids["Q5"][::-1, -1]][1:]])
    index["edge51"] = np.concatenate([new_id[ids["Q5"][:, 0]], new_id[ids["Q1"][::-1, -1]][1:]])
    # mirror line for symmetric hinges: vertex 5 -> centre -> midpoint of side c
    index["mirror"] = np.concatenate([new_id[ids["Q5"][:, k]], new_id[ids["Q1"][-1, k::-1]][1:]])
    for key in ("edge23", "edge45", "edge51", "mirror"):
        index[key] = _dedupe(index[key])

    init = _initial_heights(points, faces, fixed, value, c1, c4, h)
    return DomainMesh(points, faces, new_tags, fixed, value, index, init)


def _dedupe(seq):
    out = [seq[0]]
    for v in seq[1:]:
        if v != out[-1]:
            out.append(v)
    return np.asarray(out, dtype=np.int64)


def _patch_tag(name, i, j, nrow, ncol):
    last = ncol - 1
    if name == "Q1":
        if i == 0:
            return "corner2" if j == 0 else ("corner1" if j == last else "edge12")
        if j == 0:
            return "edge23"
        if j == last:
            return "edge51"
    elif name == "Q4":
        if i == 0:
            return "corner3" if j == 0 else ("corner4" if j == last else "edge34")
        if j == 0:
            return "edge23"
        if j == last:
            return "edge45"
    else:
        if i == 0:
            return "corner5"
        if j == 0:
            return "edge51"
        if j == last:
            return "edge45"
    return "interior"


_TAG_RANK = {"interior": 0, "edge23": 1, "edge45": 1, "edge51": 1, "edge12": 2, "edge34": 2}


def _merge_tag(cur, new):
    if cur is None:
        return new
    return new if _TAG_RANK.get(new, 3) > _TAG_RANK.get(cur, 3) else cur


def _initial_heights(points, faces, fixed, value, c1, c4, h):
    """Harmonic extension of the boundary data on the mesh graph."""
    u = value.copy()
    for copies in (c1, c4):
        u[copies] = np.linspace(0.0, h, len(copies))
    fixed0 = fixed.copy()
    fixed0[c1] = True
    fixed0[c4] = True
    nv = len(points)
    E = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    W = sp.coo_matrix((np.ones(len(E)), (E[:, 0], E[:, 1])), shape=(nv, nv))
    W = ((W + W.T) > 0).astype(float).tocsr()
    L = sp.diags(np.asarray(W.sum(axis=1)).ravel()) - W
    free = np.flatnonzero(~fixed0)
    if free.size:
        rhs = -L[free][:, np.flatnonzero(fixed0)] @ u[fixed0]
        u[free] = spla.spsolve(L[free][:, free].tocsc(), rhs)
    return u


# ---------------------------------------------------------------- minimiser


@dataclass
class GraphMinimizerInfo:
    iterations: int
    grad_norm: float
    area_history: list = field(default_factory=list)
    roundoff_limited: bool = False


def minimize_graph_area(points, faces, u0, free, tol=1e-10, max_iter=200):
    """Minimise the lifted graph area over the free heights.

    Each iteration tries a backtracked Newton step; when that fails, a
    majorise-minimise step is taken instead (the quadratic upper bound of the
    area, i.e. a lagged-diffusivity solve), which cannot increase the area.
    The area history is therefore non-increasing.

    Faces over a degenerate base (two copies of a corner) have area
    |height difference| times a constant, which has a kink where neighbouring
    copies tie.  Their Gram determinant gets a tiny regulariser so the
    objective stays smooth; the area changes by far less than ``tol``.
    """
    u = np.asarray(u0, dtype=float).copy()
    points = np.asarray(points, dtype=float)
    free = np.asarray(free)
    if free.dtype == bool:
        free = np.flatnonzero(free)
    nv = len(u)
    F = np.asarray(faces, dtype=np.int64)
    rows = np.repeat(F, 3, axis=1).ravel()
    cols = np.tile(F, (1, 3)).ravel()

    d1 = points[F[:, 1]] - points[F[:, 0]]
    d2 = points[F[:, 2]] - points[F[:, 0]]
    n1 = np.einsum("ij,ij->i", d1, d1)
    n2 = np.einsum("ij,ij->i", d2, d2)
    flat = (n1 * n2 - np.einsum("ij,ij->i", d1, d2) ** 2) <= FLAT_BASE * n1 * n2
    smooth = ~flat
    Ff, Fs = F[flat], F[smooth]
    scale = max(float(np.ptp(u)), 1e-3)
    reg = (FLAT_SMOOTHING * scale) ** 2 * (n1 + n2)[flat]

    def derivs(v):
        area, grad, H_s = kernels.graph_area_derivs(points, v, Fs)
        H = np.empty((len(F), 3, 3))
        H[smooth] = H_s
        if len(Ff):
            a_f, g_f, H[flat] = kernels.graph_area_derivs_numpy(points, v, Ff, reg)
            area += a_f
            grad = grad + g_f
        return area, grad, H

    def majorizer(v):
        H = np.empty((len(F), 3, 3))
        H[smooth] = kernels.graph_majorizer_blocks(points, v, Fs)
        if len(Ff):
            H[flat] = kernels.graph_majorizer_blocks_numpy(points, v, Ff, reg)
        return H

    def area_at(v):
        total = float(kernels.face_areas(np.column_stack([points, v]), Fs).sum())
        if len(Ff):
            s1 = v[Ff[:, 1]] - v[Ff[:, 0]]
            s2 = v[Ff[:, 2]] - v[Ff[:, 0]]
            G = (n1[flat] + s1 * s1) * (n2[flat] + s2 * s2) - (np.einsum("ij,ij->i", d1[flat], d2[flat]) + s1 * s2) ** 2
            total += float(0.5 * np.sqrt(np.maximum(G + reg, 0.0)).sum())
        return total

    def solve(blocks, rhs):
        M = sp.csr_matrix((blocks.ravel(), (rows, cols)), shape=(nv, nv))[free][:, free]
        shift = 1e-13 * max(1.0, float(np.abs(M.diagonal()).max()))
        try:
            x = spla.spsolve((M + shift * sp.identity(len(free))).tocsc(), rhs)
        except RuntimeError:  # pragma: no cover - singular factorisation
            return None
        return x if np.all(np.isfinite(x)) else None

    area, grad, H = derivs(u)
    history = [area]
    best, best_it = math.inf, 0
    for it in range(max_iter):
        gf = grad[free]
        gnorm = float(np.max(np.abs(gf))) if gf.size else 0.0
        if gnorm < tol:
            return u, GraphMinimizerInfo(it, gnorm, history)
        if gnorm < 0.5 * best:
            best, best_it = gnorm, it
        elif it - best_it >= STAGNATION_ITERS and best < ROUNDOFF_GRADIENT * tol:
            # the gradient has hit the rounding floor of the face terms
            return u, GraphMinimizerInfo(it, gnorm, history, roundoff_limited=True)
        step = solve(H, -gf)
        accepted = None
        if step is not None and gf @ step < 0:
            predicted = -(gf @ step)
            if predicted < ROUNDOFF_DECREASE * max(1.0, area):
                # decrease below what the area sum can resolve: judge by the gradient
                trial = u.copy()
                trial[free] += step
                a_new, g_new, H_new = derivs(trial)
                if np.max(np.abs(g_new[free])) < gnorm:
                    u, area, grad, H = trial, a_new, g_new, H_new
                    history.append(area)
                    continue
            for t in NEWTON_STEPS:
                trial = u.copy()
                trial[free] += t * step
                a_new = area_at(trial)
                if a_new <= area + 1e-4 * t * (gf @ step):
                    accepted = trial
                    break
        if accepted is None:
            step = solve(majorizer(u), -gf)
            if step is None:
                break
            t = 1.0
            while t > 1e-8:
                trial = u.copy()
                trial[free] += t * step
                a_new = area_at(trial)
                if a_new <= area:
                    accepted = trial
                    break
                t *= 0.5
        if accepted is None:
            break
        u = accepted
        area, grad, H = derivs(u)
        history.append(area)
    gnorm = float(np.max(np.abs(grad[free]))) if len(free) else 0.0
    if gnorm < tol:
        return u, GraphMinimizerInfo(max_iter, gnorm, history)
    if gnorm < ROUNDOFF_GRADIENT * tol:
        return u, GraphMinimizerInfo(max_iter, gnorm, history, roundoff_limited=True)
    raise SolverFailure(f"graph minimisation stalled with gradient {gnorm:.3e}", residual=gnorm)


# ---------------------------------------------------------------- solution


@dataclass(frozen=True)
class BoundaryTrace:
    edge: str
    s: np.ndarray
    nu: np.ndarray
    w: np.ndarray = None
    theta: np.ndarray = None


@dataclass
class PlateauSolution:
    spec: ContourSpec
    contour: GeodesicPolygon
    mesh: SurfaceMesh
    level: int
    index: dict
    residual: float
    iterations: int
    area_history: list
    boundary_traces: dict = field(default_factory=dict)
    fluxes: dict = field(default_factory=dict)

    @property
    def height_fn(self):
        return self.mesh.heights

    @property
    def area(self):
        return self.mesh.area()


def solve_graph(spec: ContourSpec, resolution: int = 3, tol: float = 1e-10, max_iter: int = 200) -> PlateauSolution:
    contour = build_contour(spec)
    dom = build_domain_mesh(spec, resolution)
    free = ~dom.fixed
    u, info = minimize_graph_area(dom.points, dom.faces, dom.init, free, tol=tol, max_iter=max_iter)
    mesh = SurfaceMesh(dom.points, u, dom.faces, tags=list(dom.tags))
    areas = mesh.face_areas()
    if areas.min() <= MIN_FACE_AREA:
        raise MeshQualityError(f"degenerate face after solve (area {areas.min():.3e})")
    mesh = mesh.with_normals()
    interior = np.array([t == "interior" for t in mesh.tags])
    if np.any(mesh.nu[interior] <= 0):
        bad = int(np.sum(mesh.nu[interior] <= 0))
        raise GraphViolationError(f"{bad} interior vertices with non-positive angle function")
    sol = PlateauSolution(spec, contour, mesh, resolution, dom.index, info.grad_norm, info.iterations, info.area_history)
    _attach_traces(sol)
    return sol


# ---------------------------------------------------------------- residuals


def mean_curvature_residual(mesh: SurfaceMesh) -> np.ndarray:
    """Per-vertex norm of the tangential area gradient over a third of the incident area."""
    A = mesh.face_areas()
    if A.size and A.min() <= MIN_FACE_AREA:
        raise MeshQualityError(f"degenerate face (area {A.min():.3e})")
    _, g = mesh.area_gradient()
    P = mesh.points
    horiz = g[:, :3] - np.einsum("ij,ij->i", g[:, :3], P)[:, None] * P
    norm = np.sqrt(np.einsum("ij,ij->i", horiz, horiz) + g[:, 3] ** 2)
    return norm / mesh.vertex_areas()


def residual_rms(mesh: SurfaceMesh, mask=None) -> float:
    r = mean_curvature_residual(mesh)
    if mask is not None:
        r = r[mask]
    return float(np.sqrt(np.mean(r * r)))


# ---------------------------------------------------------------- measurements


def _frame_at(p, toward):
    """Orthonormal horizontal frame (P, Q) at base point p, P pointing along the geodesic to ``toward``."""
    d = toward - (toward @ p) * p
    P = d / np.linalg.norm(d)
    return P, np.cross(p, P)


def _strip_thetas(sol: PlateauSolution, edge: str):
    """Raw (height, angle) samples of the horizontal normal along a vertical edge."""
    mesh = sol.mesh
    copies = sol.index[edge]
    if edge == "edge12":
        copies = copies[::-1]  # increasing height
        p, other = sol.contour.vertex(2).p, sol.contour.vertex(3).p
    else:
        p, other = sol.contour.vertex(3).p, sol.contour.vertex(2).p
    Pf, Qf = _frame_at(p, other)
    cset = {int(c): k for k, c in enumerate(copies)}
    s, th = [], []
    F = mesh.faces
    normals = [mesh.face_normals_at(c) for c in range(3)]
    for f, tri in enumerate(F):
        inside = [cset.get(int(v)) for v in tri]
        hits = [x for x in inside if x is not None]
        if len(hits) != 2:
            continue
        lo, hi = sorted(hits)
        if hi != lo + 1:
            continue
        slot = [x is not None for x in inside].index(True)
        N = normals[slot][f]
        horiz = N[:3] - (N[:3] @ p) * p
        if np.linalg.norm(horiz) < 1e-12:
            continue
        # the face is vertical, so its normal is normal to the ray through the
        # third vertex; the surface reaches that ray at the third vertex's height
        third = tri[[x is None for x in inside].index(True)]
        height = mesh.heights[third]
        if not 0.0 < height < sol.spec.h_tilde:
            continue
        s.append(height)
        th.append(math.atan2(horiz @ Qf, horiz @ Pf))
    order = np.argsort(s)
    s = np.asarray(s)[order]
    th = np.unwrap(np.asarray(th)[order])
    return s, th, (Pf, Qf, p)


def _contour_end_thetas(sol, edge, frame, first_theta, last_theta):
    """Exact angles of the horizontal normal at the two ends of a vertical edge."""
    Pf, Qf, p = frame
    c = sol.contour
    if edge == "edge12":
        bottom_dir, top_dir = c.vertex(3).p, c.vertex(5).p
    else:
        bottom_dir, top_dir = c.vertex(2).p, c.vertex(5).p
    out = []
    for target, ref in ((bottom_dir, first_theta), (top_dir, last_theta)):
        d = target - (target @ p) * p
        n = np.cross(p, d / np.linalg.norm(d))
        ang = math.atan2(n @ Qf, n @ Pf)
        cands = [ang + m * math.pi for m in range(-4, 5)]  # normal is defined up to sign
        out.append(min(cands, key=lambda a: abs(a - ref)))
    return out


def measure_normal_rotation(sol: PlateauSolution, edge: str):
    """Angle of the horizontal normal along a vertical edge.

    Returns ``(s, theta, delta)`` where ``s`` runs along the edge from the
    bottom vertex, ``theta`` is unwrapped and ``delta = theta[-1] - theta[0]``.
    Interior samples come from the faces adjacent to the edge; the end values
    are the tangent planes spanned by the two boundary edges meeting there.
    """
    edge = _edge_key(edge)
    if edge not in ("edge12", "edge34"):
        raise NotApplicableError(f"{edge} is not a vertical edge")
    s, th, frame = _strip_thetas(sol, edge)
    if len(s) < 2:
        raise MeshQualityError("too few samples along the vertical edge")
    t0, t1 = _contour_end_thetas(sol, edge, frame, th[0], th[-1])
    s_all = np.concatenate([[0.0], s, [sol.spec.h_tilde]])
    th_all = np.concatenate([[t0], th, [t1]])
    return s_all, th_all, float(th_all[-1] - th_all[0])


def measure_normal_rotation_mesh_only(sol: PlateauSolution, edge: str) -> float:
    """Total rotation using mesh samples only, extrapolated linearly to the edge ends."""
    edge = _edge_key(edge)
    s, th, _ = _strip_thetas(sol, edge)
    h = sol.spec.h_tilde
    lo = th[0] + (th[1] - th[0]) * (0.0 - s[0]) / (s[1] - s[0])
    hi = th[-1] + (th[-1] - th[-2]) * (h - s[-1]) / (s[-1] - s[-2])
    return float(hi - lo)


def _edge_key(edge):
    e = str(edge)
    return e if e.startswith("edge") else f"edge{e}"


def measure_symmetry_curve(sol: PlateauSolution) -> float:
    if not sol.spec.symmetric:
        raise NotApplicableError("symmetry curve needs a_tilde == b_tilde")
    idx = sol.index["mirror"]
    P = sol.mesh.points[idx]
    u = sol.mesh.heights[idx]
    d = np.arctan2(np.linalg.norm(np.cross(P[1:], P[:-1]), axis=1), np.einsum("ij,ij->i", P[1:], P[:-1]))
    return float(np.sum(np.hypot(d, np.diff(u))))


def _arc_positions(P):
    d = np.arctan2(np.linalg.norm(np.cross(P[1:], P[:-1]), axis=1), np.einsum("ij,ij->i", P[1:], P[:-1]))
    return np.concatenate([[0.0], np.cumsum(d)])


def _attach_traces(sol: PlateauSolution):
    mesh = sol.mesh
    _, g = mesh.area_gradient()
    centre = _unit(sum(sol.contour.vertex(i).p for i in (1, 3, 5)))
    vertical_flux = -g[:, 3]
    fluxes = {}
    for edge in ("edge23", "edge45", "edge51"):
        idx = sol.index[edge]
        P = mesh.points[idx]
        s = _arc_positions(P)
        nu = np.empty(len(idx))
        w = np.empty(len(idx))
        for k in range(1, len(idx) - 1):
            p = P[k]
            t = P[k + 1] - P[k - 1]
            t -= (t @ p) * p
            t /= np.linalg.norm(t)
            n_in = np.cross(p, t)
            if n_in @ (centre - p) < 0:
                n_in = -n_in
            dual = 0.5 * (s[k + 1] - s[k - 1])
            nu[k] = -(g[idx[k], :3] @ n_in) / dual
            w[k] = vertical_flux[idx[k]] / dual
        # exact end values: the surface is vertical at the bottom corners, horizontal at vertex 5
        for end, lab in ((0, edge[4]), (-1, edge[5])):
            if lab == "5":
                nu[end], w[end] = 1.0, 0.0
            else:
                nbr = w[1] if end == 0 else w[-2]
                nu[end], w[end] = 0.0, math.copysign(1.0, nbr)
                # samples next to a vertical-edge corner see the corner's singular
                # faces; interpolate them from the exact end value up to the first
                # sample past the neighbour that is positive
                step = 1 if end == 0 else -1
                k2 = 2 * step
                while abs(k2) < len(s) // 2 and nu[k2] <= 0:
                    k2 += step
                for k in range(step, k2, step):
                    frac = abs(s[k] - s[end]) / abs(s[k2] - s[end])
                    nu[k] = frac * nu[k2]
                    w[k] = w[end] + frac * (w[k2] - w[end])
        # the one-sided estimate next to a singular corner can leave the valid range
        nu = np.clip(nu, 0.0, 1.0)
        w = np.clip(w, -1.0, 1.0)
        sol.boundary_traces[edge[4:]] = BoundaryTrace(edge[4:], s, nu, w=w)
        flux = float(np.sum(vertical_flux[idx]))
        fluxes[edge[4:]] = flux
    # vertex 5 is shared by two edges: split its flux evenly
    i5 = sol.index["edge45"][-1]
    fluxes["45"] -= 0.5 * vertical_flux[i5]
    fluxes["51"] -= 0.5 * vertical_flux[i5]
    sol.fluxes = fluxes
    for edge in ("edge12", "edge34"):
        s, th, _ = measure_normal_rotation(sol, edge)
        sol.boundary_traces[edge[4:]] = BoundaryTrace(edge[4:], s, np.zeros_like(s), theta=th)


def boundary_trace(sol: PlateauSolution, edge) -> BoundaryTrace:
    key = _edge_key(edge)[4:]
    if key in ("12", "34"):
        raise NotApplicableError(f"edge {key} is vertical; use measure_normal_rotation")
    if key not in sol.boundary_traces:
        raise NotApplicableError(f"unknown edge {edge}")
    return sol.boundary_traces[key]


def trace_integrals(trace: BoundaryTrace):
    """(integral of nu, integral of w) by the trapezoid rule."""
    return float(np.trapezoid(trace.nu, trace.s)), float(np.trapezoid(trace.w, trace.s))
