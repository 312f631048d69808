"""Topological predicates on meshes in S^2 x S^1(r).

Euler characteristic, orientability, fiber-crossing parity, the index audit of
the tangent part of the vertical field, surface intersection and the
antipodal/half-period companions of contained geodesics.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from .errors import AuditError, IndeterminateError, InputDomainError, NotApplicableError
from .mesh import SurfaceMesh

ZERO_THRESHOLD = 1e-3  # 1 - nu^2 below this marks a candidate zero of T
CLUSTER_HOPS = 3
RING_GROWTH = 4
FIBER_SAMPLES = 64
EDGE_MARGIN = 1e-9
TANGENT_NU = 1e-6
RESAMPLE_BUDGET = 20
GEODESIC_TOL = 1e-7


def _mesh_of(obj) -> SurfaceMesh:
    return obj.mesh if hasattr(obj, "mesh") and isinstance(obj.mesh, SurfaceMesh) else obj


# ---------------------------------------------------------------- combinatorics


def _edge_pairs(faces):
    """Face pairs across every interior edge with a flag telling whether they disagree in winding."""
    F = np.asarray(faces)
    a = F.reshape(-1)
    b = F[:, [1, 2, 0]].reshape(-1)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    fwd = a < b
    face = np.repeat(np.arange(len(F)), 3)
    order = np.lexsort((hi, lo))
    lo, hi, fwd, face = lo[order], hi[order], fwd[order], face[order]
    new = np.ones(len(lo), dtype=bool)
    new[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
    starts = np.flatnonzero(new)
    counts = np.diff(np.append(starts, len(lo)))
    if np.any(counts > 2):
        raise InputDomainError(f"{int(np.sum(counts > 2))} edges are shared by more than two faces")
    s = starts[counts == 2]
    return face[s], face[s + 1], fwd[s] == fwd[s + 1]


def euler_characteristic(mesh) -> int:
    """V - E + F over the vertices actually used by faces."""
    mesh = _mesh_of(mesh)
    _edge_pairs(mesh.faces)  # rejects non-manifold edges
    E, _ = mesh.edges()
    V = len(np.unique(mesh.faces))
    return int(V - len(E) + mesh.n_faces)


@dataclass
class OrientationResult:
    orientable: bool
    faces: np.ndarray  # rewound faces, consistent wherever possible
    component: np.ndarray  # component label per face
    component_orientable: list


def orient(mesh) -> OrientationResult:
    """Propagate a face orientation across edges, one component at a time."""
    mesh = _mesh_of(mesh)
    F = mesh.faces
    f, g, flip = _edge_pairs(F)
    n = len(F)
    G = coo_matrix((flip.astype(np.int8) + 1, (f, g)), shape=(n, n)).tocsr()
    G = G + G.T
    ncomp, labels = connected_components(G, directed=False)
    o = np.zeros(n, dtype=np.int8)
    for c in range(ncomp):
        root = int(np.flatnonzero(labels == c)[0])
        order, pred = breadth_first_order(G, root, directed=False, return_predecessors=True)
        kids = order[1:]
        par = pred[kids]
        w = np.asarray(G[par, kids]).ravel() - 1
        for child, parent, ww in zip(kids.tolist(), par.tolist(), w.tolist()):
            o[child] = o[parent] ^ ww
    bad = (o[f] ^ o[g]) != flip.astype(np.int8)
    comp_ok = [not bool(np.any(bad & (labels[f] == c))) for c in range(ncomp)]
    out = F.copy()
    out[o == 1] = out[o == 1][:, [0, 2, 1]]
    return OrientationResult(all(comp_ok), out, labels, comp_ok)


def orientability(mesh):
    """True iff face orientations propagate without contradiction.

    For a disconnected mesh whose components disagree, the list of
    per-component results is returned instead of a single boolean.
    """
    res = orient(mesh)
    if len(set(res.component_orientable)) > 1:
        return list(res.component_orientable)
    return res.orientable


def genus_of(chi: int, orientable: bool) -> int:
    return 1 - chi // 2 if orientable else 2 - chi


# ---------------------------------------------------------------- normals and T


def _face_normals(mesh: SurfaceMesh):
    """Unit normals of every face at each of its corners, (F, 3, 4), sign as wound."""
    return np.stack([mesh.face_normals_at(k) for k in range(3)], axis=1)


def vertex_line_normals(mesh) -> np.ndarray:
    """Per-vertex unit normal up to sign (dominant axis of the area-weighted normal tensor)."""
    mesh = _mesh_of(mesh)
    A = mesh.face_areas()
    Nf = _face_normals(mesh)
    S = np.zeros((mesh.n_vertices, 4, 4))
    for k in range(3):
        n = Nf[:, k]
        np.add.at(S, mesh.faces[:, k], A[:, None, None] * n[:, :, None] * n[:, None, :])
    w, V = np.linalg.eigh(S)
    return V[:, :, -1]


def tangent_vertical_part(mesh, normals=None):
    """T = xi - nu N at every vertex, (n, 4), and nu^2; independent of the sign of N."""
    mesh = _mesh_of(mesh)
    N = vertex_line_normals(mesh) if normals is None else np.asarray(normals, dtype=float)
    nu = N[:, 3]
    T = -nu[:, None] * N
    T[:, 3] += 1.0
    return T, nu ** 2


def _wrap(a):
    return (a + np.pi) % (2 * np.pi) - np.pi


def _winding(angles, axis=-1):
    steps = _wrap(np.diff(angles, axis=axis, append=np.take(angles, [0], axis=axis)))
    return steps.sum(axis=axis) / (2 * np.pi), np.abs(steps).max(axis=axis)


def face_windings(mesh, T):
    """Winding number of T around each face, measured in the face's own frame."""
    X = mesh.face_coords()
    p = X[:, 0, :3]
    P = np.zeros((len(X), 4))
    P[:, :3] = p
    e1 = X[:, 1] - X[:, 0]
    e2 = X[:, 2] - X[:, 0]
    e1 -= np.einsum("ij,ij->i", e1, P)[:, None] * P
    e2 -= np.einsum("ij,ij->i", e2, P)[:, None] * P
    e1 /= np.linalg.norm(e1, axis=1)[:, None]
    e2 -= np.einsum("ij,ij->i", e2, e1)[:, None] * e1
    e2 /= np.linalg.norm(e2, axis=1)[:, None]
    Tf = T[mesh.faces]  # (F, 3, 4)
    ang = np.arctan2(np.einsum("fkj,fj->fk", Tf, e2), np.einsum("fkj,fj->fk", Tf, e1))
    w, _ = _winding(ang)
    return np.rint(w).astype(int)


@dataclass
class PoincareHopfAudit:
    zeros: list  # (vertex, index)
    indices: list
    sum: int
    uncaptured: int  # winding carried by faces outside every zero site
    spurious: list = field(default_factory=list)  # candidate clusters with index 0

    @property
    def count(self):
        return len(self.zeros)


def _neighbors(mesh):
    E, _ = mesh.edges()
    n = mesh.n_vertices
    A = coo_matrix((np.ones(2 * len(E)), (np.r_[E[:, 0], E[:, 1]], np.r_[E[:, 1], E[:, 0]])), shape=(n, n))
    return A.tocsr()


def _grow(adj, verts, hops):
    cur = np.zeros(adj.shape[0], dtype=bool)
    cur[verts] = True
    for _ in range(hops):
        cur = cur | (adj @ cur.astype(np.int8) > 0)
    return cur


def _cluster(adj, cand):
    """Group candidate vertices lying within CLUSTER_HOPS edges of each other."""
    if len(cand) == 0:
        return []
    n = adj.shape[0]
    M = coo_matrix((np.ones(len(cand)), (cand, np.arange(len(cand)))), shape=(n, len(cand))).tocsr()
    reach = M
    for _ in range(CLUSTER_HOPS):
        reach = reach + adj @ reach
    sub = reach[cand]
    _, lab = connected_components(sub, directed=False)
    return [cand[lab == c] for c in range(lab.max() + 1)]


def _boundary_loops(faces):
    """Directed boundary loops of a consistently wound face set (None if not a union of simple loops)."""
    a = faces.reshape(-1).tolist()
    b = faces[:, [1, 2, 0]].reshape(-1).tolist()
    half = set(zip(a, b))
    nxt = {}
    for u, v in half:
        if (v, u) not in half:
            if u in nxt:
                return None
            nxt[u] = v
    loops = []
    while nxt:
        start, v = nxt.popitem()
        loop = [start]
        while v != start:
            loop.append(v)
            v = nxt.pop(v, None)
            if v is None:
                return None
        loops.append(loop)
    return loops


def _site_index(mesh, adj, vf, members, T, nu2):
    """Index of T at a cluster of near-zeros, from the winding around a surrounding ring.

    Positions and T are both read in one horizontal frame at the site, so the
    ring's own turning number fixes the sign and no global orientation is used.
    """
    site = int(members[np.argmax(nu2[members])])
    P0 = mesh.points[site]
    f1 = np.cross(P0, [1.0, 0.0, 0.0] if abs(P0[0]) < 0.9 else [0.0, 1.0, 0.0])
    f1 /= np.linalg.norm(f1)
    f2 = np.cross(P0, f1)
    region = np.zeros(mesh.n_vertices, dtype=bool)
    region[members] = True
    for _ in range(RING_GROWTH):
        fids = np.unique(np.concatenate([vf[v] for v in np.flatnonzero(region)]))
        sub = SurfaceMesh(mesh.points, mesh.heights, mesh.faces[fids], period=mesh.period)
        res = orient(sub)
        loops = _boundary_loops(res.faces) if res.orientable else None
        if loops is not None and len(loops) == 1:
            ring = np.asarray(loops[0])
            X = mesh.points[ring]
            pos = np.arctan2(X @ f2, X @ f1)
            Th = T[ring, :3]
            vec = np.arctan2(Th @ f2, Th @ f1)
            wp, sp = _winding(pos)
            wt, st = _winding(vec)
            wp, wt = int(round(wp)), int(round(wt))
            if wp != 0 and st < 0.75 * np.pi and np.all(nu2[ring] < 1 - ZERO_THRESHOLD):
                return site, wt * wp, fids
        region = _grow(adj, np.flatnonzero(region), 1)
    raise AuditError(f"no clean ring around the zero site at vertex {site}; refine the mesh")


def poincare_hopf_audit(mesh, normals=None) -> PoincareHopfAudit:
    """Zeros of T = xi - nu N, their indices and the index sum.

    T does not depend on the sign of N, so non-orientable meshes are audited
    directly.  Faces outside all zero sites contribute their own windings to
    ``uncaptured``; a nonzero value means a zero escaped the threshold.
    """
    mesh = _mesh_of(mesh)
    T, nu2 = tangent_vertical_part(mesh, normals)
    cand = np.flatnonzero(1.0 - nu2 < ZERO_THRESHOLD)
    used = np.unique(mesh.faces)
    if len(cand) > 0.5 * len(used):
        raise NotApplicableError("T vanishes on most of the mesh (a slice); the audit is degenerate")
    adj = _neighbors(mesh)
    vf = mesh.vertex_faces()
    zeros, spurious = [], []
    covered = np.zeros(mesh.n_faces, dtype=bool)
    for members in _cluster(adj, cand):
        site, idx, fids = _site_index(mesh, adj, vf, members, T, nu2)
        covered[fids] = True
        (zeros if idx != 0 else spurious).append((site, idx))
    rest = ~covered
    uncaptured = 0
    if rest.any():
        sub = SurfaceMesh(mesh.points, mesh.heights, mesh.faces[rest], period=mesh.period)
        uncaptured = int(face_windings(sub, T).sum())
    indices = [i for _, i in zeros]
    return PoincareHopfAudit(zeros, indices, int(sum(indices)), uncaptured, spurious)


# ---------------------------------------------------------------- fibers


def fibonacci_sphere(n: int, seed: int = 0) -> np.ndarray:
    """n nearly uniform points on S^2, randomly rotated."""
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    phi = math.pi * (3 - math.sqrt(5)) * i
    s = np.sqrt(1 - z * z)
    P = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    return P @ Rotation.random(random_state=seed).as_matrix().T


def _fiber_crossings(mesh, p, crosses, face_nu):
    """Number of faces whose base triangle contains p, or None when the count is unreliable."""
    A, B, C = (mesh.points[mesh.faces[:, k]] for k in range(3))
    s = crosses @ p  # (F, 3) sines of distances to the edge circles (scaled)
    front = (A + B + C) @ p > 0
    scale = np.linalg.norm(crosses, axis=2)
    scale[scale == 0] = 1.0
    sn = s / scale
    inside = front & (np.all(sn > 0, axis=1) | np.all(sn < 0, axis=1))
    near = front & (np.all(sn > -EDGE_MARGIN, axis=1) | np.all(sn < EDGE_MARGIN, axis=1))
    if np.any(near & ~inside):
        return None
    if np.any(inside & (face_nu < TANGENT_NU)):
        return None
    return int(inside.sum())


def separation_parity(mesh, fiber_samples: int = FIBER_SAMPLES, seed: int = 0, return_counts: bool = False):
    """True iff every sampled fiber loop {p} x S^1(r) crosses the surface an even number of times."""
    mesh = _mesh_of(mesh)
    if mesh.period is None:
        raise InputDomainError("fiber loops need a mesh in the quotient (period set)")
    P = mesh.points[mesh.faces]
    crosses = np.stack(
        [np.cross(P[:, 0], P[:, 1]), np.cross(P[:, 1], P[:, 2]), np.cross(P[:, 2], P[:, 0])], axis=1
    )
    face_nu = np.abs(mesh.face_normals_at(0)[:, 3])
    rng = np.random.default_rng(seed)
    counts = []
    for p in fibonacci_sphere(fiber_samples, seed):
        for _ in range(RESAMPLE_BUDGET):
            c = _fiber_crossings(mesh, p, crosses, face_nu)
            if c is not None:
                counts.append(c)
                break
            p = p + 1e-3 * rng.standard_normal(3)
            p /= np.linalg.norm(p)
        else:
            raise IndeterminateError("fiber sampling kept hitting edges or tangential faces")
    even = all(c % 2 == 0 for c in counts)
    return (even, counts) if return_counts else even


def is_slice_like(mesh) -> bool:
    """True when every face is horizontal."""
    mesh = _mesh_of(mesh)
    return bool(np.all(np.abs(mesh.face_normals_at(0)[:, 3]) > 1 - 1e-9))


# ---------------------------------------------------------------- intersections


def _quotient(points, heights, period):
    if period is None:
        return np.column_stack([points, heights])
    R = period / (2 * math.pi)
    ang = heights * (2 * math.pi / period)
    return np.column_stack([points, R * np.cos(ang), R * np.sin(ang)])


def _face_balls(mesh):
    X = _quotient(mesh.points, mesh.heights, mesh.period)
    F = X[mesh.faces]
    c = F.mean(axis=1)
    rad = np.linalg.norm(F - c[:, None], axis=2).max(axis=1)
    return c, rad


def _chart(mesh, fids, center, t0, frame):
    """Gnomonic coordinates around ``center`` with heights unwrapped near t0, (k, 3, 3)."""
    P = mesh.points[mesh.faces[fids]]
    H = mesh.heights[mesh.faces[fids]]
    f1, f2 = frame
    den = np.einsum("fkj,fj->fk", P, center)
    g1 = np.einsum("fkj,fj->fk", P, f1) / den
    g2 = np.einsum("fkj,fj->fk", P, f2) / den
    dt = H - t0[:, None]
    if mesh.period is not None:
        dt = (dt + 0.5 * mesh.period) % mesh.period - 0.5 * mesh.period
    return np.stack([g1, g2, dt], axis=-1)


def _segments_hit(S0, S1, T, eps=1e-12):
    """Moller-Trumbore: does segment S0->S1 meet triangle T?  Vectorised over the leading axis."""
    d = S1 - S0
    e1 = T[:, 1] - T[:, 0]
    e2 = T[:, 2] - T[:, 0]
    h = np.cross(d, e2)
    a = np.einsum("ij,ij->i", e1, h)
    ok = np.abs(a) > eps
    a = np.where(ok, a, 1.0)
    s = S0 - T[:, 0]
    u = np.einsum("ij,ij->i", s, h) / a
    q = np.cross(s, e1)
    v = np.einsum("ij,ij->i", d, q) / a
    w = np.einsum("ij,ij->i", e2, q) / a
    return ok & (u >= -eps) & (v >= -eps) & (u + v <= 1 + eps) & (w >= -eps) & (w <= 1 + eps)


def _triangles_meet(TA, TB):
    hit = np.zeros(len(TA), dtype=bool)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        hit |= _segments_hit(TA[:, i], TA[:, j], TB)
        hit |= _segments_hit(TB[:, i], TB[:, j], TA)
    return hit


def intersection_check(a, b, chunk: int = 4096) -> bool:
    """True iff some triangle of ``a`` meets some triangle of ``b``."""
    a, b = _mesh_of(a), _mesh_of(b)
    pa, pb = a.period, b.period
    if (pa is None) != (pb is None) or (pa is not None and abs(pa - pb) > 1e-9 * max(pa, pb)):
        raise InputDomainError("meshes live in different quotients")
    ca, ra = _face_balls(a)
    cb, rb = _face_balls(b)
    tree = cKDTree(cb)
    rmax = rb.max()
    ta = a.heights[a.faces].mean(axis=1)
    if pa is not None:
        ang = 2 * math.pi * a.heights[a.faces] / pa
        ta = np.mod(np.arctan2(np.sin(ang).mean(1), np.cos(ang).mean(1)) * pa / (2 * math.pi), pa)
    for s in range(0, a.n_faces, chunk):
        idx = np.arange(s, min(s + chunk, a.n_faces))
        lists = tree.query_ball_point(ca[idx], ra[idx] + rmax)
        fa = np.repeat(idx, [len(x) for x in lists])
        if len(fa) == 0:
            continue
        fb = np.concatenate([np.asarray(x, dtype=int) for x in lists])
        close = np.linalg.norm(ca[fa] - cb[fb], axis=1) <= ra[fa] + rb[fb]
        fa, fb = fa[close], fb[close]
        if len(fa) == 0:
            continue
        center = a.points[a.faces[fa]].sum(axis=1)
        center /= np.linalg.norm(center, axis=1)[:, None]
        ref = np.where(np.abs(center[:, :1]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
        f1 = np.cross(center, ref)
        f1 /= np.linalg.norm(f1, axis=1)[:, None]
        f2 = np.cross(center, f1)
        TA = _chart(a, fa, center, ta[fa], (f1, f2))
        TB = _chart(b, fb, center, ta[fa], (f1, f2))
        if np.any(_triangles_meet(TA, TB)):
            return True
    return False


# ---------------------------------------------------------------- contained geodesics


@dataclass
class CompanionReport:
    fibers: list  # base points of detected vertical fibers
    circles: list  # (plane normal, height) of detected horizontal great circles
    missing_fibers: list
    missing_circles: list
    circles_checked: bool
    passed: bool


def _vertical_fibers(mesh, tol):
    E, _ = mesh.edges()
    p, q = mesh.points[E[:, 0]], mesh.points[E[:, 1]]
    vert = np.linalg.norm(p - q, axis=1) < tol
    if not vert.any():
        return []
    E = E[vert]
    dt = mesh.heights[E[:, 1]] - mesh.heights[E[:, 0]]
    if mesh.period is not None:
        dt = (dt + 0.5 * mesh.period) % mesh.period - 0.5 * mesh.period
    base = mesh.points[E[:, 0]]
    tree = cKDTree(base)
    groups = tree.query_ball_point(base, 1e3 * tol)
    seen = np.zeros(len(E), dtype=bool)
    fibers = []
    full = mesh.period if mesh.period is not None else np.inf
    for i, g in enumerate(groups):
        if seen[i]:
            continue
        seen[g] = True
        if np.abs(dt[g]).sum() >= full * (1 - 1e-6):
            fibers.append(base[g].mean(axis=0) / np.linalg.norm(base[g].mean(axis=0)))
    return fibers


def _horizontal_circles(mesh, tol):
    E, _ = mesh.edges()
    dt = mesh.heights[E[:, 1]] - mesh.heights[E[:, 0]]
    if mesh.period is not None:
        dt = (dt + 0.5 * mesh.period) % mesh.period - 0.5 * mesh.period
    flat = np.abs(dt) < tol
    E = E[flat]
    p, q = mesh.points[E[:, 0]], mesh.points[E[:, 1]]
    n = np.cross(p, q)
    ln = np.linalg.norm(n, axis=1)
    good = ln > 1e-12
    E, p, q, n, ln = E[good], p[good], q[good], n[good] / ln[good][:, None], ln[good]
    # canonical sign of the plane normal
    sgn = np.sign(n[np.arange(len(n)), np.argmax(np.abs(n), axis=1)])
    n = n * sgn[:, None]
    t = mesh.heights[E[:, 0]]
    arc = np.arctan2(ln, np.einsum("ij,ij->i", p, q))
    key = np.column_stack([n, t if mesh.period is None else np.mod(t, mesh.period)])
    tree = cKDTree(key)
    groups = tree.query_ball_point(key, 1e2 * tol)
    seen = np.zeros(len(E), dtype=bool)
    circles = []
    for i, g in enumerate(groups):
        if seen[i]:
            continue
        seen[g] = True
        # edges of the group must lie on the common great circle
        g = np.asarray(g)
        if np.abs(mesh.points[E[g]].reshape(-1, 3) @ n[i]).max() > 1e3 * tol:
            continue
        if arc[g].sum() >= 2 * math.pi * (1 - 1e-6):
            circles.append((n[i], float(key[i, 3])))
    return circles


def geodesic_companions(mesh, tol: float = GEODESIC_TOL) -> CompanionReport:
    """Vertical fibers must come with the antipodal fiber; horizontal great circles with the
    circle half a period higher (checked only on orientable meshes)."""
    mesh = _mesh_of(mesh)
    fibers = _vertical_fibers(mesh, tol)
    missing_f = []
    for p in fibers:
        if not any(np.linalg.norm(q + p) < 1e3 * tol for q in fibers):
            missing_f.append(p)
    oriented = orientability(mesh) is True
    circles = _horizontal_circles(mesh, tol) if oriented and mesh.period is not None else []
    missing_c = []
    for n, t in circles:
        t2 = (t + 0.5 * mesh.period) % mesh.period
        ok = any(
            np.linalg.norm(m - n) < 1e3 * tol
            and min(abs(s - t2), mesh.period - abs(s - t2)) < 1e2 * tol
            for m, s in circles
        )
        if not ok:
            missing_c.append((n, t))
    passed = not missing_f and not missing_c
    return CompanionReport(
        [p.tolist() for p in fibers],
        [(n.tolist(), t) for n, t in circles],
        [p.tolist() for p in missing_f],
        [(n.tolist(), t) for n, t in missing_c],
        oriented,
        passed,
    )


# ---------------------------------------------------------------- report


@dataclass
class TopologyReport:
    chi: int
    orientable: bool
    genus: int
    separates: Optional[bool]
    ph_zeros: list
    ph_sum: Optional[int]
    intersects: Optional[bool] = None
    slice_excluded: bool = False
    ph_uncaptured: Optional[int] = None
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.orientable and self.chi % 2:
            raise AuditError("an orientable closed surface must have even Euler characteristic")

    def to_text(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=_jsonable)

    @classmethod
    def from_text(cls, text: str) -> "TopologyReport":
        data = json.loads(text)
        data["ph_zeros"] = [tuple(z) for z in data["ph_zeros"]]
        return cls(**data)


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x))


def topology_report(mesh, other=None, fiber_samples: int = FIBER_SAMPLES) -> TopologyReport:
    """Collect every predicate for one closed mesh (and optionally its intersection with another)."""
    m = _mesh_of(mesh)
    chi = euler_characteristic(m)
    ori = orientability(m)
    if isinstance(ori, list):
        raise InputDomainError("components disagree on orientability; inspect them separately")
    notes = []
    excluded = is_slice_like(m)
    separates = separation_parity(m, fiber_samples) if m.period is not None else None
    if excluded:
        notes.append("horizontal slice: excluded from the separation statement")
    try:
        ph = poincare_hopf_audit(m)
        zeros, ph_sum, unc = [(int(v), int(i)) for v, i in ph.zeros], ph.sum, ph.uncaptured
    except NotApplicableError as exc:
        zeros, ph_sum, unc = [], None, None
        notes.append(f"index audit not applicable: {exc}")
    inter = intersection_check(m, other) if other is not None else None
    return TopologyReport(chi, ori, genus_of(chi, ori), separates, zeros, ph_sum, inter, excluded, unc, notes)
