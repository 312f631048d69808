"""Conjugate contour and prism data from the boundary data of a Plateau solve.

The slice curves are integrated from their geodesic curvature, the wall curves
advance along great circles by the integrated angle function, and the heights
come from the vertical flux through the horizontal edges.  The polygon is
traversed counterclockwise (domain on the left) in the order 3, 4, 5, 1, 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmbeddednessError,
    DegenerateHeightError,
    InvalidDomainError,
    ReconstructionError,
)
from .manifold import ProdPoint
from .plateau import PlateauSolution, level_sizes, minimize_graph_area, trace_integrals
from .mesh import SurfaceMesh
from .surfaces import _merge_points

SUBSTEPS = 8
CLOSURE_FRACTION = 1e-2
HEIGHT_NOISE = 1e-12
PIECE_GRADING_RINGS = 12


# ---------------------------------------------------------------- data types


@dataclass
class PrismData:
    alpha: float
    beta: float
    gamma: float
    h: float
    wall_circles: dict  # "23", "45", "51" -> unit normal of the great circle
    vertices: dict  # "A" (alpha), "B" (beta), "C" (gamma) -> unit 3-vectors
    alpha_tilde: float = float("nan")
    beta_tilde: float = float("nan")
    slices: tuple = (0.0, None)

    def __post_init__(self):
        self.slices = (0.0, self.h)

    def check(self, edge23_bound=None):
        """Return a list of violated invariants (empty when all hold)."""
        bad = []
        if not self.alpha > self.alpha_tilde:
            bad.append("alpha <= alpha_tilde")
        if not self.beta > self.beta_tilde:
            bad.append("beta <= beta_tilde")
        if not (0 < self.alpha < math.pi and 0 < self.beta < math.pi):
            bad.append("prism angle out of (0, pi)")
        if edge23_bound is not None and self.h > edge23_bound + 1e-12:
            bad.append("h exceeds the length of edge 23")
        normals = list(self.wall_circles.values())
        for i in range(3):
            for j in range(i + 1, 3):
                if np.linalg.norm(np.cross(normals[i], normals[j])) < 1e-9:
                    bad.append("two wall circles coincide")
        return bad


@dataclass
class ConjugateContour:
    slice_curves: dict  # "12", "34" -> dict(points, kappa, s, height)
    wall_curves: dict  # "23", "45", "51" -> dict(s, x, t, points)
    corner_points: tuple  # ProdPoints 1..5
    closure_residual: float
    closure_tol: float
    corner5_candidates: tuple = ()
    corner_angles: dict = field(default_factory=dict)

    def corner(self, label: int) -> ProdPoint:
        return self.corner_points[label - 1]


# ---------------------------------------------------------------- integration


def _geodesic_step(x, T, length):
    c, s = math.cos(length), math.sin(length)
    return c * x + s * T, -s * x + c * T


def _rk4_curve(x, T, kappa_fn, s0, s1, steps):
    """Integrate x' = T, T' = -x + kappa(s) x cross T on the unit sphere."""
    def rhs(s, x, T):
        return T, -x + kappa_fn(s) * np.cross(x, T)

    hstep = (s1 - s0) / steps
    xs, Ts = [x.copy()], [T.copy()]
    s = s0
    for _ in range(steps):
        k1x, k1t = rhs(s, x, T)
        k2x, k2t = rhs(s + hstep / 2, x + hstep / 2 * k1x, T + hstep / 2 * k1t)
        k3x, k3t = rhs(s + hstep / 2, x + hstep / 2 * k2x, T + hstep / 2 * k2t)
        k4x, k4t = rhs(s + hstep, x + hstep * k3x, T + hstep * k3t)
        x = x + hstep / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        T = T + hstep / 6 * (k1t + 2 * k2t + 2 * k3t + k4t)
        x /= np.linalg.norm(x)
        T -= (T @ x) * x
        T /= np.linalg.norm(T)
        s += hstep
        xs.append(x.copy())
        Ts.append(T.copy())
    return np.array(xs), np.array(Ts)


def integrate_slice_curve(x0, T0, s, theta, turn_sign):
    """Curve of prescribed total turning: curvature ``turn_sign * |d theta / ds|`` piecewise.

    Returns (points, tangents, arc positions, curvature per point).
    """
    s = np.asarray(s, dtype=float)
    theta = np.asarray(theta, dtype=float)
    x, T = np.asarray(x0, float), np.asarray(T0, float)
    pts, tans, ss, ks = [x.copy()], [T.copy()], [s[0]], []
    for i in range(len(s) - 1):
        ds = s[i + 1] - s[i]
        if ds <= 0:
            continue
        k = turn_sign * abs(theta[i + 1] - theta[i]) / ds
        X, Tn = _rk4_curve(x, T, lambda _s, k=k: k, s[i], s[i + 1], SUBSTEPS)
        pts.extend(X[1:])
        tans.extend(Tn[1:])
        ss.extend(np.linspace(s[i], s[i + 1], SUBSTEPS + 1)[1:])
        ks.extend([k] * SUBSTEPS)
        x, T = X[-1], Tn[-1]
    ks = np.array(ks)
    kappa = np.concatenate([[ks[0]], 0.5 * (ks[1:] + ks[:-1]), [ks[-1]]]) if len(ks) else np.zeros(1)
    return np.array(pts), np.array(tans), np.array(ss), kappa


def _intersections(n1, n2, near):
    d = np.cross(n1, n2)
    d /= np.linalg.norm(d)
    return d if d @ near >= 0 else -d


def _angle_at(v, p, q):
    a = p - (p @ v) * v
    b = q - (q @ v) * v
    return math.atan2(np.linalg.norm(np.cross(a, b)), a @ b)


# ---------------------------------------------------------------- reconstruction


def reconstruct_contour(sol: PlateauSolution, closure_tol: float | None = None, strict: bool = True):
    """Conjugate contour and prism data from a converged Plateau solution."""
    spec = sol.spec
    tri = sol.contour.triangle
    h_t = spec.h_tilde
    tr = sol.boundary_traces
    L = {e: trace_integrals(tr[e])[0] for e in ("23", "45", "51")}
    flux = dict(sol.fluxes)

    # heights from the vertical flux
    if abs(flux["23"]) < HEIGHT_NOISE:
        raise DegenerateHeightError("vertical flux through edge 23 vanishes; height sign undefined")
    sign = -math.copysign(1.0, flux["23"])
    h = abs(flux["23"])
    t5 = sign * flux["45"]
    t1 = t5 + sign * flux["51"]

    # forward chain 3 -> 4 -> 5
    x3 = np.array([1.0, 0.0, 0.0])
    T23_at3 = np.array([0.0, 1.0, 0.0])
    T = np.cross(x3, T23_at3)
    s34, th34 = tr["34"].s, tr["34"].theta
    P34, T34, S34, K34 = integrate_slice_curve(x3, T, s34, th34, -1.0)
    x4 = P34[-1]
    T45 = np.cross(x4, T34[-1])
    c_fwd, T45_end = _geodesic_step(x4, T45, L["45"])

    # backward chain 3 -> 2 -> 1 -> 5
    x2, back = _geodesic_step(x3, -T23_at3, L["23"])
    T23_at2 = -back
    T12_end = -np.cross(x2, T23_at2)
    s12, th12 = tr["12"].s, tr["12"].theta  # from vertex 2 up to vertex 1
    P21, D21, S21, K21 = integrate_slice_curve(x2, -T12_end, s12, th12, +1.0)
    x1 = P21[-1]
    T12_start = -D21[-1]
    T51_end = -np.cross(x1, T12_start)
    c_bwd, _ = _geodesic_step(x1, -T51_end, L["51"])

    closure = float(math.atan2(np.linalg.norm(np.cross(c_fwd, c_bwd)), c_fwd @ c_bwd))
    total_length = 2 * h_t + tri.c + spec.hinge.a_tilde + spec.hinge.b_tilde
    tol = CLOSURE_FRACTION * total_length if closure_tol is None else closure_tol
    if strict and closure > tol:
        raise ReconstructionError(f"conjugate contour fails to close: gap {closure:.3e} > {tol:.3e}")
    mid5 = c_fwd + c_bwd
    mid5 /= np.linalg.norm(mid5)

    # wall circles and the prism triangle
    n23 = np.cross(x3, T23_at3)
    n45 = np.cross(x4, T45)
    n51 = np.cross(x1, T51_end)
    A = _intersections(n51, n23, x1 + x2)
    B = _intersections(n23, n45, x3 + x4)
    C = _intersections(n45, n51, mid5)
    # corner 5 goes on the prism edge, which lies on both wall circles
    x5 = C
    alpha = _angle_at(A, B, C)
    beta = _angle_at(B, A, C)
    gamma_walls = _angle_at(C, A, B)
    corner5 = _angle_at(x5, x4, x1)

    prism = PrismData(
        alpha=alpha,
        beta=beta,
        gamma=spec.hinge.gamma,
        h=h,
        wall_circles={"23": n23, "45": n45, "51": n51},
        vertices={"A": A, "B": B, "C": C},
        alpha_tilde=tri.alpha_tilde,
        beta_tilde=tri.beta_tilde,
    )

    # wall profiles: horizontal progress by nu, height by w
    def profile(edge, start, direction, t_start):
        trc = tr[edge]
        x = _cumtrapz(trc.nu, trc.s)
        t = t_start + sign * _cumtrapz(trc.w, trc.s)
        pts = np.cos(x)[:, None] * start + np.sin(x)[:, None] * direction
        return {"s": trc.s, "x": x, "t": t, "points": pts}

    d23 = -np.cross(n23, x2)  # direction at x2 heading to x3 along the wall
    if d23 @ (x3 - x2) < 0:
        d23 = -d23
    d51 = np.cross(n51, x5)
    if d51 @ (x1 - x5) < 0:
        d51 = -d51
    walls = {
        "23": profile("23", x2, d23, h),
        "45": profile("45", x4, T45, 0.0),
        "51": profile("51", x5, d51, t5),
    }
    slices = {
        "34": {"points": P34, "s": S34, "kappa": K34, "height": 0.0},
        # stored from vertex 1 to vertex 2 to follow the polygon orientation
        "12": {"points": P21[::-1], "s": h_t - S21[::-1], "kappa": -K21[::-1], "height": h},
    }
    corners = (
        ProdPoint(x1, h),
        ProdPoint(x2, h),
        ProdPoint(x3, 0.0),
        ProdPoint(x4, 0.0),
        ProdPoint(x5, t5),
    )
    contour = ConjugateContour(
        slices,
        walls,
        corners,
        closure,
        tol,
        (c_fwd, c_bwd),
        {"5": corner5, "C": gamma_walls, "t1": t1, "t5": t5},
    )
    return contour, prism


def _cumtrapz(y, x):
    out = np.zeros_like(np.asarray(y, dtype=float))
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


# ---------------------------------------------------------------- Gauss-Bonnet


def _signed_area(v, p, q):
    det = float(np.dot(v, np.cross(p, q)))
    den = 1.0 + v @ p + p @ q + q @ v
    return 2.0 * math.atan2(det, den)


def _fan_area(apex, curve):
    return abs(sum(_signed_area(apex, curve[i], curve[i + 1]) for i in range(len(curve) - 1)))


def _check_embedded(curve):
    """Reject projected curves whose polyline crosses itself (gnomonic chart at its centroid)."""
    c = curve.mean(axis=0)
    c /= np.linalg.norm(c)
    e1 = np.cross(c, [0.0, 0.0, 1.0])
    if np.linalg.norm(e1) < 1e-6:
        e1 = np.cross(c, [1.0, 0.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(c, e1)
    z = curve @ c
    if np.any(z <= 0):
        raise InvalidDomainError("projected curve leaves the hemisphere")
    xy = np.column_stack([(curve @ e1) / z, (curve @ e2) / z])
    segs = np.stack([xy[:-1], xy[1:]], axis=1)
    n = len(segs)
    for i in range(n):
        a, b = segs[i]
        for j in range(i + 2, n):
            c0, d0 = segs[j]
            if _segments_cross(a, b, c0, d0):
                raise InvalidDomainError("projected slice curve intersects itself")


def _segments_cross(a, b, c, d):
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return (o1 * o2 < 0) and (o3 * o4 < 0)


def alpha_gauss_bonnet(contour: ConjugateContour, prism: PrismData):
    """(alpha_tilde + area(V_alpha), beta_tilde + area(V_beta))."""
    if contour.closure_residual > contour.closure_tol:
        raise ReconstructionError("contour does not close within tolerance")
    c12 = contour.slice_curves["12"]["points"]
    c34 = contour.slice_curves["34"]["points"]
    _check_embedded(c12)
    _check_embedded(c34)
    area_a = _fan_area(prism.vertices["A"], c12)
    area_b = _fan_area(prism.vertices["B"], c34)
    return prism.alpha_tilde + area_a, prism.beta_tilde + area_b


def projected_domain_area(contour: ConjugateContour) -> float:
    """Spherical area enclosed by the projection of the conjugate contour."""
    ring = np.vstack(
        [
            contour.slice_curves["34"]["points"],
            contour.wall_curves["45"]["points"][1:],
            contour.wall_curves["51"]["points"][1:],
            contour.slice_curves["12"]["points"][1:],
            contour.wall_curves["23"]["points"][1:],
        ]
    )
    apex = ring.mean(axis=0)
    apex /= np.linalg.norm(apex)
    return abs(sum(_signed_area(apex, ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring))))


# ---------------------------------------------------------------- free boundary piece


def _gnomonic(points, centre):
    e1 = np.cross(centre, [0.0, 0.0, 1.0])
    if np.linalg.norm(e1) < 1e-6:
        e1 = np.cross(centre, [1.0, 0.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(centre, e1)
    z = points @ centre
    return np.column_stack([(points @ e1) / z, (points @ e2) / z]), (e1, e2)


def _ungnomonic(xy, centre, frame):
    e1, e2 = frame
    P = centre[None, :] + xy[:, :1] * e1[None, :] + xy[:, 1:] * e2[None, :]
    return P / np.linalg.norm(P, axis=1)[:, None]


def _along(points, fractions):
    """Points on a polyline at the given fractions of its spherical length."""
    seg = np.arctan2(np.linalg.norm(np.cross(points[1:], points[:-1]), axis=1), np.einsum("ij,ij->i", points[1:], points[:-1]))
    cum = np.concatenate([[0.0], np.cumsum(seg)]) / max(seg.sum(), 1e-300)
    out = np.column_stack([np.interp(fractions, cum, points[:, i]) for i in range(3)])
    return out / np.linalg.norm(out, axis=1)[:, None]


def _slerp(a, b, frac):
    omega = math.atan2(np.linalg.norm(np.cross(a, b)), a @ b)
    if omega < 1e-15:
        return np.repeat(a[None, :], len(frac), axis=0)
    fr = np.asarray(frac, dtype=float)[:, None]
    return (np.sin((1 - fr) * omega) * a + np.sin(fr * omega) * b) / math.sin(omega)


def _signed_areas_2d(xy, faces):
    a, b, c = xy[faces[:, 0]], xy[faces[:, 1]], xy[faces[:, 2]]
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def _graded_rows(n, rings=None):
    """Row parameters in [0, 1], graded geometrically towards 0."""
    rings = PIECE_GRADING_RINGS if rings is None else rings
    return np.concatenate([[0.0], 0.5 ** np.arange(rings, 0, -1) / n, np.arange(1, n + 1) / n])


def _normalize(P):
    return P / np.linalg.norm(P, axis=-1, keepdims=True)


def _wall_point(contour, edge, fraction_of_source):
    """Point on a reconstructed wall curve at a fraction of the source edge length."""
    prof = contour.wall_curves[edge]
    s = prof["s"]
    x = np.interp(fraction_of_source * s[-1], s, prof["x"])
    return x / prof["x"][-1] if prof["x"][-1] > 0 else fraction_of_source


def _coons(B, T, L, R, vs):
    """Transfinite patch in R^3 from four boundary samplings, projected back to the sphere."""
    nv, nu = len(L), len(B)
    U = np.linspace(0.0, 1.0, nu)[None, :, None]
    V = np.asarray(vs)[:, None, None]
    grid = (
        (1 - V) * B[None] + V * T[None] + (1 - U) * L[:, None] + U * R[:, None]
        - ((1 - U) * (1 - V) * B[0] + U * (1 - V) * B[-1] + (1 - U) * V * T[0] + U * V * T[-1])
    )
    assert grid.shape[:2] == (nv, nu)
    return _normalize(grid)


def _patch_faces(ids):
    nrow, ncol = ids.shape
    out = []
    for i in range(nrow - 1):
        for j in range(ncol - 1):
            a, b, c, d = ids[i, j], ids[i + 1, j], ids[i + 1, j + 1], ids[i, j + 1]
            if (i + j) % 2:
                tri = [(a, b, d), (b, c, d)]
            else:
                tri = [(a, b, c), (a, c, d)]
            out.extend(t for t in tri if len(set(t)) == 3)
    return out


def build_piece_mesh(contour: ConjugateContour, level: int):
    """Triangulation of the projected conjugate domain in three patches.

    Two graded patches run from the slice curves to a polyline through a
    central point, the third fans out from corner 5; the split points on the
    walls are the images of the midpoints of the source edges.  Returns
    (points, faces, tags).
    """
    n, k = level_sizes(level)
    c = {i: contour.corner(i).p for i in range(1, 6)}
    m23 = _slerp(c[2], c[3], [_wall_point(contour, "23", 0.5)])[0]
    m45 = _slerp(c[4], c[5], [_wall_point(contour, "45", 0.5)])[0]
    m51 = _slerp(c[5], c[1], [_wall_point(contour, "51", 0.5)])[0]
    centre = _normalize(m23 + m45 + m51)
    half = np.linspace(0.0, 1.0, k + 1)

    def polyline(a, b):
        return np.vstack([_slerp(a, centre, half), _slerp(centre, b, half)[1:]])

    rows = _graded_rows(n)
    ncol = 2 * k + 1
    us = np.linspace(0.0, 1.0, ncol)
    patches = []
    # patch along slice curve 1-2 (from corner 2 to corner 1)
    S12 = _along(contour.slice_curves["12"]["points"][::-1], us)
    g12 = _coons(S12, polyline(m23, m51), _slerp(c[2], m23, rows), _slerp(c[1], m51, rows), rows)
    g12[0] = S12
    patches.append(("12", g12))
    S34 = _along(contour.slice_curves["34"]["points"], us)
    g34 = _coons(S34, polyline(m23, m45), _slerp(c[3], m23, rows), _slerp(c[4], m45, rows), rows)
    g34[0] = S34
    patches.append(("34", g34))
    xi = np.arange(n + 1) / n
    far = polyline(m51, m45)
    g5 = _normalize((1 - xi)[:, None, None] * c[5] + xi[:, None, None] * far[None])
    g5[0] = c[5]
    patches.append(("5", g5))

    pts, tags, ids = [], [], {}
    for name, g in patches:
        nrow = g.shape[0]
        base = len(pts)
        ids[name] = base + np.arange(nrow * ncol).reshape(nrow, ncol)
        pts.extend(g.reshape(-1, 3))
        for i in range(nrow):
            for j in range(ncol):
                tags.append(_piece_tag(name, i, j, nrow, ncol))
    pts = np.asarray(pts)
    uniq, inv = _merge_points(pts, 1e-11)
    points = pts[uniq]
    new_tags = [None] * len(uniq)
    rank = {"interior": 0}
    for old, t in enumerate(tags):
        cur = new_tags[inv[old]]
        if cur is None or rank.get(t, 1 + t.startswith("corner") + t.startswith("slice")) > rank.get(
            cur, 1 + cur.startswith("corner") + cur.startswith("slice")
        ):
            new_tags[inv[old]] = t

    faces = []
    for name, g in patches:
        pf = np.asarray(_patch_faces(inv[ids[name]]), dtype=np.int64)
        P = points[pf]
        orient = np.einsum("ij,ij->i", P[:, 0], np.cross(P[:, 1], P[:, 2]))
        if np.median(orient) < 0:
            pf = pf[:, [0, 2, 1]]
            orient = -orient
        if np.any(orient <= 0):
            raise InvalidDomainError(f"{int(np.sum(orient <= 0))} folded triangles in the projected piece")
        faces.append(pf)
    faces = np.vstack(faces)
    return points, faces, new_tags


def _piece_tag(name, i, j, nrow, ncol):
    last = ncol - 1
    if name == "5":
        if i == 0:
            return "corner5"
        if j == 0:
            return "wall51"
        if j == last:
            return "wall45"
        return "interior"
    if i == 0:
        if name == "12":
            return "corner2" if j == 0 else ("corner1" if j == last else "slice12")
        return "corner3" if j == 0 else ("corner4" if j == last else "slice34")
    if j == 0:
        return "wall23"
    if j == last:
        return "wall51" if name == "12" else "wall45"
    return "interior"


def solve_free_boundary(
    prism: PrismData,
    contour: ConjugateContour,
    resolution: int = 3,
    tol: float = 1e-10,
    max_iter: int = 200,
    inside_tol: float | None = None,
) -> SurfaceMesh:
    """Minimal piece in the prism bounded by the conjugate contour.

    The projected positions are pinned to a triangulation of the reconstructed
    domain; the heights are minimised with the slice curves held at 0 and h and
    the wall heights left free, which is the natural condition for meeting the
    walls orthogonally.
    """
    points, faces, tags = build_piece_mesh(contour, resolution)
    h = prism.h
    tags_arr = np.array(tags)
    top = np.isin(tags_arr, ["slice12", "corner1", "corner2"])
    bottom = np.isin(tags_arr, ["slice34", "corner3", "corner4"])
    # start from the heights of a plane through the two slice curves
    c12 = contour.slice_curves["12"]["points"].mean(axis=0)
    c34 = contour.slice_curves["34"]["points"].mean(axis=0)
    axis = c12 - c34
    proj = points @ axis
    lo, hi = float(c34 @ axis), float(c12 @ axis)
    u0 = h * np.clip((proj - lo) / (hi - lo), 0.0, 1.0) if hi != lo else np.full(len(points), 0.5 * h)
    u0[top], u0[bottom] = h, 0.0
    free = np.flatnonzero(~(top | bottom))
    u, _info = minimize_graph_area(points, faces, u0, free, tol=tol, max_iter=max_iter)
    mesh = SurfaceMesh(points, u, faces, tags=tags).with_normals()
    if inside_tol is None:
        # corner 5 sits on the prism edge at C; the slice curves miss it by the closure residual
        inside_tol = contour.closure_residual + 1e-6
    _check_inside(mesh, prism, inside_tol)
    return mesh


def _check_inside(mesh: SurfaceMesh, prism: PrismData, tol=None):
    tol = 1e-6 if tol is None else tol
    A, B, C = (prism.vertices[k] for k in "ABC")
    orient = np.sign(np.dot(A, np.cross(B, C)))
    P = mesh.points
    for p, q in ((A, B), (B, C), (C, A)):
        side = orient * (P @ np.cross(p, q))
        if np.any(side < -tol):
            raise EmbeddednessError(f"vertex escapes the prism (wall offset {side.min():.3e})")
    if mesh.heights.min() < -tol or mesh.heights.max() > prism.h + tol:
        raise EmbeddednessError("vertex leaves the slab between the two slices")


# ---------------------------------------------------------------- verification


def _interior_angle_defects(mesh: SurfaceMesh):
    X = mesh.face_coords()
    ang = np.empty((mesh.n_faces, 3))
    for k in range(3):
        u = X[:, (k + 1) % 3] - X[:, k]
        v = X[:, (k + 2) % 3] - X[:, k]
        cosv = np.einsum("ij,ij->i", u, v) / (np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1))
        ang[:, k] = np.arccos(np.clip(cosv, -1.0, 1.0))
    total = np.zeros(mesh.n_vertices)
    np.add.at(total, mesh.faces.ravel(), ang.ravel())
    return total


def total_curvature(mesh: SurfaceMesh, interior_mask) -> float:
    """Sum of angle defects over the interior vertices."""
    total = _interior_angle_defects(mesh)
    return float(np.sum(2 * math.pi - total[interior_mask]))


def nu_distribution(mesh: SurfaceMesh):
    """Per-face angle function and area weights (normal oriented upward)."""
    N = mesh.face_normals_at(0)
    nu = np.abs(N[:, 3])
    return nu, mesh.face_areas()


@dataclass
class ConjugateReport:
    area_source: float
    area_piece: float
    area_mismatch: float
    nu_distance: float
    total_curvature: float
    curvature_target: float
    curvature_mismatch: float
    wall_orthogonality: float
    slice_orthogonality: float
    planarity: float
    thresholds: dict
    flags: dict

    @property
    def passed(self) -> bool:
        return not any(self.flags.values())


DEFAULT_THRESHOLDS = {"area": 0.01, "nu": 0.02, "curvature": 0.03}


def verify_conjugate(sol: PlateauSolution, mesh: SurfaceMesh, prism: PrismData | None = None, thresholds=None):
    """Compare a free-boundary piece against its source Plateau solution."""
    from scipy.stats import wasserstein_distance

    th = dict(DEFAULT_THRESHOLDS)
    th.update(thresholds or {})
    a_src, a_new = sol.mesh.area(), mesh.area()
    area_mismatch = abs(a_new - a_src) / a_src
    nu_s, w_s = nu_distribution(sol.mesh)
    nu_m, w_m = nu_distribution(mesh)
    nu_dist = float(wasserstein_distance(nu_s, nu_m, w_s, w_m))
    interior = np.array([t == "interior" for t in mesh.tags])
    K = total_curvature(mesh, interior)
    target = sol.spec.hinge.gamma - math.pi
    k_mismatch = abs(K - target) / abs(target)

    N = mesh.normals if mesh.normals is not None else mesh.compute_normals()
    slice_ids = np.array([t in ("slice12", "slice34") for t in mesh.tags])
    slice_orth = float(np.max(np.abs(N[slice_ids, 3]))) if slice_ids.any() else 0.0
    wall_orth, planar = 0.0, 0.0
    if prism is not None:
        for key in ("23", "45", "51"):
            ids = np.array([t == "wall" + key for t in mesh.tags])
            if not ids.any():
                continue
            n = prism.wall_circles[key]
            wall_orth = max(wall_orth, float(np.max(np.abs(N[ids, :3] @ n))))
            planar = max(planar, float(np.max(np.abs(mesh.points[ids] @ n))))
    flags = {
        "area": area_mismatch > th["area"],
        "nu": nu_dist > th["nu"],
        "curvature": k_mismatch > th["curvature"],
    }
    return ConjugateReport(a_src, a_new, area_mismatch, nu_dist, K, target, k_mismatch, wall_orth, slice_orth, planar, th, flags)
