"""Parameter search over the source contour: the map (h~, a~, b~) -> (h, alpha, beta).

Two searches are provided.  ``solve_symmetric`` handles the a~ = b~ family by
one-dimensional bracketing in h~.  ``solve_general`` locates the
(pi/k, pi/2) target with a winding-number certificate followed by quadtree
subdivision and a Broyden polish.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .conjugation import ConjugateContour, PrismData, reconstruct_contour
from .errors import (
    IndeterminateError,
    InputDomainError,
    NoRootCertificateError,
    NoSolutionError,
    PrecisionLimitError,
)
from .plateau import PlateauSolution, measure_symmetry_curve, solve_graph
from .sphtrig import HingeSpec, delta_from_alpha, edge23_length, right_triangle_from_hypotenuse, solve_hinge
from .surfaces import ContourSpec

ALPHA_TOL = 1e-3
EQ2_TOL = 2e-3
GENERAL_TOL = 2e-3
H0_START = 0.1
WINDING_SAMPLES = 16
CHILD_SAMPLES = 8
MAX_SAMPLES = 128
TARGET_CLEARANCE = 1e-3
FD_STEP = 1e-3
SCAN_POINTS = 12
QUADTREE_DEPTH = 6
QUADTREE_STOP = 0.08
POLISH_ITERS = 25


@dataclass
class ShotResult:
    params: tuple  # (h_tilde, a_tilde, b_tilde)
    gamma: float
    prism: PrismData
    contour: ConjugateContour | None
    solution: PlateauSolution | None
    diagnostics: dict = field(default_factory=dict)
    trusted: bool = True

    @property
    def h(self):
        return self.prism.h

    @property
    def alpha(self):
        return self.prism.alpha

    @property
    def beta(self):
        return self.prism.beta

    def as_dict(self):
        h_t, a_t, b_t = self.params
        out = {
            "h_tilde": h_t,
            "a_tilde": a_t,
            "b_tilde": b_t,
            "gamma": self.gamma,
            "h": self.prism.h,
            "alpha": self.prism.alpha,
            "beta": self.prism.beta,
            "trusted": self.trusted,
        }
        out.update(self.diagnostics)
        return out


# ---------------------------------------------------------------- the map f


_LOG: list = []


def evaluation_log() -> list:
    """Every call of eval_f since the last clear_cache(), in order."""
    return list(_LOG)


@lru_cache(maxsize=512)
def _pipeline(h_tilde, a_tilde, b_tilde, gamma, resolution):
    spec = ContourSpec.from_values(a_tilde, b_tilde, gamma, h_tilde)
    sol = solve_graph(spec, resolution=resolution)
    contour, prism = reconstruct_contour(sol, strict=False)
    return sol, contour, prism


def eval_f(h_tilde: float, a_tilde: float, b_tilde: float, gamma: float, resolution: int = 3) -> ShotResult:
    """Run the Plateau solve and the conjugate reconstruction at one parameter triple."""
    sol, contour, prism = _pipeline(float(h_tilde), float(a_tilde), float(b_tilde), float(gamma), int(resolution))
    bound = None
    if abs(a_tilde - b_tilde) < 1e-14:
        # h approaches the edge length as h~ grows; allow the discretisation error
        bound = edge23_length(a_tilde, gamma) + contour.closure_residual
    violations = prism.check(edge23_bound=bound)
    diag = {
        "resolution": int(resolution),
        "solver_residual": sol.residual,
        "solver_iterations": sol.iterations,
        "closure_residual": contour.closure_residual,
        "closure_tol": contour.closure_tol,
        "violations": ";".join(violations),
    }
    trusted = contour.closure_residual <= contour.closure_tol and not violations
    _LOG.append(
        {
            "h_tilde": h_tilde, "a_tilde": a_tilde, "b_tilde": b_tilde,
            "h": prism.h, "alpha": prism.alpha, "beta": prism.beta,
            "closure_residual": contour.closure_residual, "solver_residual": sol.residual,
        }
    )
    return ShotResult((h_tilde, a_tilde, b_tilde), gamma, prism, contour, sol, diag, trusted)


def _eq2_residual(alpha, gamma, ell_delta):
    return abs(math.cos(alpha) - math.sin(gamma / 2) * math.cos(ell_delta))


# ---------------------------------------------------------------- symmetric family


def _symmetry_length(h_tilde, a_tilde, gamma, resolution):
    sol, _, _ = _pipeline(float(h_tilde), float(a_tilde), float(a_tilde), float(gamma), int(resolution))
    return measure_symmetry_curve(sol)


def solve_symmetric(gamma: float, alpha_target: float, a_tilde: float, resolution: int = 3) -> ShotResult:
    """Find h~ in the a~ = b~ family whose conjugate prism has base angle ``alpha_target``.

    The symmetry-curve length is bracketed first against the length that the
    base-triangle relation cos(alpha) = sin(gamma/2) cos(l) assigns to the
    target.  The bracket is then refined on the reconstructed angle itself.
    The scan runs one level coarser than ``resolution``; the refinement and the
    returned result use ``resolution``.
    """
    if not (0.0 < a_tilde <= math.pi / 2 + 1e-12):
        raise InputDomainError(f"a_tilde={a_tilde} outside (0, pi/2]")
    delta_target = delta_from_alpha(gamma, alpha_target)
    hi = min(delta_target, math.pi / 2)
    if hi <= 0.0:
        raise NoSolutionError("target symmetry length is zero")

    scan_level = max(1, resolution - 1)

    def proxy(h):
        return _symmetry_length(h, a_tilde, gamma, scan_level) - delta_target

    # As h~ -> 0 the symmetry curve flattens onto the median of the hinge
    # triangle, and its projection always joins the same two base points, so
    # the median is a strict lower bound for its length.
    median, _ = right_triangle_from_hypotenuse(a_tilde, gamma / 2)
    if median >= delta_target:
        alpha_t = solve_hinge(HingeSpec(a_tilde, a_tilde, gamma)).alpha_tilde
        raise NoSolutionError(
            f"alpha={alpha_target:.6f} unreachable for a_tilde={a_tilde:.6f}: the symmetry curve is "
            f"longer than the median {median:.6f} >= {delta_target:.6f} (hinge base angle {alpha_t:.6f})"
        )
    grid = hi * np.linspace(1.0 / SCAN_POINTS, 1.0, SCAN_POINTS)
    values = [proxy(h) for h in grid]
    lo_b = hi_b = None
    prev_h, prev_v = 0.0, median - delta_target
    for h, v in zip(grid, values):
        if prev_v < 0.0 <= v:
            lo_b, hi_b = prev_h, h
            break
        prev_h, prev_v = h, v
    if lo_b is None:
        raise NoSolutionError(
            f"no bracket for alpha={alpha_target:.6f} with a_tilde={a_tilde:.6f} in h_tilde <= {hi:.6f}"
        )
    if lo_b == 0.0:
        lo_b = 1e-3 * hi_b
    h_proxy = brentq(proxy, lo_b, hi_b, xtol=1e-6) if proxy(lo_b) < 0.0 else lo_b

    def alpha_gap(h):
        return eval_f(h, a_tilde, a_tilde, gamma, resolution).alpha - alpha_target

    h_root = _refine_root(alpha_gap, h_proxy, 1e-3 * hi, hi)
    if h_root is None:
        raise NoSolutionError(
            f"alpha={alpha_target:.6f} not reached for a_tilde={a_tilde:.6f}: "
            f"the base angle of the hinge is {solve_hinge(HingeSpec(a_tilde, a_tilde, gamma)).alpha_tilde:.6f}"
        )
    shot = eval_f(h_root, a_tilde, a_tilde, gamma, resolution)
    ell = _symmetry_length(h_root, a_tilde, gamma, resolution)
    shot.diagnostics.update(
        {
            "alpha_target": alpha_target,
            "alpha_error": abs(shot.alpha - alpha_target),
            "symmetry_length": ell,
            "symmetry_target": delta_target,
            "h_tilde_proxy": h_proxy,
            "eq2_residual": _eq2_residual(shot.alpha, gamma, ell),
        }
    )
    if shot.diagnostics["alpha_error"] >= ALPHA_TOL or shot.diagnostics["eq2_residual"] >= EQ2_TOL:
        shot.trusted = False
    return shot


def _refine_root(fn, guess, lo, hi, step=0.02, grow=1.6, max_expand=20):
    """Bracket a sign change of ``fn`` around ``guess`` inside [lo, hi] and refine it."""
    f0 = fn(guess)
    if f0 == 0.0:
        return guess
    a, b = guess, guess
    d = step
    for _ in range(max_expand):
        a_new, b_new = max(lo, guess - d), min(hi, guess + d)
        if a_new < a:
            fa_new = fn(a_new)
            if fa_new * f0 <= 0.0:
                return brentq(fn, a_new, a, xtol=1e-9, rtol=1e-10)
            a = a_new
        if b_new > b:
            fb_new = fn(b_new)
            if fb_new * f0 <= 0.0:
                return brentq(fn, b, b_new, xtol=1e-9, rtol=1e-10)
            b = b_new
        if a <= lo and b >= hi:
            return None
        d *= grow
    return None


# ---------------------------------------------------------------- winding certificate


def jordan_rectangle(k: int):
    """Parameter rectangle [1/2, pi/2] x [1/(2k), pi/k] in the (a~, b~) plane."""
    if k < 3:
        raise InputDomainError("k must be at least 3")
    return (0.5, math.pi / 2, 1.0 / (2 * k), math.pi / k)


def _rectangle_loop(rect, samples):
    """Counterclockwise boundary samples of a rectangle, corners included once."""
    a0, a1, b0, b1 = rect
    t = np.linspace(0.0, 1.0, samples + 1)[:-1]
    bottom = np.column_stack([a0 + (a1 - a0) * t, np.full_like(t, b0)])
    right = np.column_stack([np.full_like(t, a1), b0 + (b1 - b0) * t])
    top = np.column_stack([a1 - (a1 - a0) * t, np.full_like(t, b1)])
    left = np.column_stack([np.full_like(t, a0), b1 - (b1 - b0) * t])
    return np.vstack([bottom, right, top, left])


def _image(h_tilde, params, gamma, resolution):
    out = np.empty((len(params), 2))
    for i, (a, b) in enumerate(params):
        r = eval_f(h_tilde, float(a), float(b), gamma, resolution)
        out[i] = (r.alpha, r.beta)
    return out


def winding_number(curve, target):
    """Winding of a closed polyline around ``target``; None when aliasing is possible."""
    rel = np.asarray(curve, dtype=float) - np.asarray(target, dtype=float)
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    d = np.diff(np.concatenate([ang, ang[:1]]))
    d = (d + math.pi) % (2 * math.pi) - math.pi
    if np.max(np.abs(d)) > math.pi / 2:
        return None
    return int(round(d.sum() / (2 * math.pi)))


def _clearance(curve, target):
    P = np.asarray(curve)
    Q = np.roll(P, -1, axis=0)
    t = np.asarray(target, dtype=float)
    seg = Q - P
    lam = np.clip(np.einsum("ij,ij->i", t - P, seg) / np.maximum(np.einsum("ij,ij->i", seg, seg), 1e-300), 0, 1)
    return float(np.min(np.linalg.norm(P + lam[:, None] * seg - t, axis=1)))


def _rect_winding(h_tilde, rect, target, gamma, resolution, samples):
    while samples <= MAX_SAMPLES:
        loop = _rectangle_loop(rect, samples)
        img = _image(h_tilde, loop, gamma, resolution)
        if _clearance(img, target) < TARGET_CLEARANCE:
            raise IndeterminateError(f"image curve passes within {TARGET_CLEARANCE} of the target")
        w = winding_number(img, target)
        if w is not None:
            return w, img
        samples *= 2
    raise IndeterminateError("winding still aliased at the maximum sampling density")


def winding_test(h_tilde: float, k: int, resolution: int = 2, samples: int = WINDING_SAMPLES, target=None) -> int:
    """Winding of f along the boundary of the parameter rectangle around (pi/k, pi/2)."""
    rect = jordan_rectangle(k)
    tgt = (math.pi / k, math.pi / 2) if target is None else tuple(target)
    w, _ = _rect_winding(h_tilde, rect, tgt, math.pi / 2, resolution, samples)
    return w


def side_conditions(h_tilde: float, k: int, resolution: int = 2, samples: int = WINDING_SAMPLES):
    """Sign conditions along the four sides: beta > pi/2, alpha > pi/k, beta < pi/2, alpha < pi/k."""
    a0, a1, b0, b1 = jordan_rectangle(k)
    t = np.linspace(0.0, 1.0, samples + 1)
    sides = {
        "c1": (np.full_like(t, a1), b0 + (b1 - b0) * t, lambda al, be: be > math.pi / 2),
        "c2": (a0 + (a1 - a0) * t, np.full_like(t, b1), lambda al, be: al > math.pi / k),
        "c3": (np.full_like(t, a0), b0 + (b1 - b0) * t, lambda al, be: be < math.pi / 2),
        "c4": (a0 + (a1 - a0) * t, np.full_like(t, b0), lambda al, be: al < math.pi / k),
    }
    out = {}
    for name, (A, B, pred) in sides.items():
        img = _image(h_tilde, np.column_stack([A, B]), math.pi / 2, resolution)
        out[name] = bool(all(pred(al, be) for al, be in img))
    return out


def choose_h0(k: int, resolution: int = 2, start: float = H0_START, min_h: float = 1e-3):
    """Halve h~ from ``start`` until all four side conditions hold."""
    h = start
    while h >= min_h:
        cond = side_conditions(h, k, resolution)
        if all(cond.values()):
            return h
        h *= 0.5
    raise NoRootCertificateError(f"side conditions fail for every h_tilde down to {min_h}")


# ---------------------------------------------------------------- general family


def solve_general(k: int, resolution: int = 2, h_tilde: float | None = None) -> ShotResult:
    """Root of f_h~(a~, b~) = (pi/k, pi/2) certified by a winding number of modulus one."""
    gamma = math.pi / 2
    target = np.array([math.pi / k, math.pi / 2])
    if h_tilde is None:
        h_tilde = choose_h0(k, resolution)
    rect = jordan_rectangle(k)
    w, _ = _rect_winding(h_tilde, rect, target, gamma, resolution, WINDING_SAMPLES)
    if w == 0:
        raise NoRootCertificateError("winding number zero on the outer rectangle")
    certificate = w

    depth = 0
    while depth < QUADTREE_DEPTH and max(rect[1] - rect[0], rect[3] - rect[2]) > QUADTREE_STOP:
        child = _nonzero_child(h_tilde, rect, target, gamma, resolution)
        if child is None:
            break
        rect, certificate = child
        depth += 1

    guess = np.array([(rect[0] + rect[1]) / 2, (rect[2] + rect[3]) / 2])
    x, err = _broyden(h_tilde, guess, target, gamma, resolution)
    shot = eval_f(h_tilde, x[0], x[1], gamma, resolution)
    fine = eval_f(h_tilde, x[0], x[1], gamma, resolution + 1)
    drift = max(abs(fine.alpha - shot.alpha), abs(fine.beta - shot.beta))
    shot.diagnostics.update(
        {
            "winding": int(w),
            "certificate_winding": int(certificate),
            "certificate_rect": tuple(float(v) for v in rect),
            "quadtree_depth": depth,
            "alpha_error": abs(shot.alpha - target[0]),
            "beta_error": abs(shot.beta - target[1]),
            "refined_alpha": fine.alpha,
            "refined_beta": fine.beta,
            "refinement_drift": drift,
        }
    )
    if err >= GENERAL_TOL:
        shot.trusted = False
        raise PrecisionLimitError(f"polish stalled at residual {err:.3e}", best=shot)
    return shot


def _nonzero_child(h_tilde, rect, target, gamma, resolution):
    a0, a1, b0, b1 = rect
    am, bm = (a0 + a1) / 2, (b0 + b1) / 2
    children = [(a0, am, b0, bm), (am, a1, b0, bm), (am, a1, bm, b1), (a0, am, bm, b1)]
    for child in children:
        try:
            w, _ = _rect_winding(h_tilde, child, target, gamma, resolution, CHILD_SAMPLES)
        except IndeterminateError:
            continue
        if w != 0:
            return child, w
    return None


def _f_ab(h_tilde, x, gamma, resolution):
    a = float(min(max(x[0], 1e-3), math.pi / 2))
    b = float(min(max(x[1], 1e-3), math.pi / 2))
    r = eval_f(h_tilde, a, b, gamma, resolution)
    return np.array([r.alpha, r.beta])


def _broyden(h_tilde, x0, target, gamma, resolution):
    """Broyden iteration started from a finite-difference Jacobian."""
    x = np.array(x0, dtype=float)
    F = _f_ab(h_tilde, x, gamma, resolution) - target
    J = np.empty((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = FD_STEP
        J[:, j] = (_f_ab(h_tilde, x + e, gamma, resolution) - target - F) / FD_STEP
    best = (np.max(np.abs(F)), x.copy())
    for _ in range(POLISH_ITERS):
        if best[0] < 0.05 * GENERAL_TOL:
            break
        try:
            dx = -np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        step = np.linalg.norm(dx)
        if step > 0.2:
            dx *= 0.2 / step
        x_new = np.clip(x + dx, 1e-3, math.pi / 2)
        F_new = _f_ab(h_tilde, x_new, gamma, resolution) - target
        s = x_new - x
        if s @ s > 0:
            J = J + np.outer(F_new - F - J @ s, s) / (s @ s)
        x, F = x_new, F_new
        err = np.max(np.abs(F))
        if err < best[0]:
            best = (err, x.copy())
    return best[1], best[0]


def clear_cache():
    _pipeline.cache_clear()
    _LOG.clear()


__all__ = [
    "ShotResult",
    "eval_f",
    "solve_symmetric",
    "winding_test",
    "winding_number",
    "side_conditions",
    "choose_h0",
    "solve_general",
    "jordan_rectangle",
    "clear_cache",
    "evaluation_log",
]
