"""Hot loops: chordal triangle areas, their gradients and Hessians.

Every kernel has a numba implementation and a vectorised numpy twin with the
same signature.  The public names dispatch on ``_config.USE_NUMBA``; the twins
stay importable as ``*_numpy`` / ``*_numba`` for cross-checking and benchmarks.
"""
from __future__ import annotations

import numpy as np

from . import _config

# ---------------------------------------------------------------- numpy path


def chordal_area_gradient_numpy(X, faces):
    """Total area of the R^4 chordal mesh and its gradient w.r.t. every vertex."""
    X = np.asarray(X, dtype=float)
    F = np.asarray(faces, dtype=np.int64)
    xa, xb, xc = X[F[:, 0]], X[F[:, 1]], X[F[:, 2]]
    e1 = xb - xa
    e2 = xc - xa
    a = np.einsum("ij,ij->i", e1, e1)
    b = np.einsum("ij,ij->i", e2, e2)
    c = np.einsum("ij,ij->i", e1, e2)
    G = np.maximum(a * b - c * c, 0.0)
    A = 0.5 * np.sqrt(G)
    safe = np.where(A > 0, A, 1.0)
    gb = (2.0 * b[:, None] * e1 - 2.0 * c[:, None] * e2) / (8.0 * safe[:, None])
    gc = (2.0 * a[:, None] * e2 - 2.0 * c[:, None] * e1) / (8.0 * safe[:, None])
    gb[A == 0] = 0.0
    gc[A == 0] = 0.0
    grad = np.zeros_like(X)
    np.add.at(grad, F[:, 1], gb)
    np.add.at(grad, F[:, 2], gc)
    np.add.at(grad, F[:, 0], -gb - gc)
    return float(A.sum()), grad


def face_areas_numpy(X, faces):
    X = np.asarray(X, dtype=float)
    F = np.asarray(faces, dtype=np.int64)
    e1 = X[F[:, 1]] - X[F[:, 0]]
    e2 = X[F[:, 2]] - X[F[:, 0]]
    a = np.einsum("ij,ij->i", e1, e1)
    b = np.einsum("ij,ij->i", e2, e2)
    c = np.einsum("ij,ij->i", e1, e2)
    return 0.5 * np.sqrt(np.maximum(a * b - c * c, 0.0))


def graph_area_derivs_numpy(P, u, faces, reg=0.0):
    """Area of the lifted graph mesh and its derivatives in the heights.

    Returns (area, gradient (nv,), per-face Hessian blocks (nf,3,3)).  ``reg``
    is added to each face's Gram determinant (scalar or per face).
    """
    P = np.asarray(P, dtype=float)
    u = np.asarray(u, dtype=float)
    F = np.asarray(faces, dtype=np.int64)
    d1 = P[F[:, 1]] - P[F[:, 0]]
    d2 = P[F[:, 2]] - P[F[:, 0]]
    A0 = np.einsum("ij,ij->i", d1, d1)
    B0 = np.einsum("ij,ij->i", d2, d2)
    C0 = np.einsum("ij,ij->i", d1, d2)
    s1 = u[F[:, 1]] - u[F[:, 0]]
    s2 = u[F[:, 2]] - u[F[:, 0]]
    a = A0 + s1 * s1
    b = B0 + s2 * s2
    c = C0 + s1 * s2
    G = np.maximum(a * b - c * c + reg, 1e-300)
    r = np.sqrt(G)
    area = 0.5 * r
    G1 = 2.0 * s1 * b - 2.0 * c * s2
    G2 = 2.0 * s2 * a - 2.0 * c * s1
    A1 = G1 / (4.0 * r)
    A2 = G2 / (4.0 * r)
    g3 = 1.0 / (8.0 * G * r)
    H11 = 2.0 * B0 / (4.0 * r) - G1 * G1 * g3
    H22 = 2.0 * A0 / (4.0 * r) - G2 * G2 * g3
    H12 = -2.0 * C0 / (4.0 * r) - G1 * G2 * g3
    grad = np.zeros_like(u)
    np.add.at(grad, F[:, 0], -A1 - A2)
    np.add.at(grad, F[:, 1], A1)
    np.add.at(grad, F[:, 2], A2)
    H = np.empty((F.shape[0], 3, 3))
    H[:, 1, 1] = H11
    H[:, 2, 2] = H22
    H[:, 1, 2] = H[:, 2, 1] = H12
    H[:, 0, 1] = H[:, 1, 0] = -H11 - H12
    H[:, 0, 2] = H[:, 2, 0] = -H12 - H22
    H[:, 0, 0] = H11 + 2 * H12 + H22
    return float(area.sum()), grad, H


def graph_majorizer_blocks_numpy(P, u, faces, reg=0.0):
    """Per-face Hessian of the quadratic upper bound sqrt(G) <= (G + G0) / (2 sqrt(G0)).

    Minimising this bound is the lagged-diffusivity step; it never increases the area.
    """
    P = np.asarray(P, dtype=float)
    u = np.asarray(u, dtype=float)
    F = np.asarray(faces, dtype=np.int64)
    d1 = P[F[:, 1]] - P[F[:, 0]]
    d2 = P[F[:, 2]] - P[F[:, 0]]
    A0 = np.einsum("ij,ij->i", d1, d1)
    B0 = np.einsum("ij,ij->i", d2, d2)
    C0 = np.einsum("ij,ij->i", d1, d2)
    s1 = u[F[:, 1]] - u[F[:, 0]]
    s2 = u[F[:, 2]] - u[F[:, 0]]
    G = np.maximum((A0 + s1 * s1) * (B0 + s2 * s2) - (C0 + s1 * s2) ** 2 + reg, 1e-300)
    r4 = 4.0 * np.sqrt(G)
    H11 = 2.0 * B0 / r4
    H22 = 2.0 * A0 / r4
    H12 = -2.0 * C0 / r4
    H = np.empty((F.shape[0], 3, 3))
    H[:, 1, 1] = H11
    H[:, 2, 2] = H22
    H[:, 1, 2] = H[:, 2, 1] = H12
    H[:, 0, 1] = H[:, 1, 0] = -H11 - H12
    H[:, 0, 2] = H[:, 2, 0] = -H12 - H22
    H[:, 0, 0] = H11 + 2 * H12 + H22
    return H


# ---------------------------------------------------------------- numba path

try:  # pragma: no cover - exercised when numba is importable
    from numba import njit

    @njit(cache=True)
    def chordal_area_gradient_numba(X, faces):
        nv, dim = X.shape
        grad = np.zeros((nv, dim))
        total = 0.0
        e1 = np.empty(dim)
        e2 = np.empty(dim)
        for f in range(faces.shape[0]):
            i, j, k = faces[f, 0], faces[f, 1], faces[f, 2]
            a = 0.0
            b = 0.0
            c = 0.0
            for d in range(dim):
                e1[d] = X[j, d] - X[i, d]
                e2[d] = X[k, d] - X[i, d]
                a += e1[d] * e1[d]
                b += e2[d] * e2[d]
                c += e1[d] * e2[d]
            G = a * b - c * c
            if G <= 0.0:
                continue
            A = 0.5 * np.sqrt(G)
            total += A
            s = 1.0 / (8.0 * A)
            for d in range(dim):
                gb = (2.0 * b * e1[d] - 2.0 * c * e2[d]) * s
                gc = (2.0 * a * e2[d] - 2.0 * c * e1[d]) * s
                grad[j, d] += gb
                grad[k, d] += gc
                grad[i, d] -= gb + gc
        return total, grad

    @njit(cache=True)
    def face_areas_numba(X, faces):
        out = np.empty(faces.shape[0])
        dim = X.shape[1]
        for f in range(faces.shape[0]):
            i, j, k = faces[f, 0], faces[f, 1], faces[f, 2]
            a = 0.0
            b = 0.0
            c = 0.0
            for d in range(dim):
                x1 = X[j, d] - X[i, d]
                x2 = X[k, d] - X[i, d]
                a += x1 * x1
                b += x2 * x2
                c += x1 * x2
            G = a * b - c * c
            out[f] = 0.5 * np.sqrt(G) if G > 0.0 else 0.0
        return out

    @njit(cache=True)
    def graph_area_derivs_numba(P, u, faces):
        nf = faces.shape[0]
        grad = np.zeros(u.shape[0])
        H = np.empty((nf, 3, 3))
        total = 0.0
        for f in range(nf):
            i, j, k = faces[f, 0], faces[f, 1], faces[f, 2]
            A0 = 0.0
            B0 = 0.0
            C0 = 0.0
            for d in range(3):
                x1 = P[j, d] - P[i, d]
                x2 = P[k, d] - P[i, d]
                A0 += x1 * x1
                B0 += x2 * x2
                C0 += x1 * x2
            s1 = u[j] - u[i]
            s2 = u[k] - u[i]
            a = A0 + s1 * s1
            b = B0 + s2 * s2
            c = C0 + s1 * s2
            G = a * b - c * c
            if G < 1e-300:
                G = 1e-300
            r = np.sqrt(G)
            total += 0.5 * r
            G1 = 2.0 * s1 * b - 2.0 * c * s2
            G2 = 2.0 * s2 * a - 2.0 * c * s1
            A1 = G1 / (4.0 * r)
            A2 = G2 / (4.0 * r)
            g3 = 1.0 / (8.0 * G * r)
            H11 = 2.0 * B0 / (4.0 * r) - G1 * G1 * g3
            H22 = 2.0 * A0 / (4.0 * r) - G2 * G2 * g3
            H12 = -2.0 * C0 / (4.0 * r) - G1 * G2 * g3
            grad[i] += -A1 - A2
            grad[j] += A1
            grad[k] += A2
            H[f, 1, 1] = H11
            H[f, 2, 2] = H22
            H[f, 1, 2] = H12
            H[f, 2, 1] = H12
            H[f, 0, 1] = -H11 - H12
            H[f, 1, 0] = -H11 - H12
            H[f, 0, 2] = -H12 - H22
            H[f, 2, 0] = -H12 - H22
            H[f, 0, 0] = H11 + 2.0 * H12 + H22
        return total, grad, H

    @njit(cache=True)
    def graph_majorizer_blocks_numba(P, u, faces):
        nf = faces.shape[0]
        H = np.empty((nf, 3, 3))
        for f in range(nf):
            i, j, k = faces[f, 0], faces[f, 1], faces[f, 2]
            A0 = 0.0
            B0 = 0.0
            C0 = 0.0
            for d in range(3):
                x1 = P[j, d] - P[i, d]
                x2 = P[k, d] - P[i, d]
                A0 += x1 * x1
                B0 += x2 * x2
                C0 += x1 * x2
            s1 = u[j] - u[i]
            s2 = u[k] - u[i]
            G = (A0 + s1 * s1) * (B0 + s2 * s2) - (C0 + s1 * s2) ** 2
            if G < 1e-300:
                G = 1e-300
            r4 = 4.0 * np.sqrt(G)
            H11 = 2.0 * B0 / r4
            H22 = 2.0 * A0 / r4
            H12 = -2.0 * C0 / r4
            H[f, 1, 1] = H11
            H[f, 2, 2] = H22
            H[f, 1, 2] = H12
            H[f, 2, 1] = H12
            H[f, 0, 1] = -H11 - H12
            H[f, 1, 0] = -H11 - H12
            H[f, 0, 2] = -H12 - H22
            H[f, 2, 0] = -H12 - H22
            H[f, 0, 0] = H11 + 2.0 * H12 + H22
        return H

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False
    chordal_area_gradient_numba = chordal_area_gradient_numpy
    face_areas_numba = face_areas_numpy
    graph_area_derivs_numba = graph_area_derivs_numpy
    graph_majorizer_blocks_numba = graph_majorizer_blocks_numpy


def _pick(numba_fn, numpy_fn):
    if _config.USE_NUMBA and HAVE_NUMBA:
        def call(*args):
            conv = []
            for a in args:
                a = np.asarray(a)
                kind = np.int64 if a.dtype.kind in "iub" else np.float64
                conv.append(np.ascontiguousarray(a, dtype=kind))
            return numba_fn(*conv)
        call.__name__ = numba_fn.__name__
        return call
    return numpy_fn


chordal_area_gradient = _pick(chordal_area_gradient_numba, chordal_area_gradient_numpy)
face_areas = _pick(face_areas_numba, face_areas_numpy)
graph_area_derivs = _pick(graph_area_derivs_numba, graph_area_derivs_numpy)
graph_majorizer_blocks = _pick(graph_majorizer_blocks_numba, graph_majorizer_blocks_numpy)


def backend() -> str:
    return "numba" if (_config.USE_NUMBA and HAVE_NUMBA) else "numpy"
