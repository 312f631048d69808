"""Time the numba kernels against their numpy twins on Plateau domain meshes.

    python3 benchmarks/bench_kernels.py --levels 3 4 5 --repeat 5

Both backends live in the same process: the numba twins are called through
the same argument coercion the dispatcher uses.  Results are checked for
agreement before timings are printed.
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from conjplateau import kernels
from conjplateau.plateau import build_domain_mesh
from conjplateau.surfaces import ContourSpec


def _coerce(args):
    out = []
    for a in args:
        a = np.asarray(a)
        kind = np.int64 if a.dtype.kind in "iub" else np.float64
        out.append(np.ascontiguousarray(a, dtype=kind))
    return out


def _problem(level, seed=0):
    spec = ContourSpec.from_values(1.2, 1.2, math.pi / 2, 0.4)
    dom = build_domain_mesh(spec, level)
    P = np.asarray(dom.points, dtype=float)
    F = np.asarray(dom.faces, dtype=np.int64)
    rng = np.random.default_rng(seed)
    u = 0.4 * rng.random(len(P))
    X = np.column_stack([P, u])[F].reshape(-1, 4)
    Fx = np.arange(len(X), dtype=np.int64).reshape(-1, 3)
    return {"P": P, "F": F, "u": u, "X": X, "Fx": Fx}


CASES = {
    "face_areas": (kernels.face_areas_numba, kernels.face_areas_numpy, lambda d: (d["X"], d["Fx"])),
    "chordal_area_gradient": (
        kernels.chordal_area_gradient_numba, kernels.chordal_area_gradient_numpy, lambda d: (d["X"], d["Fx"])),
    "graph_area_derivs": (
        kernels.graph_area_derivs_numba, kernels.graph_area_derivs_numpy, lambda d: (d["P"], d["u"], d["F"])),
    "graph_majorizer_blocks": (
        kernels.graph_majorizer_blocks_numba, kernels.graph_majorizer_blocks_numpy, lambda d: (d["P"], d["u"], d["F"])),
}


def _best_of(fn, args, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _flatten(res):
    if isinstance(res, tuple):
        return np.concatenate([np.ravel(np.asarray(r, dtype=float)) for r in res])
    return np.ravel(np.asarray(res, dtype=float))


def run(levels, repeat):
    rows = []
    for level in levels:
        d = _problem(level)
        for name, (fast, slow, pick) in CASES.items():
            args = _coerce(pick(d))
            a, b = _flatten(fast(*args)), _flatten(slow(*args))  # also triggers compilation
            err = float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b))))
            t_fast = _best_of(fast, args, repeat)
            t_slow = _best_of(slow, args, repeat)
            rows.append((level, len(d["F"]), name, t_slow, t_fast, t_slow / t_fast, err))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--repeat", type=int, default=5)
    ns = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        print("numba is not importable; only the numpy kernels exist")
        return
    print(f"{'level':>5} {'faces':>7} {'kernel':<24} {'numpy s':>10} {'numba s':>10} {'speedup':>8} {'rel err':>9}")
    for level, nf, name, ts, tf, sp, err in run(ns.levels, ns.repeat):
        print(f"{level:>5} {nf:>7} {name:<24} {ts:>10.5f} {tf:>10.5f} {sp:>8.1f} {err:>9.1e}")


if __name__ == "__main__":
    main()
