"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Criterion 8 (a visual comparison against published figures) has no automated
check and is excluded.
"""
import math
import time

import numpy as np
import pytest

from conjplateau.conjugation import (
    alpha_gauss_bonnet,
    reconstruct_contour,
    solve_free_boundary,
    verify_conjugate,
)
from conjplateau.errors import ConjPlateauError
from conjplateau.plateau import measure_normal_rotation_mesh_only, residual_rms, solve_graph
from conjplateau.shooting import solve_symmetric
from conjplateau.sphtrig import alpha_from_delta, delta_from_alpha, edge23_length
from conjplateau.surfaces import ContourSpec, cylinder_mesh, helicoid_mesh, slice_mesh
from conjplateau.topology import (
    euler_characteristic,
    genus_of,
    geodesic_companions,
    intersection_check,
    orientability,
    poincare_hopf_audit,
    separation_parity,
)

P2 = math.pi / 2
P3 = math.pi / 3


def _report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} {detail}")


# ---------------------------------------------------------------- 1


def test_criterion_1_base_triangle_relation(capsys):
    worst = 0.0
    for gamma in np.linspace(0.2, math.pi - 0.2, 9):
        lo = math.acos(math.sin(gamma / 2))  # alpha at zero length
        for alpha in np.linspace(lo + 1e-3, math.pi / 2, 9):
            back = alpha_from_delta(gamma, delta_from_alpha(gamma, alpha))
            worst = max(worst, abs(back - alpha))
    known = [
        abs(delta_from_alpha(P2, P3) - math.pi / 4),
        *(abs(delta_from_alpha(math.pi / k, P2) - P2) for k in (2, 3, 4, 5)),
    ]
    ok = worst < 1e-12 and max(known) < 1e-12
    _report(capsys, 1, ok, f"round trip {worst:.1e}, known values {max(known):.1e}")
    assert ok


# ---------------------------------------------------------------- 2


def _slope(meshes):
    h = [m.mean_edge_length() for m in meshes]
    r = [residual_rms(m) for m in meshes]
    return float(np.polyfit(np.log(h), np.log(r), 1)[0])


def test_criterion_2_residual_convergence(capsys):
    t0 = time.time()
    slopes = {
        "slice": _slope([slice_mesh(0.3, n, warp=0.05) for n in (8, 16, 32)]),
        "cylinder": _slope([cylinder_mesh([0, 0, 1], 0.5, n, warp=0.05) for n in (16, 32, 64)]),
        "helicoid": _slope([helicoid_mesh(math.pi, 0.5, n) for n in (8, 16, 32)]),
    }
    elapsed = time.time() - t0
    ok = all(1.6 <= s <= 2.4 for s in slopes.values()) and elapsed < 60
    text = " ".join(f"{k}={v:.2f}" for k, v in slopes.items())
    _report(capsys, 2, ok, f"slopes {text}, {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------- 3

# octant, the contours hit by the family shots, Rosenberg bases and two generic hinges
CRITERION_3_CONTOURS = [
    (P2, P2, P2, 0.5),
    (0.6, 0.6, P2, 0.5685),
    (0.6, 0.6, P2, 1.367),
    (0.6, 0.6, P3, 1.2394),
    (1.5671, 1.0424, P2, 0.1),
    (P2, P2, P2, 1.0),
    (P2, P2, P3, 1.0),
    (1.0, 0.7, 1.2, 0.4),
    (1.4, 0.4, 2.5, 0.6),
]


def _criterion_3_failures(cfg):
    t0 = time.time()
    sol = solve_graph(ContourSpec.from_values(*cfg), 3)
    contour, prism = reconstruct_contour(sol, strict=False)
    bad = []
    turn = abs(measure_normal_rotation_mesh_only(sol, "12"))
    rel = abs(turn - prism.alpha_tilde) / prism.alpha_tilde
    if rel > 0.02:
        bad.append(f"rotation off by {rel:.2%}")
    if not (prism.alpha > prism.alpha_tilde and prism.beta > prism.beta_tilde):
        bad.append("base angles not above the hinge angles")
    over = prism.h - edge23_length(cfg[0], cfg[2])
    if over > 0.0:
        bad.append(f"h exceeds the edge-23 length by {over:.1e}")
    ga, _ = alpha_gauss_bonnet(contour, prism)
    if abs(ga - prism.alpha) > 5 * contour.closure_tol:
        bad.append(f"Gauss-Bonnet gap {abs(ga - prism.alpha):.1e}")
    if time.time() - t0 > 300:
        bad.append("over 5 min")
    return bad


def test_criterion_3_conjugate_prism(capsys):
    failures = {}
    for cfg in CRITERION_3_CONTOURS:
        bad = _criterion_3_failures(cfg)
        if bad:
            failures[tuple(round(x, 4) for x in cfg)] = bad
    ok = not failures
    detail = "; ".join(f"{k}: {', '.join(v)}" for k, v in failures.items())
    _report(capsys, 3, ok, f"{len(CRITERION_3_CONTOURS) - len(failures)}/{len(CRITERION_3_CONTOURS)} contours {detail}")
    assert ok, failures


# ---------------------------------------------------------------- 4

CRITERION_4_TARGETS = [("cube", P2, P3), ("balloon k=2", P2, P2), ("balloon k=3", P3, P2)]
CRITERION_4_A_TILDE = [0.3, 0.6, 0.9, 1.2, P2]


def test_criterion_4_symmetric_shooting(capsys):
    t0 = time.time()
    failures = []
    for name, gamma, alpha in CRITERION_4_TARGETS:
        for a_tilde in CRITERION_4_A_TILDE:
            try:
                shot = solve_symmetric(gamma, alpha, a_tilde, resolution=4)
            except ConjPlateauError as exc:
                failures.append(f"{name} a~={a_tilde:.3f}: {type(exc).__name__}")
                continue
            d = shot.diagnostics
            if d["alpha_error"] >= 1e-3 or d["eq2_residual"] >= 2e-3:
                failures.append(f"{name} a~={a_tilde:.3f}: alpha err {d['alpha_error']:.1e}, "
                                f"relation residual {d['eq2_residual']:.1e}")
    elapsed = time.time() - t0
    if elapsed > 900:
        failures.append(f"took {elapsed:.0f}s")
    ok = not failures
    total = len(CRITERION_4_TARGETS) * len(CRITERION_4_A_TILDE)
    _report(capsys, 4, ok, f"{total - len(failures)}/{total} cases in {elapsed:.0f}s; " + "; ".join(failures))
    assert ok, failures


# ---------------------------------------------------------------- 5


def test_criterion_5_assemblies(request, capsys):
    t0 = time.time()
    cube = request.getfixturevalue("cube")
    b2, b3 = request.getfixturevalue("balloon2"), request.getfixturevalue("balloon3")
    pk3 = request.getfixturevalue("pk3")
    single = request.getfixturevalue("rosenberg2_single")
    double = request.getfixturevalue("rosenberg2_double")
    elapsed = time.time() - t0

    def top(m):
        return euler_characteristic(m), orientability(m)

    checks = {
        "cube": cube.mesh.is_watertight() and cube.surface.copies == 48 and top(cube.mesh) == (-12, True),
        "balloon2": top(b2.mesh) == (-4, True),
        "balloon3": top(b3.mesh) == (-8, True),
        "pk3": top(pk3.mesh) == (-6, True) and abs(pk3.shot.diagnostics["winding"]) == 1,
        "rosenberg single": top(single.mesh) == (-2, False) and genus_of(-2, False) == 4,
        "rosenberg double": top(double.mesh) == (-4, True) and genus_of(-4, True) == 3,
        "time": elapsed < 1800,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    _report(capsys, 5, ok, f"{len(checks) - len(failed)}/{len(checks)} checks, built in {elapsed:.0f}s {failed or ''}")
    assert ok, failed


# ---------------------------------------------------------------- 6


def test_criterion_6_conjugate_verification(capsys):
    spec = ContourSpec.from_values(P2, P2, P2, 0.5)
    coarse = solve_graph(spec, 3)
    fine = solve_graph(spec, 4)
    c3, _ = reconstruct_contour(coarse)
    c4, prism = reconstruct_contour(fine)
    piece = solve_free_boundary(prism, c4, resolution=4)
    rep = verify_conjugate(fine, piece, prism)
    ratio = c4.closure_residual / c3.closure_residual
    ok = rep.passed and ratio <= 0.5
    _report(capsys, 6, ok, f"area {rep.area_mismatch:.2%}, curvature {rep.curvature_mismatch:.2%}, "
                           f"normal distance {rep.nu_distance:.2%}, closure ratio {ratio:.2f}")
    assert ok


# ---------------------------------------------------------------- 7


def test_criterion_7_topology(request, capsys):
    t0 = time.time()
    conjugate = {name: request.getfixturevalue(name).mesh for name in ("cube", "balloon2", "balloon3", "pk3")}
    rosenberg = {name: request.getfixturevalue(name).mesh for name in ("rosenberg2_single", "rosenberg2_double")}
    failures = []
    for name, m in {**conjugate, **rosenberg}.items():
        if separation_parity(m) != orientability(m):
            failures.append(f"{name}: separation differs from orientability")
        audit = poincare_hopf_audit(m)
        if audit.sum != euler_characteristic(m):
            failures.append(f"{name}: index sum {audit.sum}")
        if name in conjugate and audit.count % 4:
            failures.append(f"{name}: {audit.count} zeros")
    pitch = 2 * math.pi * 0.5
    helicoid = helicoid_mesh(pitch, 0.5, 4)
    for name, m in (("helicoid", helicoid), ("balloon2", conjugate["balloon2"]), ("balloon3", conjugate["balloon3"])):
        if not geodesic_companions(m).passed:
            failures.append(f"{name}: geodesic companions")
    cube = conjugate["cube"]
    mid = slice_mesh(request.getfixturevalue("cube").shot.prism.h / 2, 3).copy(period=cube.period)
    if not intersection_check(helicoid, cylinder_mesh([0, 0, 1], 0.5, 4)):
        failures.append("helicoid misses the cylinder")
    if not intersection_check(cube, mid):
        failures.append("cube misses its middle slice")
    s0, s1 = slice_mesh(0.0, 3).copy(period=pitch), slice_mesh(pitch / 4, 3).copy(period=pitch)
    if intersection_check(s0, s1):
        failures.append("distinct slices meet")
    elapsed = time.time() - t0
    if elapsed > 600:
        failures.append(f"took {elapsed:.0f}s")
    ok = not failures
    _report(capsys, 7, ok, f"{elapsed:.0f}s; " + "; ".join(failures))
    assert ok, failures


def test_criterion_8_excluded():
    pytest.skip("criterion 8 compares renderings with published figures by eye; not automated")
