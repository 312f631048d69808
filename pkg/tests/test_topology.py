import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjplateau.errors import AuditError, InputDomainError, NotApplicableError
from conjplateau.manifold import Isometry
from conjplateau.mesh import SurfaceMesh
from conjplateau.surfaces import cylinder_mesh, helicoid_mesh, slice_mesh
from conjplateau.topology import (
    TopologyReport,
    euler_characteristic,
    genus_of,
    geodesic_companions,
    intersection_check,
    is_slice_like,
    orient,
    orientability,
    poincare_hopf_audit,
    separation_parity,
    topology_report,
)

R = 0.5
PERIOD = 2 * math.pi * R


@pytest.fixture(scope="module")
def torus():
    # one half-turn of the helicoid per period closes up as a torus
    return helicoid_mesh(PERIOD, R, 4)


@pytest.fixture(scope="module")
def klein():
    # a pitch of two periods closes after a half-turn: a Klein bottle
    return helicoid_mesh(2 * PERIOD, R, 4)


# ---------------------------------------------------------------- combinatorics


def test_reference_characteristics(torus, klein):
    assert euler_characteristic(torus) == 0 and orientability(torus) is True
    assert euler_characteristic(klein) == 0 and orientability(klein) is False
    s = slice_mesh(0.0, 4)
    assert euler_characteristic(s) == 2 and orientability(s) is True
    assert genus_of(0, True) == 1 and genus_of(0, False) == 2 and genus_of(-12, True) == 7


def test_orient_makes_edges_opposite(torus):
    shuffled = torus.faces.copy()
    flip = np.random.default_rng(0).random(len(shuffled)) < 0.5
    shuffled[flip] = shuffled[flip][:, ::-1]
    res = orient(torus.copy(faces=shuffled))
    assert res.orientable
    F = res.faces
    directed = np.concatenate([F[:, [0, 1]], F[:, [1, 2]], F[:, [2, 0]]])
    assert len({tuple(e) for e in directed.tolist()}) == len(directed)


def test_non_manifold_edge_rejected():
    P = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, -1], [-1, 0, 0]], dtype=float)
    m = SurfaceMesh(P, np.zeros(5), [[0, 1, 2], [0, 1, 3], [0, 1, 4]])
    with pytest.raises(InputDomainError):
        euler_characteristic(m)


def _moved(mesh, g, perm, flips):
    P, H = g.apply(mesh.points, mesh.heights)
    inv = np.argsort(perm)
    F = inv[mesh.faces]
    F[flips] = F[flips][:, ::-1]
    return SurfaceMesh(P[perm], H[perm], F, period=mesh.period)


isometry = st.builds(
    lambda ax, ang, t, refl: Isometry.sphere_rotation(ax, ang)
    @ (Isometry.slice_reflection(t) if refl else Isometry.vertical_translation(t)),
    st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.2, 1)),
    st.floats(-math.pi, math.pi),
    st.floats(0, PERIOD),
    st.booleans(),
)


@settings(max_examples=15, deadline=None)
@given(isometry, st.integers(0, 2**32 - 1), st.sampled_from([True, False]))
def test_invariants_under_isometry_and_relabelling(g, seed, use_klein):
    mesh = helicoid_mesh((2 if use_klein else 1) * PERIOD, R, 3)
    rng = np.random.default_rng(seed)
    moved = _moved(mesh, g, rng.permutation(mesh.n_vertices), rng.random(mesh.n_faces) < 0.3)
    assert euler_characteristic(moved) == euler_characteristic(mesh)
    assert orientability(moved) == orientability(mesh)
    assert separation_parity(moved, 16) == separation_parity(mesh, 16)


# ---------------------------------------------------------------- separation and intersection


def test_separation_on_references(torus, klein):
    assert separation_parity(torus) is True
    even, counts = separation_parity(klein, return_counts=True)
    assert even is False and all(c % 2 == 1 for c in counts)
    with pytest.raises(InputDomainError):
        separation_parity(slice_mesh(0.0, 4))


def test_slices():
    s = slice_mesh(0.0, 3).copy(period=PERIOD)
    assert is_slice_like(s)
    assert separation_parity(s) is False  # one crossing per fiber, excluded from the statement
    with pytest.raises(NotApplicableError):
        poincare_hopf_audit(s)
    rep = topology_report(s)
    assert rep.slice_excluded and rep.ph_sum is None


def test_intersections(torus):
    s0 = slice_mesh(0.0, 3).copy(period=PERIOD)
    s1 = slice_mesh(PERIOD / 4, 3).copy(period=PERIOD)
    assert intersection_check(s0, s1) is False
    assert intersection_check(torus, cylinder_mesh([0, 0, 1], R, 4)) is True
    with pytest.raises(InputDomainError):
        intersection_check(s0, slice_mesh(0.0, 3).copy(period=1.0))


def test_torus_has_no_index_zeros(torus):
    audit = poincare_hopf_audit(torus)
    assert audit.count == 0 and audit.sum == 0 and audit.uncaptured == 0


def test_companions_on_references(torus):
    rep = geodesic_companions(torus)
    assert rep.passed
    assert len(rep.fibers) == 2 and len(rep.circles) == 6


# ---------------------------------------------------------------- report


def test_report_round_trip(torus):
    rep = topology_report(torus, other=cylinder_mesh([0, 0, 1], R, 4))
    back = TopologyReport.from_text(rep.to_text())
    assert back == rep
    assert rep.intersects is True and rep.genus == 1


def test_report_rejects_odd_orientable():
    with pytest.raises(AuditError):
        TopologyReport(chi=-3, orientable=True, genus=2, separates=True, ph_zeros=[], ph_sum=-3)


# ---------------------------------------------------------------- assembled surfaces


def test_cube_topology(cube):
    m = cube.mesh
    assert orientability(m) is True
    assert separation_parity(m) is True
    audit = poincare_hopf_audit(m)
    assert audit.count == 12 and set(audit.indices) == {-1}
    assert audit.sum == euler_characteristic(m) == -12
    assert audit.uncaptured == 0


@pytest.mark.parametrize("name,zeros,index", [("balloon2", 4, -1), ("balloon3", 4, -2), ("pk3", 6, -1)])
def test_family_index_sums(request, name, zeros, index):
    m = request.getfixturevalue(name).mesh
    audit = poincare_hopf_audit(m)
    assert audit.count == zeros and set(audit.indices) == {index}
    assert audit.sum == euler_characteristic(m)
    assert separation_parity(m) is True


def test_rosenberg_topology(rosenberg2_single, rosenberg2_double):
    one, two = rosenberg2_single.mesh, rosenberg2_double.mesh
    assert orientability(one) is False and orientability(two) is True
    even, counts = separation_parity(one, return_counts=True)
    assert not even and set(counts) == {1}
    assert separation_parity(two) is True
    for m in (one, two):
        audit = poincare_hopf_audit(m)
        assert audit.sum == euler_characteristic(m)
    rep = geodesic_companions(two)
    assert rep.passed and len(rep.fibers) == 4 and len(rep.circles) == 6
