import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjplateau.errors import InputDomainError
from conjplateau.manifold import (
    XI,
    Isometry,
    ProdPoint,
    ProdVector,
    SpherePoint,
    apply_isometry,
    curvature_tensor,
    prod_distance,
    ricci,
    sphere_distance,
    sphere_geodesic,
)

finite = st.floats(min_value=-1.0, max_value=1.0)
vec3 = st.tuples(finite, finite, finite).filter(lambda v: np.linalg.norm(v) > 0.1)
heights = st.floats(min_value=-5.0, max_value=5.0)
angle = st.floats(min_value=-math.pi, max_value=math.pi)


def _iso(draw):
    kind = draw(st.integers(0, 5))
    axis = draw(vec3)
    if kind == 0:
        return Isometry.sphere_rotation(axis, draw(angle))
    if kind == 1:
        return Isometry.vertical_translation(draw(heights))
    if kind == 2:
        return Isometry.slice_reflection(draw(heights))
    if kind == 3:
        return Isometry.vertical_plane_reflection(axis)
    if kind == 4:
        return Isometry.vertical_geodesic_rotation(axis)
    return Isometry.horizontal_geodesic_rotation(axis, draw(heights))


isometries = st.composite(lambda draw: _iso(draw))()
points = st.builds(lambda v, t: ProdPoint(SpherePoint(v), t), vec3, heights)


def test_sphere_distance_cases():
    e1, e2 = np.eye(3)[0], np.eye(3)[1]
    assert sphere_distance(e1, e2) == pytest.approx(math.pi / 2, abs=1e-15)
    assert sphere_distance(e1, -e1) == pytest.approx(math.pi, abs=1e-15)
    assert sphere_distance(e1, e1) == 0.0
    # tiny angle keeps relative precision
    q = np.array([math.cos(1e-9), math.sin(1e-9), 0.0])
    assert sphere_distance(e1, q) == pytest.approx(1e-9, rel=1e-6)


def test_geodesic_walk():
    e1, e2 = np.eye(3)[0], np.eye(3)[1]
    q = sphere_geodesic(e1, e2, math.pi / 2)
    np.testing.assert_allclose(q.coords, e2, atol=1e-15)
    with pytest.raises(InputDomainError):
        sphere_geodesic(e1, e1, 1.0)
    with pytest.raises(InputDomainError):
        sphere_geodesic(e1, 2 * e2, 1.0)


def test_product_distance_is_pythagorean():
    x = ProdPoint(SpherePoint([1, 0, 0]), 0.0)
    y = ProdPoint(SpherePoint([0, 1, 0]), 2.0)
    assert prod_distance(x, y) == pytest.approx(math.hypot(math.pi / 2, 2.0))


def test_tangency_enforced():
    with pytest.raises(InputDomainError):
        ProdVector(SpherePoint([0, 0, 1]), [0, 0, 1.0], 0.0)
    with pytest.raises(InputDomainError):
        SpherePoint([0, 0, 0])
    with pytest.raises(InputDomainError):
        SpherePoint([np.nan, 0, 1])


def test_isometry_validation():
    with pytest.raises(InputDomainError):
        Isometry("shear")
    with pytest.raises(InputDomainError):
        Isometry("composite", np.diag([1.0, 1.0, 2.0]))
    with pytest.raises(InputDomainError):
        Isometry("composite", np.eye(3), 0.5)
    with pytest.raises(InputDomainError):
        apply_isometry("not an isometry", ProdPoint(SpherePoint([1, 0, 0])))


@settings(max_examples=150, deadline=None)
@given(isometries, points, points)
def test_isometries_preserve_distance(g, x, y):
    assert prod_distance(apply_isometry(g, x), apply_isometry(g, y)) == pytest.approx(
        prod_distance(x, y), abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(isometries, isometries, points)
def test_composition_and_inverse(g, h, x):
    gh = g @ h
    direct = apply_isometry(g, apply_isometry(h, x))
    composed = apply_isometry(gh, x)
    np.testing.assert_allclose(composed.chordal(), direct.chordal(), atol=1e-10)
    back = apply_isometry(g.inverse(), apply_isometry(g, x))
    np.testing.assert_allclose(back.chordal(), x.chordal(), atol=1e-10)
    assert gh.preserves_orientation == (g.preserves_orientation == h.preserves_orientation)


@settings(max_examples=100, deadline=None)
@given(vec3, heights)
def test_involutions(axis, t0):
    x = ProdPoint(SpherePoint([0.3, -0.4, 0.5]), 1.25)
    for g in (
        Isometry.slice_reflection(t0),
        Isometry.vertical_plane_reflection(axis),
        Isometry.vertical_geodesic_rotation(axis),
        Isometry.horizontal_geodesic_rotation(axis, t0),
    ):
        np.testing.assert_allclose(apply_isometry(g @ g, x).chordal(), x.chordal(), atol=1e-10)


def test_fixed_sets():
    axis = np.array([0.0, 0.0, 1.0])
    equator = ProdPoint(SpherePoint([1.0, 0.0, 0.0]), 0.7)
    # horizontal geodesic rotation fixes its great circle at height t0 only
    g = Isometry.horizontal_geodesic_rotation(axis, 0.7)
    np.testing.assert_allclose(apply_isometry(g, equator).chordal(), equator.chordal(), atol=1e-15)
    # vertical geodesic rotation fixes the whole fiber over p0
    v = Isometry.vertical_geodesic_rotation([1.0, 0.0, 0.0])
    np.testing.assert_allclose(apply_isometry(v, equator).chordal(), equator.chordal(), atol=1e-15)
    off = ProdPoint(SpherePoint([0.0, 1.0, 0.0]), 0.7)
    np.testing.assert_allclose(apply_isometry(v, off).chordal(), [0.0, -1.0, 0.0, 0.7], atol=1e-15)
    assert v.preserves_orientation and g.preserves_orientation
    assert not Isometry.slice_reflection(0.0).preserves_orientation
    assert not Isometry.vertical_plane_reflection(axis).preserves_orientation


tangent = st.tuples(finite, finite, finite, finite)


@settings(max_examples=100, deadline=None)
@given(tangent, tangent, tangent)
def test_curvature_tensor_is_horizontal_sphere_curvature(a, b, c):
    base = SpherePoint([0.0, 0.0, 1.0])

    def vec(t):
        return ProdVector(base, [t[0], t[1], 0.0], t[2] + t[3])

    x, y, z = vec(a), vec(b), vec(c)
    out = curvature_tensor(x, y, z)
    # oracle: only horizontal parts see curvature, sectional curvature 1
    xh, yh, zh = x.horizontal, y.horizontal, z.horizontal
    expect = (yh @ zh) * xh - (xh @ zh) * yh
    np.testing.assert_allclose(out.horizontal, expect, atol=1e-12)
    assert out.vertical == pytest.approx(0.0, abs=1e-12)


def test_ricci():
    base = SpherePoint([1.0, 0.0, 0.0])
    assert ricci(XI(base)) == 0.0
    v = ProdVector(base, [0.0, 3.0, 4.0], 2.0)
    assert ricci(v) == pytest.approx(25.0)
    with pytest.raises(InputDomainError):
        v + XI(SpherePoint([0.0, 1.0, 0.0]))
