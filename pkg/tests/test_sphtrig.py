import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjplateau.errors import (
    DegenerateTriangleError,
    InconsistentConfigurationError,
    InputDomainError,
    NoSolutionError,
)
from conjplateau.sphtrig import (
    HingeSpec,
    alpha_from_delta,
    delta_from_alpha,
    edge23_length,
    genus_fraction,
    genus_from_copies,
    right_triangle_from_hypotenuse,
    solve_from_angles,
    solve_hinge,
    spherical_triangle_area,
)


def _vector_hinge(a, b, gamma):
    """Independent oracle: place the hinge on the unit sphere and measure it."""
    apex = np.array([0.0, 0.0, 1.0])
    pa = np.array([math.sin(a), 0.0, math.cos(a)])
    pb = np.array([math.sin(b) * math.cos(gamma), math.sin(b) * math.sin(gamma), math.cos(b)])

    def angle(at, p, q):
        u = p - (p @ at) * at
        v = q - (q @ at) * at
        return math.atan2(np.linalg.norm(np.cross(u, v)), u @ v)

    c = math.atan2(np.linalg.norm(np.cross(pa, pb)), pa @ pb)
    return c, angle(pa, apex, pb), angle(pb, apex, pa)


angles = st.floats(min_value=0.05, max_value=math.pi / 2)
gammas = st.floats(min_value=0.05, max_value=math.pi - 0.05)


def test_octant_hinge():
    t = solve_hinge(HingeSpec(math.pi / 2, math.pi / 2, math.pi / 2))
    assert t.c == pytest.approx(math.pi / 2, abs=1e-14)
    assert t.alpha_tilde == pytest.approx(math.pi / 2, abs=1e-14)
    assert t.beta_tilde == pytest.approx(math.pi / 2, abs=1e-14)
    assert t.area == pytest.approx(math.pi / 2, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(angles, angles, gammas)
def test_hinge_matches_vector_oracle(a, b, gamma):
    try:
        t = solve_hinge(HingeSpec(a, b, gamma))
    except DegenerateTriangleError:
        return
    c, alpha, beta = _vector_hinge(a, b, gamma)
    assert t.c == pytest.approx(c, abs=1e-9)
    # alpha_tilde sits at the end of side a (opposite b)
    assert t.alpha_tilde == pytest.approx(alpha, abs=1e-7)
    assert t.beta_tilde == pytest.approx(beta, abs=1e-7)


@settings(max_examples=200, deadline=None)
@given(angles, angles, gammas)
def test_angles_back_to_sides(a, b, gamma):
    try:
        t = solve_hinge(HingeSpec(a, b, gamma))
    except DegenerateTriangleError:
        return
    a2, b2, c2 = solve_from_angles(t.alpha_tilde, t.beta_tilde, gamma)
    assert a2 == pytest.approx(a, abs=1e-6)
    assert b2 == pytest.approx(b, abs=1e-6)
    assert c2 == pytest.approx(t.c, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(gammas, st.floats(min_value=0.0, max_value=math.pi))
def test_delta_alpha_round_trip(gamma, delta):
    alpha = alpha_from_delta(gamma, delta)
    back = delta_from_alpha(gamma, alpha)
    assert alpha_from_delta(gamma, back) == pytest.approx(alpha, abs=1e-12)


def test_known_values_for_symmetry_curve():
    # known value: gamma = pi/2, alpha = pi/3 gives length pi/4; alpha = pi/2 gives pi/2
    assert delta_from_alpha(math.pi / 2, math.pi / 3) == pytest.approx(math.pi / 4, abs=1e-15)
    for k in range(1, 8):
        assert delta_from_alpha(math.pi / k, math.pi / 2) == pytest.approx(math.pi / 2, abs=1e-15)


def test_unreachable_alpha():
    with pytest.raises(NoSolutionError):
        delta_from_alpha(math.pi / 3, 0.1)


def test_hinge_domain():
    with pytest.raises(InputDomainError):
        HingeSpec(2.0, 1.0, 1.0)
    with pytest.raises(InputDomainError):
        HingeSpec(1.0, 1.0, math.pi)


def test_degenerate_hinge():
    with pytest.raises(DegenerateTriangleError):
        solve_hinge(HingeSpec(1e-9, 1e-9, 1e-9))


@pytest.mark.parametrize(
    "m,gamma,g",
    [(48, math.pi / 2, 7)]  # known value: genus 7
    + [(8 * k, math.pi / k, 2 * k - 1) for k in range(1, 6)]  # known value: g = 2k - 1
    + [(8 * k, math.pi / 2, k + 1) for k in range(3, 7)],  # known value: genus k + 1 (gamma of the pk prism is pi/2 at C)
)
def test_genus_from_copies(m, gamma, g):
    assert genus_from_copies(m, gamma) == g


def test_genus_needs_integral_value():
    with pytest.raises(InconsistentConfigurationError):
        genus_from_copies(6, math.pi / 2)
    with pytest.raises(InputDomainError):
        genus_from_copies(0, 1.0)


def test_genus_fraction_exact():
    assert genus_fraction(48, Fraction(1, 2)) == 7
    assert genus_fraction(6, Fraction(1, 2)) == Fraction(7, 4)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.05, max_value=math.pi / 2), st.floats(min_value=0.1, max_value=math.pi - 0.1))
def test_edge23_is_base_of_isosceles_hinge(a, gamma):
    assert edge23_length(a, gamma) == pytest.approx(solve_hinge(HingeSpec(a, a, gamma)).c, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.05, max_value=1.5), st.floats(min_value=0.05, max_value=1.5))
def test_hinge_median_is_right_triangle_leg(a, half_gamma):
    # the median from the apex of an isosceles hinge splits it into two right triangles
    leg, _ = right_triangle_from_hypotenuse(a, half_gamma)
    p = np.array([math.sin(a), 0.0, math.cos(a)])
    q = np.array([math.sin(a) * math.cos(2 * half_gamma), math.sin(a) * math.sin(2 * half_gamma), math.cos(a)])
    mid = (p + q) / np.linalg.norm(p + q)
    assert leg == pytest.approx(math.acos(np.clip(mid[2], -1, 1)), abs=1e-9)


def test_triangle_area_matches_excess():
    t = solve_hinge(HingeSpec(1.0, 0.7, 1.1))
    apex = np.array([0.0, 0.0, 1.0])
    pa = np.array([math.sin(1.0), 0.0, math.cos(1.0)])
    pb = np.array([math.sin(0.7) * math.cos(1.1), math.sin(0.7) * math.sin(1.1), math.cos(0.7)])
    assert spherical_triangle_area(apex, pa, pb) == pytest.approx(t.area, abs=1e-12)
