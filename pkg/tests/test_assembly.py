import math

import numpy as np
import pytest

from conjplateau.assembly import (
    TilingSpec,
    euler_characteristic_of,
    family_generators,
    genus_consistency,
    orbit,
    orbit_assemble,
    rosenberg_assemble,
    symmetry_defect,
)
from conjplateau.errors import AssemblyError, InconsistentConfigurationError, InputDomainError
from conjplateau.manifold import Isometry
from conjplateau.plateau import solve_graph
from conjplateau.surfaces import ContourSpec


# ---------------------------------------------------------------- tiling bookkeeping


@pytest.mark.parametrize(
    "spec,copies,chi",
    [
        (TilingSpec("cube"), 48, -12),  # genus 7
        (TilingSpec("balloon", k=2), 16, -4),
        (TilingSpec("balloon", k=3), 24, -8),
        (TilingSpec("pk", k=3), 24, -6),
        (TilingSpec("pk", k=5), 40, -10),
        (TilingSpec("rosenberg", d=2), 16, -2),
        (TilingSpec("rosenberg", d=2, mode="double"), 32, -4),
        (TilingSpec("rosenberg", d=3), 24, -4),
    ],
)
def test_tiling_bookkeeping(spec, copies, chi):
    assert spec.copies == copies
    assert spec.expected_chi == chi


def test_tiling_validation():
    for bad in (dict(family="torus"), dict(family="balloon"), dict(family="pk", k=2),
                dict(family="rosenberg", d=1), dict(family="rosenberg", d=2, mode="triple")):
        with pytest.raises(InputDomainError):
            TilingSpec(**bad)
    with pytest.raises(InputDomainError):
        TilingSpec("rosenberg", d=2).angles


# ---------------------------------------------------------------- orbits


def _triangle(alpha, beta, gamma):
    """Vertices of a spherical triangle with the given angles (independent construction)."""
    from conjplateau.sphtrig import solve_from_angles

    a, b, _ = solve_from_angles(alpha, beta, gamma)
    C = np.array([0.0, 0.0, 1.0])
    A = np.array([math.sin(b), 0.0, math.cos(b)])
    B = np.array([math.sin(a) * math.cos(gamma), math.sin(a) * math.sin(gamma), math.cos(a)])
    return A, B, C


@pytest.mark.parametrize(
    "angles,size",
    [
        ((math.pi / 2, math.pi / 2, math.pi / 2), 16),  # octahedral reflections x the two slices
        ((math.pi / 3, math.pi / 3, math.pi / 2), 48),
        ((math.pi / 2, math.pi / 2, math.pi / 3), 24),
        ((math.pi / 3, math.pi / 2, math.pi / 2), 24),
    ],
)
def test_reflection_orbit_sizes(angles, size):
    # a triangle with angles pi/p, pi/q, pi/s tiles the sphere with 4 pi / area copies
    gens = family_generators(_triangle(*angles), 0.7)
    elements = orbit(gens, 1.4)
    assert len(elements) == size
    area = sum(angles) - math.pi
    assert len(elements) == pytest.approx(2 * 4 * math.pi / area)


def test_orbit_is_a_group():
    gens = family_generators(_triangle(math.pi / 2, math.pi / 2, math.pi / 3), 0.5)
    elements = orbit(gens, 1.0)
    from conjplateau.assembly import _key

    keys = {_key(g, 1.0) for g in elements}
    for g in elements[::5]:
        assert _key(g.inverse(), 1.0) in keys
        for h in elements[::7]:
            assert _key(g @ h, 1.0) in keys


def test_orbit_that_never_closes():
    with pytest.raises(AssemblyError):
        orbit([Isometry.sphere_rotation([0, 0, 1], 1.0)], 1.0, budget=10)


# ---------------------------------------------------------------- assembled families


def test_cube_surface(cube):
    s = cube.surface
    assert s.copies == 48
    assert s.mesh.is_watertight()
    assert s.seam_gap < 1e-9
    assert s.period == pytest.approx(2 * cube.shot.prism.h)
    rep = genus_consistency(s)
    assert (rep.chi, rep.genus, rep.match) == (-12, 7, True)
    for g in s.generator_log[1:48:11]:
        assert symmetry_defect(s, g) < 1e-8


def test_wrong_family_rejected(cube):
    with pytest.raises(InconsistentConfigurationError):
        orbit_assemble(cube.piece, cube.shot.prism, TilingSpec("balloon", k=2))
    with pytest.raises(InputDomainError):
        orbit_assemble(cube.piece, cube.shot.prism, TilingSpec("rosenberg", d=2))


@pytest.mark.parametrize("name,chi,genus", [("balloon2", -4, 3), ("balloon3", -8, 5), ("pk3", -6, 4)])
def test_family_genus(request, name, chi, genus):
    fam = request.getfixturevalue(name)
    rep = genus_consistency(fam.surface)
    assert (rep.chi, rep.genus) == (chi, genus)
    assert euler_characteristic_of(fam.mesh) == chi


def test_rosenberg_single_and_double(rosenberg2_single, rosenberg2_double):
    one = genus_consistency(rosenberg2_single)
    two = genus_consistency(rosenberg2_double)
    assert one.chi == -2 and two.chi == -4
    assert rosenberg2_double.copies == 2 * rosenberg2_single.copies
    assert rosenberg2_double.period == pytest.approx(2 * rosenberg2_single.period)
    # the double cover is invariant under the shift by the single period
    assert symmetry_defect(rosenberg2_double, Isometry.vertical_translation(rosenberg2_single.period)) < 1e-8


def test_rosenberg_d3(rosenberg3_solution):
    assert genus_consistency(rosenberg_assemble(rosenberg3_solution, "single")).chi == -4
    assert genus_consistency(rosenberg_assemble(rosenberg3_solution, "double")).chi == -8


def test_rosenberg_needs_right_base_angles():
    sol = solve_graph(ContourSpec.from_values(1.0, 1.0, math.pi / 2, 0.5), 1)
    with pytest.raises(InputDomainError):
        rosenberg_assemble(sol)
    sol = solve_graph(ContourSpec.from_values(math.pi / 2, math.pi / 2, 1.0, 0.5), 1)
    with pytest.raises(InputDomainError):
        rosenberg_assemble(sol)
