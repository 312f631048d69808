import math

import numpy as np
import pytest

from conjplateau.conjugation import (
    alpha_gauss_bonnet,
    projected_domain_area,
    reconstruct_contour,
    solve_free_boundary,
    verify_conjugate,
)
from conjplateau.errors import EmbeddednessError, ReconstructionError
from conjplateau.manifold import sphere_distance
from conjplateau.sphtrig import edge23_length


def test_octant_prism_invariants(octant_solution, octant_conjugate):
    contour, prism, _ = octant_conjugate
    assert contour.closure_residual < contour.closure_tol
    assert prism.gamma == pytest.approx(math.pi / 2)
    assert prism.alpha == pytest.approx(prism.beta, abs=1e-9)  # mirror symmetry
    assert prism.alpha > prism.alpha_tilde and prism.beta > prism.beta_tilde
    assert prism.h <= edge23_length(math.pi / 2, math.pi / 2)
    assert prism.check(edge23_length(math.pi / 2, math.pi / 2)) == []
    # conjugate height is the vertical flux through the bottom edge
    assert prism.h == pytest.approx(abs(octant_solution.fluxes["23"]), rel=1e-12)


def test_walls_meet_at_gamma(octant_conjugate):
    contour, prism, _ = octant_conjugate
    assert contour.corner_angles["C"] == pytest.approx(prism.gamma, abs=5e-3)
    A, B, C = (prism.vertices[k] for k in "ABC")
    for key, (p, q) in {"23": (A, B), "45": (B, C), "51": (C, A)}.items():
        n = prism.wall_circles[key]
        assert abs(n @ p) < 1e-9 and abs(n @ q) < 1e-9


def test_wall_curves_stay_on_their_circles(octant_conjugate):
    contour, prism, _ = octant_conjugate
    for key, wall in contour.wall_curves.items():
        assert np.max(np.abs(wall["points"] @ prism.wall_circles[key])) < 1e-9
        # horizontal progress equals the integral of the angle function
        step = sphere_distance(wall["points"][0], wall["points"][-1])
        assert step == pytest.approx(wall["x"][-1], abs=1e-9)


def test_gauss_bonnet_recovers_prism_angle(octant_conjugate):
    contour, prism, _ = octant_conjugate
    ga, gb = alpha_gauss_bonnet(contour, prism)
    assert ga == pytest.approx(prism.alpha, abs=5 * contour.closure_residual + 1e-9)
    assert gb == pytest.approx(prism.beta, abs=5 * contour.closure_residual + 1e-9)


def test_strict_closure(octant_solution):
    with pytest.raises(ReconstructionError):
        reconstruct_contour(octant_solution, closure_tol=1e-12)
    contour, _ = reconstruct_contour(octant_solution, closure_tol=1e-12, strict=False)
    assert contour.closure_residual > 1e-12


def test_projected_domain_is_inside_prism(octant_conjugate):
    contour, prism, _ = octant_conjugate
    from conjplateau.sphtrig import spherical_triangle_area

    tri = spherical_triangle_area(*(prism.vertices[k] for k in "ABC"))
    assert 0 < projected_domain_area(contour) < tri


def test_piece_matches_source(octant_solution, octant_conjugate):
    _, prism, piece = octant_conjugate
    report = verify_conjugate(octant_solution, piece, prism)
    # the conjugate is isometric: same area and same angle-function distribution
    assert report.area_mismatch < 0.01
    assert report.nu_distance < 0.02
    # wall vertices sit on their great circles and the piece meets the slices vertically
    assert report.planarity < 1e-9
    assert report.slice_orthogonality < 0.05
    assert report.curvature_target == pytest.approx(-math.pi / 2)


def test_piece_is_inside_slab(octant_conjugate):
    _, prism, piece = octant_conjugate
    assert piece.heights.min() >= -1e-9
    assert piece.heights.max() <= prism.h + 1e-9


def test_embeddedness_violation_detected(octant_conjugate):
    contour, prism, _ = octant_conjugate
    from dataclasses import replace

    centre = sum(prism.vertices.values())
    shrunk = {k: (0.7 * v + 0.3 * centre / np.linalg.norm(centre)) for k, v in prism.vertices.items()}
    squeezed = replace(prism, vertices={k: v / np.linalg.norm(v) for k, v in shrunk.items()})
    # the walls of the smaller prism cut through the piece
    with pytest.raises(EmbeddednessError):
        solve_free_boundary(squeezed, contour, resolution=2)
