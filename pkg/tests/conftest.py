"""Session-scoped builders; the expensive surfaces are solved once per run."""
import math

import pytest

from conjplateau.assembly import TilingSpec, orbit_assemble, rosenberg_assemble
from conjplateau.conjugation import reconstruct_contour, solve_free_boundary
from conjplateau.plateau import solve_graph
from conjplateau.shooting import solve_general, solve_symmetric
from conjplateau.surfaces import ContourSpec

OCTANT = (math.pi / 2, math.pi / 2, math.pi / 2, 0.5)
FAMILY_A_TILDE = 0.6
LEVEL = 3


class _Family:
    def __init__(self, shot, piece, surface):
        self.shot = shot
        self.piece = piece
        self.surface = surface
        self.mesh = surface.mesh


def _symmetric_family(name, k=None, shot_level=LEVEL):
    spec = TilingSpec(name, k=k)
    alpha, _, gamma = spec.angles
    shot = solve_symmetric(gamma, alpha, FAMILY_A_TILDE, resolution=shot_level)
    piece = solve_free_boundary(shot.prism, shot.contour, resolution=LEVEL)
    return _Family(shot, piece, orbit_assemble(piece, shot.prism, spec))


@pytest.fixture(scope="session")
def octant_solution():
    return solve_graph(ContourSpec.from_values(*OCTANT), LEVEL)


@pytest.fixture(scope="session")
def octant_conjugate(octant_solution):
    contour, prism = reconstruct_contour(octant_solution)
    piece = solve_free_boundary(prism, contour, resolution=LEVEL)
    return contour, prism, piece


@pytest.fixture(scope="session")
def cube():
    return _symmetric_family("cube")


@pytest.fixture(scope="session")
def balloon2():
    return _symmetric_family("balloon", 2)


@pytest.fixture(scope="session")
def balloon3():
    # the level-3 shot misses the base-triangle tolerance; one level finer is trusted
    return _symmetric_family("balloon", 3, shot_level=LEVEL + 1)


@pytest.fixture(scope="session")
def pk3():
    shot = solve_general(3, resolution=2)
    piece = solve_free_boundary(shot.prism, shot.contour, resolution=LEVEL)
    return _Family(shot, piece, orbit_assemble(piece, shot.prism, TilingSpec("pk", k=3)))


@pytest.fixture(scope="session")
def rosenberg2_solution():
    return solve_graph(ContourSpec.from_values(math.pi / 2, math.pi / 2, math.pi / 2, 1.0), LEVEL)


@pytest.fixture(scope="session")
def rosenberg2_single(rosenberg2_solution):
    return rosenberg_assemble(rosenberg2_solution, "single")


@pytest.fixture(scope="session")
def rosenberg2_double(rosenberg2_solution):
    return rosenberg_assemble(rosenberg2_solution, "double")


@pytest.fixture(scope="session")
def rosenberg3_solution():
    return solve_graph(ContourSpec.from_values(math.pi / 2, math.pi / 2, math.pi / 3, 1.0), LEVEL)
