"""Compact embedded minimal surfaces in S^2 x S^1(r) by the conjugate Plateau method.

The pipeline runs in this order.

1. Spherical trigonometry of the hinge (:mod:`sphtrig`).
2. A discrete Plateau solution over a geodesic pentagon (:mod:`plateau`).
3. Its conjugate piece inside a vertical prism (:mod:`conjugation`).
4. Parameter searches for the right prism angles (:mod:`shooting`).
5. Reflection orbits sewn into a closed mesh (:mod:`assembly`).
6. Topological checks (:mod:`topology`).

Set ``CONJPLATEAU_DISABLE_NUMBA=1`` before import to run the pure-numpy kernels.
"""
from .errors import ConjPlateauError
from .manifold import Isometry, ProdPoint, ProdVector, SpherePoint
from .mesh import SurfaceMesh
from .sphtrig import HingeSpec, TriangleData, genus_from_copies, solve_hinge
from .surfaces import ContourSpec, build_contour, cylinder_mesh, helicoid_mesh, slice_mesh
from .plateau import PlateauSolution, solve_graph
from .conjugation import PrismData, reconstruct_contour, solve_free_boundary, verify_conjugate
from .shooting import ShotResult, solve_general, solve_symmetric
from .assembly import AssembledSurface, TilingSpec, genus_consistency, orbit_assemble, rosenberg_assemble
from .topology import TopologyReport, topology_report

__version__ = "0.1.0"

__all__ = [
    "ConjPlateauError",
    "Isometry",
    "ProdPoint",
    "ProdVector",
    "SpherePoint",
    "SurfaceMesh",
    "HingeSpec",
    "TriangleData",
    "genus_from_copies",
    "solve_hinge",
    "ContourSpec",
    "build_contour",
    "cylinder_mesh",
    "helicoid_mesh",
    "slice_mesh",
    "PlateauSolution",
    "solve_graph",
    "PrismData",
    "reconstruct_contour",
    "solve_free_boundary",
    "verify_conjugate",
    "ShotResult",
    "solve_general",
    "solve_symmetric",
    "AssembledSurface",
    "TilingSpec",
    "genus_consistency",
    "orbit_assemble",
    "rosenberg_assemble",
    "TopologyReport",
    "topology_report",
]
