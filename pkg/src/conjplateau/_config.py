"""Global tolerances and the numba switch.

Set ``CONJPLATEAU_DISABLE_NUMBA=1`` to force the pure-numpy kernels.
"""
import os

GEOM_TOL = 1e-10
UNIT_TOL = 1e-12


def numba_enabled():
    flag = os.environ.get("CONJPLATEAU_DISABLE_NUMBA", "").strip().lower()
    if flag in ("1", "true", "yes", "on"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USE_NUMBA = numba_enabled()
