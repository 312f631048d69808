"""Closed-form spherical trigonometry for the hinge contour and the prism data."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DegenerateTriangleError,
    InconsistentConfigurationError,
    InputDomainError,
    NoSolutionError,
)

DEGENERATE_EXCESS = 1e-12
GENUS_INTEGRALITY_TOL = 1e-9


@dataclass(frozen=True)
class HingeSpec:
    """Two sides ``a_tilde``, ``b_tilde`` meeting at angle ``gamma``."""

    a_tilde: float
    b_tilde: float
    gamma: float

    def __post_init__(self):
        for name in ("a_tilde", "b_tilde"):
            v = getattr(self, name)
            if not (0.0 < v <= math.pi / 2 + 1e-12):
                raise InputDomainError(f"{name}={v} outside (0, pi/2]")
        if not (0.0 < self.gamma < math.pi):
            raise InputDomainError(f"gamma={self.gamma} outside (0, pi)")


@dataclass(frozen=True)
class TriangleData:
    c: float
    alpha_tilde: float  # angle at the a-side/c-side corner
    beta_tilde: float  # angle at the b-side/c-side corner
    area: float


def _acos(x):
    return math.acos(max(-1.0, min(1.0, x)))


def solve_hinge(spec: HingeSpec) -> TriangleData:
    a, b, g = spec.a_tilde, spec.b_tilde, spec.gamma
    c = _acos(math.cos(a) * math.cos(b) + math.sin(a) * math.sin(b) * math.cos(g))
    sc = math.sin(c)
    if sc < 1e-300:
        raise DegenerateTriangleError("third side has zero length")
    # alpha_tilde is opposite b, beta_tilde opposite a
    alpha = _acos((math.cos(b) - math.cos(a) * math.cos(c)) / (math.sin(a) * sc))
    beta = _acos((math.cos(a) - math.cos(b) * math.cos(c)) / (math.sin(b) * sc))
    area = alpha + beta + g - math.pi
    if area < DEGENERATE_EXCESS:
        raise DegenerateTriangleError(f"spherical excess {area:.3e} below threshold")
    # sine rule consistency
    r1 = math.sin(alpha) / math.sin(b)
    r2 = math.sin(beta) / math.sin(a)
    r3 = math.sin(g) / sc
    if max(abs(r1 - r3), abs(r2 - r3)) > 1e-8 * max(1.0, r3):
        raise DegenerateTriangleError("sine rule residual too large; ill-conditioned triangle")
    return TriangleData(c, alpha, beta, area)


def solve_from_angles(alpha: float, beta: float, gamma: float):
    """Side lengths (a, b, c) from the three angles (polar cosine rule).

    ``a`` is the side opposite ``beta`` and ``b`` the side opposite ``alpha``,
    matching :class:`HingeSpec`.
    """
    def side(opp, x, y):
        return _acos((math.cos(opp) + math.cos(x) * math.cos(y)) / (math.sin(x) * math.sin(y)))

    c = side(gamma, alpha, beta)
    b = side(alpha, beta, gamma)
    a = side(beta, alpha, gamma)
    return a, b, c


def alpha_from_delta(gamma: float, ell_delta: float) -> float:
    """Base angle of the prism from the symmetry-curve length: cos a = sin(g/2) cos l."""
    return math.acos(max(-1.0, min(1.0, math.sin(gamma / 2) * math.cos(ell_delta))))


def delta_from_alpha(gamma: float, alpha: float) -> float:
    x = math.cos(alpha) / math.sin(gamma / 2)
    if abs(x) > 1.0 + 1e-12:
        raise NoSolutionError(f"alpha={alpha} unreachable for gamma={gamma}")
    return math.acos(max(-1.0, min(1.0, x)))


def right_triangle_from_hypotenuse(hyp: float, apex: float):
    """Right triangle with hypotenuse ``hyp`` and angle ``apex`` at one end.

    Returns (leg adjacent to the apex, angle opposite that leg) via Napier's
    rules; used as an independent check of the isosceles median relations.
    """
    leg = math.atan(math.tan(hyp) * math.cos(apex))
    other = math.atan2(1.0, math.cos(hyp) * math.tan(apex))
    return leg, other


def edge23_length(a_tilde: float, gamma: float) -> float:
    """Base length of the isosceles hinge triangle with legs ``a_tilde``."""
    cot = 1.0 / math.tan(gamma / 2)
    return 2.0 * math.atan(math.sin(a_tilde) / math.sqrt(cot * cot + math.cos(a_tilde) ** 2))


def genus_from_copies(m: int, gamma: float) -> int:
    if int(m) != m or m <= 0:
        raise InputDomainError("m must be a positive integer")
    g = 1.0 + m * (math.pi - gamma) / (4.0 * math.pi)
    gi = round(g)
    if abs(g - gi) > GENUS_INTEGRALITY_TOL:
        raise InconsistentConfigurationError(
            f"{m} copies with gamma={gamma} give non-integral genus {g}"
        )
    return int(gi)


def genus_fraction(m: int, gamma_over_pi: Fraction) -> Fraction:
    """Exact rational version for gamma given as a fraction of pi."""
    return 1 + Fraction(m) * (1 - Fraction(gamma_over_pi)) / 4


def spherical_triangle_area(p, q, r) -> float:
    """Signed-free area of the geodesic triangle with unit-vector vertices."""
    import numpy as np

    p, q, r = (np.asarray(v, dtype=float) for v in (p, q, r))
    num = abs(np.dot(p, np.cross(q, r)))
    den = 1.0 + p @ q + q @ r + r @ p
    return float(2.0 * math.atan2(num, den))
