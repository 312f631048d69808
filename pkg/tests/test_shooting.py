import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjplateau.errors import InputDomainError, NoSolutionError
from conjplateau.shooting import (
    ALPHA_TOL,
    GENERAL_TOL,
    clear_cache,
    eval_f,
    evaluation_log,
    jordan_rectangle,
    solve_symmetric,
    winding_number,
)
from conjplateau.sphtrig import delta_from_alpha


def _circle(centre, radius, n, turns=1):
    t = np.linspace(0, 2 * math.pi * turns, n * turns, endpoint=False)
    return np.column_stack([centre[0] + radius * np.cos(t), centre[1] + radius * np.sin(t)])


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 0.9), st.floats(-math.pi, math.pi), st.sampled_from([-2, -1, 1, 2]))
def test_winding_number_of_circles(r, phi, turns):
    x, y = r * math.cos(phi), r * math.sin(phi)
    loop = _circle((0.0, 0.0), 1.0, 64, abs(turns))
    if turns < 0:
        loop = loop[::-1]
    assert winding_number(loop, (x, y)) == turns


def test_winding_outside_and_aliased():
    loop = _circle((0.0, 0.0), 1.0, 64)
    assert winding_number(loop, (3.0, 0.0)) == 0
    # four samples around a nearby target cannot resolve the turning
    assert winding_number(_circle((0.0, 0.0), 1.0, 4), (0.6, 0.6)) is None


def test_jordan_rectangle():
    assert jordan_rectangle(4) == (0.5, math.pi / 2, 1 / 8, math.pi / 4)
    with pytest.raises(InputDomainError):
        jordan_rectangle(2)


def test_eval_f_is_logged_and_cached():
    clear_cache()
    r1 = eval_f(0.5, math.pi / 2, math.pi / 2, math.pi / 2, 2)
    r2 = eval_f(0.5, math.pi / 2, math.pi / 2, math.pi / 2, 2)
    assert r1.solution is r2.solution
    log = evaluation_log()
    assert len(log) == 2 and log[0]["alpha"] == r1.alpha
    assert r1.trusted and r1.diagnostics["violations"] == ""
    assert set(r1.as_dict()) >= {"h_tilde", "a_tilde", "b_tilde", "alpha", "beta", "h", "trusted"}


def test_symmetric_cube_shot(cube):
    shot = cube.shot
    assert shot.trusted
    assert abs(shot.alpha - math.pi / 3) < ALPHA_TOL
    assert shot.diagnostics["eq2_residual"] < 2e-3
    # the symmetry curve reaches the length the base-triangle relation assigns
    assert shot.diagnostics["symmetry_length"] == pytest.approx(delta_from_alpha(math.pi / 2, math.pi / 3), abs=3e-3)
    assert shot.params[1] == shot.params[2] == 0.6


def test_symmetric_infeasible_target():
    # with a~ = pi/2 the hinge median already exceeds the required length
    with pytest.raises(NoSolutionError):
        solve_symmetric(math.pi / 2, math.pi / 3, math.pi / 2, resolution=2)
    with pytest.raises(InputDomainError):
        solve_symmetric(math.pi / 2, math.pi / 3, 2.0, resolution=2)


def test_general_shot_k3(pk3):
    shot = pk3.shot
    d = shot.diagnostics
    assert abs(d["winding"]) == 1
    assert abs(d["certificate_winding"]) >= 1
    assert max(d["alpha_error"], d["beta_error"]) < GENERAL_TOL
    a0, a1, b0, b1 = jordan_rectangle(3)
    _, a_t, b_t = shot.params
    assert a0 <= a_t <= a1 and b0 <= b_t <= b1
    assert shot.gamma == pytest.approx(math.pi / 2)
