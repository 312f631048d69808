import math

import numpy as np
import pytest

from conjplateau import formats
from conjplateau.errors import FormatError
from conjplateau.surfaces import helicoid_mesh
from conjplateau.topology import topology_report


def test_mesh_round_trip_is_byte_identical(tmp_path):
    m = helicoid_mesh(math.pi, 0.5, 4)
    text = formats.write_mesh(m, tmp_path / "m.txt")
    back = formats.read_mesh(tmp_path / "m.txt")
    assert np.array_equal(back.points, m.points)
    assert np.array_equal(back.heights, m.heights)
    assert np.array_equal(back.faces, m.faces)
    assert back.period == m.period
    assert formats.write_mesh(back) == text


def test_solution_round_trip(octant_solution):
    text = formats.write_solution(octant_solution)
    back = formats.read_solution(text)
    assert formats.write_solution(back) == text
    assert back.fluxes == octant_solution.fluxes
    assert back.level == octant_solution.level
    for key, idx in octant_solution.index.items():
        assert np.array_equal(back.index[key], idx)
    tr, tr0 = back.boundary_traces["23"], octant_solution.boundary_traces["23"]
    assert np.array_equal(tr.nu, tr0.nu) and np.array_equal(tr.w, tr0.w)
    assert back.boundary_traces["12"].w is None


def test_conjugate_round_trip(octant_conjugate):
    contour, prism, _ = octant_conjugate
    text = formats.write_conjugate(contour, prism)
    c2, p2 = formats.read_conjugate(text)
    assert formats.write_conjugate(c2, p2) == text
    assert p2.alpha == prism.alpha and p2.h == prism.h
    assert np.array_equal(c2.slice_curves["12"]["points"], contour.slice_curves["12"]["points"])


def test_shot_and_log(cube):
    fields = formats.read_shot(formats.write_shot(cube.shot))
    assert fields["alpha"] == cube.shot.alpha
    assert fields["trusted"] is True
    log = formats.write_shot_log([{"h_tilde": 0.1, "alpha": 1.0}])
    assert log.startswith("SHOTLOG v1")
    assert "nan" in log


def test_report_round_trip():
    rep = topology_report(helicoid_mesh(math.pi, 0.5, 3))
    assert formats.read_report(formats.write_report(rep)) == rep


def test_obj_export():
    m = helicoid_mesh(math.pi, 0.5, 4)
    obj = formats.write_obj(m)
    v = [ln for ln in obj.splitlines() if ln.startswith("v ")]
    f = [ln for ln in obj.splitlines() if ln.startswith("f ")]
    assert len(v) == m.n_vertices
    assert 0 < len(f) <= m.n_faces
    radii = np.linalg.norm(np.array([[float(x) for x in ln.split()[1:]] for ln in v]), axis=1)
    assert np.all((radii >= 2 - 1e-7) & (radii < 3 + 1e-7))  # 9 significant digits


def test_bad_headers():
    with pytest.raises(FormatError):
        formats.read_mesh("MESH v2\n")
    with pytest.raises(FormatError):
        formats.read_mesh("PLATEAU v1\n")
    with pytest.raises(FormatError):
        formats.read_solution("PLATEAU v1\n[meta]\nlevel=1\n")
