"""Versioned plain-text files: a header line, then ``[section]`` blocks.

A block holds either ``key=value`` lines or CSV rows under a column header.
Floats are written in their shortest exact form, so files round-trip bit for
bit and identical runs produce identical bytes.

File kinds and their sections:

``PLATEAU v1``
    second line ``spec a b gamma h``; ``[meta]`` level, residual, iterations;
    ``[vertices]`` x,y,z,t,tag; ``[faces]`` i,j,k; ``[index NAME]`` vertex ids;
    ``[trace EDGE]`` s,nu,w,theta; ``[fluxes]`` edge=value; ``[area_history]``.
``CONJUGATE v1``
    ``[prism]`` angles, h and the triangle vertices; ``[meta]`` closure data;
    ``[corners]`` x,y,z,t; ``[slice EDGE]`` x,y,z,s,kappa plus ``[slice-meta EDGE]``;
    ``[wall EDGE]`` x,y,z,s,u,t (u is the arclength along the wall circle).
``MESH v1``
    ``[meta]`` period; ``[vertices]`` x,y,z,t (t reduced mod the period), tag;
    ``[faces]`` i,j,k.
``SHOT v1``
    ``[shot]`` parameters, prism angles, trust flag and diagnostics.
``TOPOLOGY v1``
    a JSON document after the header line.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .conjugation import ConjugateContour, PrismData
from .errors import FormatError
from .manifold import ProdPoint
from .mesh import SurfaceMesh
from .plateau import BoundaryTrace, PlateauSolution
from .surfaces import ContourSpec, build_contour

VERSION = "v1"
OBJ_DIGITS = 9


def _num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _parse(s: str):
    low = s.strip().lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


class _Writer:
    def __init__(self, kind: str, extra: str | None = None):
        self.buf = io.StringIO()
        self.buf.write(f"{kind} {VERSION}\n")
        if extra:
            self.buf.write(extra + "\n")

    def keys(self, name: str, mapping: dict):
        self.buf.write(f"[{name}]\n")
        for k, v in mapping.items():
            self.buf.write(f"{k}={_num(v) if not isinstance(v, str) else v}\n")

    def table(self, name: str, columns, rows):
        self.buf.write(f"[{name}]\n")
        w = csv.writer(self.buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _num(c) for c in row])

    def text(self):
        return self.buf.getvalue()


def _read_sections(text: str, kind: str):
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != kind:
        raise FormatError(f"expected a {kind} file, found header {lines[0]!r}")
    if head[1] != VERSION:
        raise FormatError(f"unsupported {kind} version {head[1]!r}")
    extra = []
    sections: dict[str, list[str]] = {}
    cur = None
    for line in lines[1:]:
        if line.startswith("[") and line.endswith("]"):
            cur = line[1:-1]
            if cur in sections:
                raise FormatError(f"duplicate section {cur!r}")
            sections[cur] = []
        elif cur is None:
            extra.append(line)
        else:
            sections[cur].append(line)
    return extra, sections


def _as_keys(lines):
    out = {}
    for line in lines:
        if not line.strip():
            continue
        if "=" not in line:
            raise FormatError(f"malformed key-value line {line!r}")
        k, v = line.split("=", 1)
        out[k] = _parse(v)
    return out


def _as_table(lines):
    rows = list(csv.reader(lines))
    if not rows:
        raise FormatError("empty table")
    return rows[0], rows[1:]


def _floats(rows, cols):
    return np.array([[float(r[c]) for c in cols] for r in rows], dtype=float).reshape(len(rows), len(cols))


def _ints(rows):
    return np.array([[int(c) for c in r] for r in rows], dtype=np.int64)


def _need(sections, name):
    if name not in sections:
        raise FormatError(f"missing section [{name}]")
    return sections[name]


def _write(path, text):
    if path is not None:
        Path(path).write_text(text)
    return text


def _read(path_or_text):
    if isinstance(path_or_text, Path) or (isinstance(path_or_text, str) and "\n" not in path_or_text):
        return Path(path_or_text).read_text()
    return path_or_text


# ---------------------------------------------------------------- meshes


def _mesh_blocks(w: _Writer, mesh: SurfaceMesh, prefix=""):
    w.keys(prefix + "meta", {"period": "none" if mesh.period is None else mesh.period})
    tags = [t or "" for t in mesh.tags]
    rows = (tuple(p) + (t, tag) for p, t, tag in zip(mesh.points, mesh.heights, tags))
    w.table(prefix + "vertices", ["x", "y", "z", "t", "tag"], rows)
    w.table(prefix + "faces", ["i", "j", "k"], (tuple(f) for f in mesh.faces))


def _mesh_from(sections, prefix=""):
    meta = _as_keys(_need(sections, prefix + "meta"))
    period = None if meta.get("period") == "none" else float(meta["period"])
    _, vrows = _as_table(_need(sections, prefix + "vertices"))
    _, frows = _as_table(_need(sections, prefix + "faces"))
    X = _floats(vrows, range(4))
    tags = [r[4] or None for r in vrows]
    return SurfaceMesh(X[:, :3], X[:, 3], _ints(frows).reshape(-1, 3), tags=tags, period=period)


def write_mesh(mesh: SurfaceMesh, path=None) -> str:
    w = _Writer("MESH")
    _mesh_blocks(w, mesh)
    return _write(path, w.text())


def read_mesh(path_or_text) -> SurfaceMesh:
    _, sec = _read_sections(_read(path_or_text), "MESH")
    return _mesh_from(sec)


def write_obj(mesh: SurfaceMesh, path=None) -> str:
    """Radial-shell picture of a quotient mesh: (p, t) -> p * (2 + t / (2 pi r)).

    Lossy and only meant for viewers; faces that straddle the height seam are
    dropped so the shell stays a clean embedding.
    """
    period = mesh.period if mesh.period is not None else max(float(np.ptp(mesh.heights)), 1.0)
    t = np.mod(mesh.heights, period) if mesh.period is not None else mesh.heights - mesh.heights.min()
    R = 2.0 + t / period
    V = mesh.points * R[:, None]
    H = t[mesh.faces]
    keep = np.ptp(H, axis=1) < 0.5 * period
    lines = [f"# OBJ {VERSION} radial shell p*(2 + t/(2 pi r)), period {_num(period)}"]
    fmt = f"{{:.{OBJ_DIGITS}g}}"
    lines += ["v " + " ".join(fmt.format(c) for c in v) for v in V]
    lines += ["f " + " ".join(str(i + 1) for i in f) for f in mesh.faces[keep]]
    return _write(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------- Plateau solutions


def write_solution(sol: PlateauSolution, path=None) -> str:
    s = sol.spec
    w = _Writer("PLATEAU", "spec " + " ".join(_num(v) for v in (s.hinge.a_tilde, s.hinge.b_tilde, s.hinge.gamma, s.h_tilde)))
    w.keys("meta", {"level": sol.level, "residual": sol.residual, "iterations": sol.iterations})
    mesh = sol.mesh
    tags = [t or "" for t in mesh.tags]
    w.table("vertices", ["x", "y", "z", "t", "tag"], (tuple(p) + (t, g) for p, t, g in zip(mesh.points, mesh.heights, tags)))
    w.table("faces", ["i", "j", "k"], (tuple(f) for f in mesh.faces))
    for name in sorted(sol.index):
        ids = np.atleast_2d(np.asarray(sol.index[name]))
        rows = ((r, int(i)) for r, line in enumerate(ids) for i in line)
        w.table(f"index {name}", ["row", "vertex"], rows)
    for edge in sorted(sol.boundary_traces):
        tr = sol.boundary_traces[edge]
        n = len(tr.s)
        cols = [tr.s, tr.nu, tr.w if tr.w is not None else np.full(n, np.nan), tr.theta if tr.theta is not None else np.full(n, np.nan)]
        w.table(f"trace {edge}", ["s", "nu", "w", "theta"], zip(*cols))
    w.keys("fluxes", {k: sol.fluxes[k] for k in sorted(sol.fluxes)})
    w.table("area_history", ["area"], ((a,) for a in sol.area_history))
    return _write(path, w.text())


def read_solution(path_or_text) -> PlateauSolution:
    extra, sec = _read_sections(_read(path_or_text), "PLATEAU")
    if not extra or not extra[0].startswith("spec "):
        raise FormatError("missing 'spec a b gamma h' line")
    a, b, g, h = (float(v) for v in extra[0].split()[1:5])
    spec = ContourSpec.from_values(a, b, g, h)
    meta = _as_keys(_need(sec, "meta"))
    _, vrows = _as_table(_need(sec, "vertices"))
    _, frows = _as_table(_need(sec, "faces"))
    X = _floats(vrows, range(4))
    mesh = SurfaceMesh(X[:, :3], X[:, 3], _ints(frows).reshape(-1, 3), tags=[r[4] or None for r in vrows])
    index, traces = {}, {}
    for name, lines in sec.items():
        if name.startswith("index "):
            _, rows = _as_table(lines)
            R = _ints(rows).reshape(-1, 2)
            ids = R[:, 1].copy()
            n_rows = int(R[:, 0].max()) + 1 if len(R) else 1
            index[name[6:]] = ids.reshape(n_rows, -1) if n_rows > 1 else ids
        elif name.startswith("trace "):
            _, rows = _as_table(lines)
            T = _floats(rows, range(4))
            w = None if np.all(np.isnan(T[:, 2])) else T[:, 2]
            th = None if np.all(np.isnan(T[:, 3])) else T[:, 3]
            traces[name[6:]] = BoundaryTrace(name[6:], T[:, 0], T[:, 1], w, th)
    fluxes = {k: float(v) for k, v in _as_keys(sec.get("fluxes", [])).items()}
    _, arows = _as_table(sec.get("area_history", ["area"]))
    return PlateauSolution(
        spec,
        build_contour(spec),
        mesh,
        int(meta["level"]),
        index,
        float(meta["residual"]),
        int(meta["iterations"]),
        [float(r[0]) for r in arows],
        traces,
        fluxes,
    )


# ---------------------------------------------------------------- conjugate contour and prism


def write_conjugate(contour: ConjugateContour, prism: PrismData, path=None) -> str:
    w = _Writer("CONJUGATE")
    pk = {"alpha": prism.alpha, "beta": prism.beta, "gamma": prism.gamma, "h": prism.h,
          "alpha_tilde": prism.alpha_tilde, "beta_tilde": prism.beta_tilde}
    for v in "ABC":
        for c, x in zip("xyz", prism.vertices[v]):
            pk[f"{v}_{c}"] = x
    for e in ("23", "45", "51"):
        for c, x in zip("xyz", prism.wall_circles[e]):
            pk[f"n{e}_{c}"] = x
    w.keys("prism", pk)
    meta = {"closure_residual": contour.closure_residual, "closure_tol": contour.closure_tol}
    meta.update({f"angle_{k}": v for k, v in sorted(contour.corner_angles.items())})
    w.keys("meta", meta)
    w.table("corners", ["x", "y", "z", "t"], (tuple(c.p) + (c.height,) for c in contour.corner_points))
    if contour.corner5_candidates:
        w.table("corner5_candidates", ["x", "y", "z"], (tuple(c) for c in contour.corner5_candidates))
    for e in sorted(contour.slice_curves):
        d = contour.slice_curves[e]
        w.keys(f"slice-meta {e}", {"height": d["height"]})
        w.table(f"slice {e}", ["x", "y", "z", "s", "kappa"], (tuple(p) + (s, k) for p, s, k in zip(d["points"], d["s"], d["kappa"])))
    for e in sorted(contour.wall_curves):
        d = contour.wall_curves[e]
        w.table(f"wall {e}", ["x", "y", "z", "s", "u", "t"], (tuple(p) + (s, u, t) for p, s, u, t in zip(d["points"], d["s"], d["x"], d["t"])))
    return _write(path, w.text())


def read_conjugate(path_or_text):
    _, sec = _read_sections(_read(path_or_text), "CONJUGATE")
    pk = _as_keys(_need(sec, "prism"))
    verts = {v: np.array([pk[f"{v}_{c}"] for c in "xyz"], dtype=float) for v in "ABC"}
    walls = {e: np.array([pk[f"n{e}_{c}"] for c in "xyz"], dtype=float) for e in ("23", "45", "51")}
    prism = PrismData(pk["alpha"], pk["beta"], pk["gamma"], pk["h"], walls, verts, pk["alpha_tilde"], pk["beta_tilde"])
    meta = _as_keys(_need(sec, "meta"))
    _, crows = _as_table(_need(sec, "corners"))
    C = _floats(crows, range(4))
    corners = tuple(ProdPoint(c[:3], c[3]) for c in C)
    cands = ()
    if "corner5_candidates" in sec:
        _, rows = _as_table(sec["corner5_candidates"])
        cands = tuple(_floats(rows, range(3)))
    slices, wallcurves = {}, {}
    for name, lines in sec.items():
        if name.startswith("slice "):
            e = name[6:]
            _, rows = _as_table(lines)
            X = _floats(rows, range(5))
            height = _as_keys(_need(sec, f"slice-meta {e}"))["height"]
            slices[e] = {"points": X[:, :3], "s": X[:, 3], "kappa": X[:, 4], "height": float(height)}
        elif name.startswith("wall "):
            e = name[5:]
            _, rows = _as_table(lines)
            X = _floats(rows, range(6))
            wallcurves[e] = {"points": X[:, :3], "s": X[:, 3], "x": X[:, 4], "t": X[:, 5]}
    angles = {k[6:]: v for k, v in meta.items() if k.startswith("angle_")}
    contour = ConjugateContour(slices, wallcurves, corners, float(meta["closure_residual"]), float(meta["closure_tol"]), cands, angles)
    return contour, prism


# ---------------------------------------------------------------- shots and reports


def _plain(v):
    if isinstance(v, (np.generic,)):
        return v.item()
    if isinstance(v, (tuple, list, np.ndarray)):
        return " ".join(_num(x) for x in np.asarray(v, dtype=float).ravel())
    return v


def write_shot(shot, path=None) -> str:
    w = _Writer("SHOT")
    h, a, b = shot.params
    d = {"h_tilde": h, "a_tilde": a, "b_tilde": b, "gamma": shot.gamma,
         "h": shot.h, "alpha": shot.alpha, "beta": shot.beta, "trusted": bool(shot.trusted)}
    for k in sorted(shot.diagnostics):
        v = _plain(shot.diagnostics[k])
        if v is None or isinstance(v, str) and not v:
            v = "none"
        d[f"diag.{k}"] = v
    w.keys("shot", d)
    return _write(path, w.text())


def read_shot(path_or_text) -> dict:
    _, sec = _read_sections(_read(path_or_text), "SHOT")
    return _as_keys(_need(sec, "shot"))


def write_shot_log(rows, path=None) -> str:
    """Run log: one CSV row per evaluated parameter point."""
    w = _Writer("SHOTLOG")
    cols = ["h_tilde", "a_tilde", "b_tilde", "h", "alpha", "beta", "closure_residual", "solver_residual"]
    w.table("runs", cols, ([r.get(c, math.nan) for c in cols] for r in rows))
    return _write(path, w.text())


def write_report(report, path=None) -> str:
    return _write(path, f"TOPOLOGY {VERSION}\n" + report.to_text() + "\n")


def read_report(path_or_text):
    from .topology import TopologyReport

    text = _read(path_or_text)
    head, _, body = text.partition("\n")
    parts = head.split()
    if len(parts) != 2 or parts[0] != "TOPOLOGY":
        raise FormatError(f"expected a TOPOLOGY file, found header {head!r}")
    if parts[1] != VERSION:
        raise FormatError(f"unsupported TOPOLOGY version {parts[1]!r}")
    try:
        return TopologyReport.from_text(body)
    except (json.JSONDecodeError, TypeError) as exc:
        raise FormatError(f"malformed topology report: {exc}") from exc
