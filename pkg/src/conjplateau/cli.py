"""Command-line front end.

Exit codes: 0 when every configured check passes, 2 when a check fails,
3 when a solver gives up, 4 on bad usage or invalid input.  Files go to
``--out-dir``, else to ``$CONJPLATEAU_OUTPUT_DIR``, else to the working directory.
"""
from __future__ import annotations

import math
import os
import re
import sys
import traceback
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from . import formats
from .errors import (
    AssemblyError,
    AuditError,
    ConjPlateauError,
    EmbeddednessError,
    FormatError,
    InconsistentConfigurationError,
    InputDomainError,
    PrecisionLimitError,
)

OUTPUT_ENV = "CONJPLATEAU_OUTPUT_DIR"
EXIT_OK, EXIT_CHECK, EXIT_SOLVER, EXIT_USAGE = 0, 2, 3, 4

DEFAULT_A_TILDE = 0.6
DEFAULT_ROSENBERG_H = 1.0
GENERAL_SHOOT_LEVEL = 2


class CheckFailed(Exception):
    """A configured verification did not pass; files were still written."""


# ---------------------------------------------------------------- configuration


class AngleType(click.ParamType):
    """Reals written plainly or as multiples of pi: ``1.0472``, ``pi/3``, ``2*pi/5``."""

    name = "angle"
    _form = re.compile(r"^\s*(?:([0-9.eE+-]+)\s*\*?\s*)?(pi)?\s*(?:/\s*([0-9.eE+-]+))?\s*$")

    def convert(self, value, param, ctx):
        if isinstance(value, (int, float)):
            return float(value)
        m = self._form.match(str(value))
        if not m or not (m.group(1) or m.group(2)):
            self.fail(f"{value!r} is not a number or a multiple of pi", param, ctx)
        try:
            coef = float(m.group(1)) if m.group(1) else 1.0
            den = float(m.group(3)) if m.group(3) else 1.0
        except ValueError:
            self.fail(f"{value!r} is not a number or a multiple of pi", param, ctx)
        if den == 0:
            self.fail("division by zero", param, ctx)
        return coef * (math.pi if m.group(2) else 1.0) / den


ANGLE = AngleType()


@dataclass
class RunConfig:
    resolution: int = 3
    tol: float = 1e-10
    output_dir: Path = field(default_factory=lambda: Path(os.environ.get(OUTPUT_ENV, ".")))
    family: str | None = None
    k: int | None = None
    d: int | None = None
    mode: str = "single"
    a_tilde: float = DEFAULT_A_TILDE
    h_tilde: float | None = None
    write_obj: bool = True

    def validate(self):
        if self.resolution < 1 or self.resolution > 6:
            raise InputDomainError("resolution must lie in 1..6")
        if not self.tol > 0:
            raise InputDomainError("tol must be positive")
        if self.family is not None:
            from .assembly import TilingSpec

            TilingSpec(self.family, k=self.k, d=self.d, mode=self.mode)
        if not 0 < self.a_tilde <= math.pi / 2:
            raise InputDomainError("a~ must lie in (0, pi/2]")
        if self.h_tilde is not None and not 0 < self.h_tilde <= math.pi / 2:
            raise InputDomainError("h~ must lie in (0, pi/2]")
        self.output_dir = Path(self.output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self


def _out_dir(value):
    return Path(value) if value else Path(os.environ.get(OUTPUT_ENV, "."))


def _kv(mapping: dict):
    for key, value in mapping.items():
        if isinstance(value, (bool, np.bool_)):
            value = "true" if value else "false"
        elif isinstance(value, (float, np.floating)):
            value = repr(float(value))
        elif isinstance(value, np.integer):
            value = int(value)
        click.echo(f"{key}={value}")


# ---------------------------------------------------------------- pipeline


def build_family_surface(cfg: RunConfig):
    """Solve, conjugate and assemble one family; returns (surface, pieces dict)."""
    from .assembly import TilingSpec, orbit_assemble, rosenberg_assemble
    from .conjugation import solve_free_boundary
    from .plateau import solve_graph
    from .shooting import solve_general, solve_symmetric
    from .surfaces import ContourSpec

    spec = TilingSpec(cfg.family, k=cfg.k, d=cfg.d, mode=cfg.mode)
    if spec.family == "rosenberg":
        h = DEFAULT_ROSENBERG_H if cfg.h_tilde is None else cfg.h_tilde
        sol = solve_graph(ContourSpec.from_values(math.pi / 2, math.pi / 2, spec.gamma, h), cfg.resolution, cfg.tol)
        return rosenberg_assemble(sol, cfg.mode), {"solution": sol}
    if spec.family == "pk":
        shot = solve_general(spec.k, resolution=min(cfg.resolution, GENERAL_SHOOT_LEVEL), h_tilde=cfg.h_tilde)
    else:
        alpha, _, gamma = spec.angles
        shot = solve_symmetric(gamma, alpha, cfg.a_tilde, resolution=cfg.resolution)
        if not shot.trusted:
            raise PrecisionLimitError(f"shot not trusted: {shot.diagnostics}", best=shot)
    piece = solve_free_boundary(shot.prism, shot.contour, resolution=cfg.resolution, tol=cfg.tol)
    surface = orbit_assemble(piece, shot.prism, spec)
    return surface, {"shot": shot, "piece": piece, "solution": shot.solution}


def check_surface(surface, report):
    """Configured checks on an assembled surface; returns the list of failures."""
    from .assembly import genus_consistency

    failures = []
    try:
        genus_consistency(surface)
    except AssemblyError as exc:
        failures.append(str(exc))
    spec = surface.spec
    if spec is not None and report.orientable != spec.orientable:
        failures.append(f"orientable={report.orientable}, expected {spec.orientable}")
    if report.separates is not None and not report.slice_excluded and report.separates != report.orientable:
        failures.append(f"separates={report.separates} but orientable={report.orientable}")
    if report.ph_sum is not None and report.ph_sum != report.chi:
        failures.append(f"index sum {report.ph_sum} differs from chi {report.chi}")
    return failures


# ---------------------------------------------------------------- commands


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Conjugate Plateau constructions of minimal surfaces in S^2 x S^1(r)."""


@cli.group()
def trig():
    """Spherical trigonometry of the hinge and the prism base."""


@trig.command("hinge")
@click.option("--a", "a", type=ANGLE, required=True, help="side a~")
@click.option("--b", "b", type=ANGLE, required=True, help="side b~")
@click.option("--gamma", type=ANGLE, required=True, help="included angle")
def trig_hinge(a, b, gamma):
    """Third side, remaining angles and area of the hinge triangle."""
    from .sphtrig import HingeSpec, solve_hinge

    t = solve_hinge(HingeSpec(a, b, gamma))
    _kv({"c": t.c, "alpha_tilde": t.alpha_tilde, "beta_tilde": t.beta_tilde, "area": t.area})
    return EXIT_OK


@trig.command("alpha-from-delta")
@click.option("--gamma", type=ANGLE, required=True)
@click.option("--delta", type=ANGLE, required=True, help="length of the symmetry curve")
def trig_alpha(gamma, delta):
    """Base angle of the isosceles prism from the symmetry-curve length."""
    from .sphtrig import alpha_from_delta

    _kv({"alpha": alpha_from_delta(gamma, delta)})
    return EXIT_OK


@trig.command("delta-from-alpha")
@click.option("--gamma", type=ANGLE, required=True)
@click.option("--alpha", type=ANGLE, required=True)
def trig_delta(gamma, alpha):
    """Symmetry-curve length that produces a given base angle."""
    from .sphtrig import delta_from_alpha

    _kv({"delta": delta_from_alpha(gamma, alpha)})
    return EXIT_OK


@trig.command("genus")
@click.option("--m", type=int, required=True, help="number of copies")
@click.option("--gamma", type=ANGLE, required=True)
def trig_genus(m, gamma):
    """Genus of the closed surface built from m copies."""
    from .sphtrig import genus_from_copies

    click.echo(genus_from_copies(m, gamma))
    return EXIT_OK


@trig.command("angles")
@click.option("--alpha", type=ANGLE, required=True)
@click.option("--beta", type=ANGLE, required=True)
@click.option("--gamma", type=ANGLE, required=True)
def trig_angles(alpha, beta, gamma):
    """Side lengths of the triangle with the given angles."""
    from .sphtrig import solve_from_angles

    a, b, c = solve_from_angles(alpha, beta, gamma)
    _kv({"a": a, "b": b, "c": c})
    return EXIT_OK


@cli.command()
@click.option("--a", "a", type=ANGLE, required=True)
@click.option("--b", "b", type=ANGLE, required=True)
@click.option("--gamma", type=ANGLE, required=True)
@click.option("--h", "h", type=ANGLE, required=True, help="height h~ of the vertical edges")
@click.option("--res", "resolution", type=int, default=3, show_default=True)
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--out", "out", type=str, default="plateau.txt", show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
def plateau(a, b, gamma, h, resolution, tol, out, out_dir):
    """Solve the Plateau problem for the geodesic pentagon and save the solution."""
    from .plateau import solve_graph
    from .surfaces import ContourSpec

    cfg = RunConfig(resolution=resolution, tol=tol, output_dir=_out_dir(out_dir)).validate()
    sol = solve_graph(ContourSpec.from_values(a, b, gamma, h), resolution, tol)
    path = cfg.output_dir / out
    formats.write_solution(sol, path)
    _kv({"file": str(path), "level": sol.level, "residual": sol.residual, "iterations": sol.iterations,
         "area": sol.area, **{f"flux{k}": v for k, v in sorted(sol.fluxes.items())}})
    return EXIT_OK


@cli.command()
@click.option("--solution", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--res", "resolution", type=int, default=3, show_default=True)
@click.option("--prefix", default="conjugate", show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
def conjugate(solution, resolution, prefix, out_dir):
    """Reconstruct the conjugate contour, solve the free-boundary piece and compare."""
    from .conjugation import reconstruct_contour, solve_free_boundary, verify_conjugate

    cfg = RunConfig(resolution=resolution, output_dir=_out_dir(out_dir)).validate()
    sol = formats.read_solution(solution)
    contour, prism = reconstruct_contour(sol)
    piece = solve_free_boundary(prism, contour, resolution=resolution)
    formats.write_conjugate(contour, prism, cfg.output_dir / f"{prefix}.txt")
    formats.write_mesh(piece, cfg.output_dir / f"{prefix}.mesh")
    rep = verify_conjugate(sol, piece, prism)
    _kv({"alpha": prism.alpha, "beta": prism.beta, "gamma": prism.gamma, "h": prism.h,
         "closure_residual": contour.closure_residual, "area_mismatch": rep.area_mismatch,
         "nu_distance": rep.nu_distance, "curvature_mismatch": rep.curvature_mismatch, "passed": rep.passed})
    if not rep.passed:
        raise CheckFailed(f"conjugation checks failed: {rep.flags}")
    return EXIT_OK


@cli.group()
def shoot():
    """Parameter searches for the prism angles."""


def _write_shot(shot, out_dir, stem):
    from .shooting import evaluation_log

    formats.write_shot(shot, out_dir / f"{stem}.txt")
    formats.write_shot_log(evaluation_log(), out_dir / f"{stem}-log.csv")
    _kv({k: v for k, v in shot.as_dict().items() if not isinstance(v, (list, tuple, dict))})


@shoot.command("symmetric")
@click.option("--gamma", type=ANGLE, required=True)
@click.option("--alpha", type=ANGLE, required=True, help="target base angle")
@click.option("--a", "a", type=ANGLE, required=True)
@click.option("--res", "resolution", type=int, default=3, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
def shoot_symmetric(gamma, alpha, a, resolution, out_dir):
    """Find h~ with a~ = b~ so the conjugate prism has base angle alpha."""
    from .shooting import clear_cache, solve_symmetric

    cfg = RunConfig(resolution=resolution, output_dir=_out_dir(out_dir), a_tilde=a).validate()
    clear_cache()
    shot = solve_symmetric(gamma, alpha, a, resolution)
    _write_shot(shot, cfg.output_dir, "shot-symmetric")
    if not shot.trusted:
        raise CheckFailed("the shot is outside its trust tolerances")
    return EXIT_OK


@shoot.command("general")
@click.option("--k", type=int, required=True)
@click.option("--res", "resolution", type=int, default=2, show_default=True)
@click.option("--h", "h", type=ANGLE, default=None, help="fixed h~ (default: chosen automatically)")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
def shoot_general(k, resolution, h, out_dir):
    """Certified root of the two-angle problem for the (pi/k, pi/2, pi/2) prism."""
    from .shooting import clear_cache, solve_general

    cfg = RunConfig(resolution=resolution, output_dir=_out_dir(out_dir), h_tilde=h).validate()
    clear_cache()
    shot = solve_general(k, resolution, h)
    _write_shot(shot, cfg.output_dir, "shot-general")
    return EXIT_OK


@cli.command()
@click.option("--family", type=click.Choice(["cube", "balloon", "pk", "rosenberg"]), required=True)
@click.option("--k", type=int, default=None)
@click.option("--d", type=int, default=None)
@click.option("--mode", type=click.Choice(["single", "double"]), default="single", show_default=True)
@click.option("--res", "resolution", type=int, default=3, show_default=True)
@click.option("--a", "a", type=ANGLE, default=DEFAULT_A_TILDE, show_default=True, help="a~ for the symmetric families")
@click.option("--h", "h", type=ANGLE, default=None, help="h~ for rosenberg or pk")
@click.option("--obj/--no-obj", default=True, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
def assemble(family, k, d, mode, resolution, a, h, obj, out_dir):
    """Build a compact surface of one family and write mesh, OBJ and topology report."""
    from .topology import topology_report

    cfg = RunConfig(resolution=resolution, output_dir=_out_dir(out_dir), family=family, k=k, d=d,
                    mode=mode, a_tilde=a, h_tilde=h, write_obj=obj).validate()
    surface, _ = build_family_surface(cfg)
    stem = family + (f"-k{k}" if k else "") + (f"-d{d}-{mode}" if family == "rosenberg" else "")
    formats.write_mesh(surface.mesh, cfg.output_dir / f"{stem}.mesh")
    if cfg.write_obj:
        formats.write_obj(surface.mesh, cfg.output_dir / f"{stem}.obj")
    report = topology_report(surface)
    formats.write_report(report, cfg.output_dir / f"{stem}-report.txt")
    _kv({"copies": surface.copies, "vertices": surface.mesh.n_vertices, "faces": surface.mesh.n_faces,
         "chi": report.chi, "orientable": report.orientable, "genus": report.genus,
         "separates": report.separates, "ph_sum": report.ph_sum, "seam_gap": surface.seam_gap})
    failures = check_surface(surface, report)
    if failures:
        raise CheckFailed("; ".join(failures))
    return EXIT_OK


@cli.command()
@click.option("--mesh", "mesh_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--other", type=click.Path(exists=True, dir_okay=False), default=None, help="second mesh for the intersection test")
@click.option("--samples", type=int, default=64, show_default=True, help="fiber samples")
def verify(mesh_path, other, samples):
    """Print the topology report of a saved mesh."""
    from .topology import topology_report

    mesh = formats.read_mesh(mesh_path)
    second = formats.read_mesh(other) if other else None
    report = topology_report(mesh, second, fiber_samples=samples)
    click.echo(formats.write_report(report), nl=False)
    return EXIT_OK


@cli.command()
@click.option("--mesh", "mesh_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--format", "fmt", type=click.Choice(["obj", "csv"]), default="obj", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def export(mesh_path, fmt, out):
    """Convert a saved mesh to OBJ (radial shell picture) or exact CSV blocks."""
    mesh = formats.read_mesh(mesh_path)
    if fmt == "obj":
        formats.write_obj(mesh, out)
    else:
        formats.write_mesh(mesh, out)
    click.echo(out)
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def _dump(exc, argv):
    out = Path(os.environ.get(OUTPUT_ENV, "."))
    try:
        out.mkdir(parents=True, exist_ok=True)
        lines = ["ERROR v1", f"command={' '.join(argv)}", f"type={type(exc).__name__}", f"message={exc}"]
        best = getattr(exc, "best", None)
        if best is not None and hasattr(best, "as_dict"):
            lines += [f"best.{k}={v}" for k, v in best.as_dict().items()]
        lines.append("")
        lines += traceback.format_exception(type(exc), exc, exc.__traceback__)
        (out / "error.txt").write_text("\n".join(lines))
    except OSError:
        pass


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        rv = cli.main(args=argv, prog_name="conjplateau", standalone_mode=False)
    except click.exceptions.UsageError as exc:
        exc.show()
        sys.exit(EXIT_USAGE)
    except click.exceptions.Abort:
        sys.exit(EXIT_USAGE)
    except CheckFailed as exc:
        click.echo(f"check failed: {exc}", err=True)
        sys.exit(EXIT_CHECK)
    except (InputDomainError, InconsistentConfigurationError, FormatError) as exc:
        click.echo(f"invalid input: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except (AssemblyError, AuditError, EmbeddednessError) as exc:
        _dump(exc, argv)
        click.echo(f"check failed: {exc}", err=True)
        sys.exit(EXIT_CHECK)
    except ConjPlateauError as exc:
        _dump(exc, argv)
        click.echo(f"solver failure: {type(exc).__name__}: {exc}", err=True)
        sys.exit(EXIT_SOLVER)
    sys.exit(rv if isinstance(rv, int) else EXIT_OK)


if __name__ == "__main__":
    main()
