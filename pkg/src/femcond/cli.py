"""Command-line front end: mesh generation, single-instance analysis,
parameter sweeps, and bound calibration.

Exit codes: 0 success, 2 usage error, 3 numerical failure.  All commands are
deterministic for fixed flags; numbers are printed with 17 significant
digits so repeated runs produce bit-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

import numpy as np

from . import mesh as mesh_mod
from .assembly import DiffusionField, assemble_stiffness, write_matrix_market
from .bounds import BOUND_IDS, Calibration, build_report, calibrate
from .mesh import (
    SimplicialMesh,
    export_mesh,
    generate_boundary_layer,
    generate_chebyshev_1d,
    generate_power2_1d,
    generate_uniform,
    import_mesh,
    max_aspect_ratio,
)
from .spectra import EigenSolveError, condition_report

__all__ = ["main", "cmd_generate", "cmd_analyze", "cmd_sweep", "cmd_calibrate",
           "SweepSpec", "fit_loglog_slope"]

FAMILIES = ("uniform", "chebyshev", "power2", "boundary_layer_2d",
            "boundary_layer_3d", "imported")
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


@dataclass(frozen=True)
class SweepSpec:
    """One experiment sweep: a mesh family, the swept variable, its values,
    and the fixed remaining parameters."""

    family: str
    variable: str  # "n" or "aspect"
    values: tuple
    fixed: dict = dataclass_field(default_factory=dict)
    p: float | None = None
    tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.variable not in ("n", "aspect"):
            raise ValueError("variable must be 'n' or 'aspect'")
        if not self.values:
            raise ValueError("sweep values must be nonempty")
        if list(self.values) != sorted(set(self.values)):
            raise ValueError("sweep values must be strictly increasing")
        if self.variable == "aspect" and not self.family.startswith("boundary_layer"):
            raise ValueError("aspect sweeps require a boundary_layer family")


def _family_dim(family: str, dim: int | None) -> int:
    if family in ("chebyshev", "power2"):
        return 1
    if family == "boundary_layer_2d":
        return 2
    if family == "boundary_layer_3d":
        return 3
    if family == "uniform":
        if dim is None:
            raise ValueError("--dim is required for the uniform family")
        return dim
    raise ValueError(f"family {family!r} has no generator")


def _make_mesh(family: str, *, n=None, n_core=None, aspect=None, dim=None) -> SimplicialMesh:
    if family in ("uniform", "chebyshev", "power2") and n is None:
        raise ValueError(f"--n is required for the {family} family")
    if family.startswith("boundary_layer") and (n_core is None or aspect is None):
        raise ValueError(f"--n-core and --aspect are required for {family}")
    if family == "uniform":
        return generate_uniform(_family_dim(family, dim), int(n))
    if family == "chebyshev":
        return generate_chebyshev_1d(int(n))
    if family == "power2":
        return generate_power2_1d(int(n))
    if family == "boundary_layer_2d":
        return generate_boundary_layer(2, int(n_core), float(aspect))
    if family == "boundary_layer_3d":
        return generate_boundary_layer(3, int(n_core), float(aspect))
    raise ValueError(f"family {family!r} has no generator")


def _parse_diffusion(spec: str, dim: int) -> DiffusionField:
    if spec == "identity":
        return DiffusionField.identity(dim)
    if spec.startswith("const:"):
        entries = [float(t) for t in spec[len("const:"):].split(",") if t]
        m = np.empty((dim, dim))
        if len(entries) == dim:
            m = np.diag(entries)
        elif len(entries) == dim * (dim + 1) // 2:
            k = 0
            for i in range(dim):
                for j in range(i, dim):
                    m[i, j] = m[j, i] = entries[k]
                    k += 1
        elif len(entries) == dim * dim:
            m = np.asarray(entries).reshape(dim, dim)
        else:
            raise ValueError(
                f"const diffusion for dim {dim} takes {dim} (diagonal), "
                f"{dim * (dim + 1) // 2} (upper triangle) or {dim * dim} "
                f"(full row-major) entries, got {len(entries)}"
            )
        return DiffusionField.constant_matrix(m)
    raise ValueError(f"unknown diffusion spec {spec!r}")


def fit_loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x over the upper half of the
    sweep (the asymptotic regime)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(y) & (y > 0)
    x, y = x[keep], y[keep]
    if len(x) < 2:
        return float("nan")
    lo = len(x) // 2 if len(x) >= 4 else 0
    return float(np.polyfit(np.log(x[lo:]), np.log(y[lo:]), 1)[0])


def _write_csv(path, header: list[str], rows: list[list]) -> None:
    with open(Path(path), "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


# -- subcommands -------------------------------------------------------------


def cmd_generate(args) -> int:
    mesh = _make_mesh(args.family, n=args.n, n_core=args.n_core,
                      aspect=args.aspect, dim=args.dim)
    export_mesh(mesh, args.output, args.format)
    metrics, _ = mesh_mod.compute_metrics(mesh)
    print(
        f"wrote {args.output}: N={mesh.n_elements} N_vi={mesh.n_interior} "
        f"|K_min|={_fmt(metrics.k_min_volume)} "
        f"max_aspect={_fmt(max_aspect_ratio(mesh))}"
    )
    return 0


def _load_calibration(path) -> Calibration | None:
    return Calibration.load(path) if path else None


def _print_report(report) -> None:
    print(
        f"mesh: dim={report.dim} N={report.n_elements} N_vi={report.n_interior} "
        f"|Omega|={_fmt(report.domain_volume)}"
        + ("" if abs(report.domain_volume - 1.0) <= 1e-9
           else "  (warning: non-unit domain, 2D log terms are scale-sensitive)")
    )
    for name, r in (("A", report.exact_A), ("SAS", report.exact_SAS)):
        flag = "" if r.converged else "  [NOT CONVERGED]"
        print(
            f"exact {name}: lambda_min={_fmt(r.lambda_min)} "
            f"lambda_max={_fmt(r.lambda_max)} kappa={_fmt(r.kappa)} "
            f"method={r.method} residual={r.residual:.2e}{flag}"
        )
    print(
        f"lambda_max sandwich: {_fmt(report.lambda_max_lower)} <= lambda_max(A) "
        f"<= {_fmt(report.upper_lambda_max_A)}"
    )
    print("bounds (raw, C = 1):")
    for bid, value in report.raw_bounds().items():
        print(f"  {bid} = {_fmt(value)}")
    cal = report.calibrated_bounds()
    if cal is not None:
        print("bounds (calibrated):")
        for bid, value in cal.items():
            print(f"  {bid} = {_fmt(value)}")


def cmd_analyze(args) -> int:
    if args.mesh:
        mesh = import_mesh(args.mesh, args.format)
    else:
        mesh = _make_mesh(args.family, n=args.n, n_core=args.n_core,
                          aspect=args.aspect, dim=args.dim)
    field = _parse_diffusion(args.diffusion, mesh.dim)
    calibration = _load_calibration(args.calibration)
    report = build_report(
        mesh, field, args.p, args.tol, calibration=calibration, seed=args.seed
    )

    if args.matrix_out:
        write_matrix_market(assemble_stiffness(mesh, field), args.matrix_out)

    _print_report(report)
    row = report.to_row()
    if args.csv:
        _write_csv(args.csv, list(row), [list(row.values())])
    if args.json:
        Path(args.json).write_text(json.dumps(report.to_json_dict(), indent=2) + "\n")

    if not (report.exact_A.converged and report.exact_SAS.converged):
        print("warning: eigensolver did not reach the requested tolerance",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


def _sweep_instance(spec: SweepSpec, value):
    kwargs = dict(spec.fixed)
    if spec.family == "imported":
        files = kwargs.get("mesh_files") or ()
        idx = int(value)
        if not 0 <= idx < len(files):
            raise ValueError(f"imported sweep index {idx} out of range")
        mesh = import_mesh(files[idx], kwargs.get("format", "native_json"))
    else:
        kwargs[spec.variable if spec.variable == "aspect" else "n"] = value
        if spec.family.startswith("boundary_layer") and spec.variable == "n":
            kwargs["n_core"] = value
            kwargs.pop("n", None)
        mesh = _make_mesh(
            spec.family,
            n=kwargs.get("n"),
            n_core=kwargs.get("n_core"),
            aspect=kwargs.get("aspect"),
            dim=kwargs.get("dim"),
        )
    field = _parse_diffusion(kwargs.get("diffusion", "identity"), mesh.dim)
    return mesh, field


def run_sweep(spec: SweepSpec, calibration: Calibration | None = None):
    """One report per sweep value; failures yield None entries."""
    reports = []
    for value in spec.values:
        try:
            mesh, field = _sweep_instance(spec, value)
            reports.append(
                build_report(mesh, field, spec.p, spec.tol,
                             calibration=calibration, seed=spec.seed)
            )
        except (EigenSolveError, mesh_mod.MeshError, ValueError) as exc:
            print(f"warning: sweep value {value} failed: {exc}", file=sys.stderr)
            reports.append(None)
    return reports


def cmd_sweep(args) -> int:
    mesh_files = [t for t in (args.mesh_files or "").split(",") if t]
    if args.family == "imported":
        values = list(range(len(mesh_files)))
        if not values:
            raise ValueError("--mesh-files is required for the imported family")
    else:
        if args.values is None:
            raise ValueError("--values is required")
        values = _parse_values(args.values)
    fixed = {"dim": args.dim, "diffusion": args.diffusion,
             "mesh_files": tuple(mesh_files), "format": args.format}
    if args.variable == "aspect":
        fixed["n_core"] = args.n_core
    elif args.aspect is not None:
        fixed["aspect"] = args.aspect
    spec = SweepSpec(
        family=args.family,
        variable=args.variable,
        values=tuple(values),
        fixed=fixed,
        p=args.p,
        tol=args.tol,
        seed=args.seed,
    )
    calibration = _load_calibration(args.calibration)
    reports = run_sweep(spec, calibration)
    if all(r is None for r in reports):
        print("error: every sweep instance failed", file=sys.stderr)
        return EXIT_NUMERICAL

    header = ["parameter"]
    first = next(r for r in reports if r is not None)
    value_keys = list(first.to_row())
    header += value_keys
    rows = []
    xs = []
    for value, report in zip(spec.values, reports):
        if report is None:
            rows.append([value] + [float("nan")] * len(value_keys))
            xs.append(float("nan"))
        else:
            row = report.to_row()
            rows.append([value] + [row[k] for k in value_keys])
            xs.append(value if spec.variable == "aspect" else report.n_elements)
    if args.csv:
        _write_csv(args.csv, header, rows)

    curve_keys = [k for k in value_keys if k.startswith(("exact.kappa", "exact.lambda"))
                  or k in BOUND_IDS or k.startswith("cal.")]
    slopes = {}
    for key in curve_keys:
        ys = [row[1 + value_keys.index(key)] for row in rows]
        slopes[key] = fit_loglog_slope(xs, ys)

    print(f"sweep {spec.family} over {spec.variable} = {list(spec.values)}")
    print("fitted log-log slopes (upper half of sweep):")
    for key, slope in slopes.items():
        print(f"  {key}: {_fmt(slope)}")

    if args.plot_dir:
        plot_dir = Path(args.plot_dir)
        plot_dir.mkdir(parents=True, exist_ok=True)
        for key in curve_keys:
            ys = [row[1 + value_keys.index(key)] for row in rows]
            fname = plot_dir / (key.replace(".", "_") + ".dat")
            with open(fname, "w", newline="\n") as f:
                for x, y in zip(xs, ys):
                    f.write(f"{_fmt(x)} {_fmt(y)}\n")
        _write_csv(
            plot_dir / "slopes.csv",
            ["curve", "slope"],
            [[k, s] for k, s in slopes.items()],
        )
        _write_gnuplot(plot_dir, curve_keys, spec)
    return 0


def _write_gnuplot(plot_dir: Path, curve_keys, spec: SweepSpec) -> None:
    lines = [
        "set logscale xy",
        f'set xlabel "{ "aspect ratio" if spec.variable == "aspect" else "number of elements N"}"',
        'set ylabel "value"',
        "set key left top",
        "plot \\",
    ]
    plots = [
        f'  "{key.replace(".", "_")}.dat" using 1:2 with linespoints title "{key}"'
        for key in curve_keys
    ]
    lines.append(", \\\n".join(plots))
    (plot_dir / "plots.gp").write_text("\n".join(lines) + "\n")


def cmd_calibrate(args) -> int:
    values = _parse_values(args.n_values)
    if args.family != "uniform":
        raise ValueError("calibration runs on the uniform family")
    series = []
    for n in values:
        mesh = generate_uniform(args.dim, int(n))
        field = _parse_diffusion(args.diffusion, mesh.dim)
        exact = condition_report(mesh, field, args.tol, seed=args.seed)
        series.append((mesh, field, exact))
    cal = calibrate(series, args.p)
    cal.save(args.output)
    print(f"wrote {args.output}: {len(cal.constants)} constants for dim {cal.dim}")
    return 0


def _parse_values(text: str) -> list[float]:
    vals = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        v = float(tok)
        vals.append(int(v) if v == int(v) else v)
    if not vals:
        raise ValueError("empty value list")
    return vals


# -- parser ------------------------------------------------------------------


def _add_family_args(p: argparse.ArgumentParser, with_imported: bool = False) -> None:
    choices = list(FAMILIES) if with_imported else [f for f in FAMILIES if f != "imported"]
    p.add_argument("--family", choices=choices)
    p.add_argument("--dim", type=int, choices=(1, 2, 3),
                   help="dimension (uniform family)")
    p.add_argument("--n", type=int, help="elements per axis / 1D element count")
    p.add_argument("--n-core", dest="n_core", type=int,
                   help="core nodes per axis (boundary layer families)")
    p.add_argument("--aspect", type=float,
                   help="target layer aspect ratio (boundary layer families)")


def _add_common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--diffusion", default="identity",
                   help='"identity" or "const:<entries>" (diagonal, upper '
                        "triangle, or full row-major)")
    p.add_argument("--p", type=float, default=None,
                   help="exponent for the 3D bounds, in (1, 3); default 2.9")
    p.add_argument("--tol", type=float, default=1e-8,
                   help="eigensolver relative residual tolerance")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for iterative-solver start vectors")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="femcond",
        description="Stiffness-matrix conditioning on anisotropic simplicial "
                    "meshes: exact spectra, a-priori bounds, experiment sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a mesh file")
    _add_family_args(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=("native_json", "triangle_node_ele"),
                   default="native_json")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="exact spectra and all bounds for one mesh")
    _add_family_args(p)
    _add_common_args(p)
    p.add_argument("--mesh", help="mesh file instead of a generator family")
    p.add_argument("--format", choices=("native_json", "triangle_node_ele"),
                   default="native_json")
    p.add_argument("--calibration", help="calibration JSON from the calibrate command")
    p.add_argument("--csv", help="write the report as one CSV row")
    p.add_argument("--json", help="write the report as JSON")
    p.add_argument("--matrix-out", dest="matrix_out",
                   help="write the stiffness matrix (MatrixMarket)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="sweep a family parameter, write CSV and plot data")
    _add_family_args(p, with_imported=True)
    _add_common_args(p)
    p.add_argument("--variable", choices=("n", "aspect"), default="n")
    p.add_argument("--values",
                   help="comma-separated strictly increasing values")
    p.add_argument("--mesh-files", dest="mesh_files",
                   help="comma-separated mesh files (imported family)")
    p.add_argument("--format", choices=("native_json", "triangle_node_ele"),
                   default="native_json")
    p.add_argument("--calibration")
    p.add_argument("--csv", help="output CSV path")
    p.add_argument("--plot-dir", dest="plot_dir",
                   help="directory for per-curve .dat files and gnuplot script")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("calibrate", help="fit bound constants on uniform meshes")
    p.add_argument("--family", default="uniform", choices=("uniform",))
    p.add_argument("--dim", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--n-values", dest="n_values", required=True,
                   help="comma-separated uniform mesh sizes")
    _add_common_args(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_calibrate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EigenSolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (mesh_mod.MeshError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
