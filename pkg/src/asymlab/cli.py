"""Command-line front end: residual sweeps, oracle dumps, fits, boundary
integrals, annulus solves, and full experiment pipelines."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from importlib import resources

import numpy as np

from . import asymptotics, oracle2d, solver
from .core import AnnulusGrid, EquationSpec, PotentialFn, SymMat
from .equations import residual_many
from .errors import ConfigError, LabError

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2


def _load_schema(name: str) -> dict:
    with resources.files("asymlab.schemas").joinpath(name).open() as f:
        return json.load(f)


def _validate(instance: dict, schema_name: str):
    import jsonschema

    try:
        jsonschema.validate(instance, _load_schema(schema_name))
    except jsonschema.ValidationError as e:
        raise ConfigError(f"config does not match {schema_name}: {e.message}") from e


def parse_equation(kind: str, dim: int, theta=None, delta=None) -> EquationSpec:
    kind = kind.upper()
    if kind == "SLE" and theta is None:
        raise ConfigError("SLE needs --theta")
    if kind == "SIGMA2" and delta is None:
        raise ConfigError("SIGMA2 needs --delta")
    try:
        return EquationSpec(kind, dim, theta=theta, delta=delta)
    except LabError as e:
        raise ConfigError(str(e)) from e


def solution_from_spec(spec: dict) -> PotentialFn:
    _validate(spec, "oracle.json")
    if spec["kind"] == "sle":
        coeffs = oracle2d._coeffs_from_params(
            {"a1": spec.get("a1", 0.0), "a0": spec.get("a0", 0.0),
             "am1": spec.get("am1", 0.0), "tail": spec.get("tail", ())})
        return oracle2d.oracle_sle(coeffs, float(spec["vartheta"]))
    return oracle2d.builtin(spec["name"], spec.get("params"))


def parse_solution(arg: str, params_json: str | None = None) -> PotentialFn:
    """Accepts 'builtin:NAME' or a path to an oracle spec JSON file."""
    if arg.startswith("builtin:"):
        params = json.loads(params_json) if params_json else {}
        return solution_from_spec(
            {"kind": "builtin", "name": arg[len("builtin:"):],
             **({"params": params} if params else {})})
    if not os.path.exists(arg):
        raise ConfigError(f"solution file not found: {arg}")
    with open(arg) as f:
        return solution_from_spec(json.load(f))


def _exterior_points(P: PotentialFn, n: int, seed: int, r_lo=None, r_hi=None):
    """Quasi-random exterior sample points, scrambled by the seed."""
    rng = np.random.default_rng(seed)
    lo = r_lo if r_lo is not None else max(P.rho, 0.3) + 0.2
    hi = r_hi if r_hi is not None else 4.0 * lo + 4.0
    radii = lo * (hi / lo) ** rng.random(n)
    dirs = rng.normal(size=(n, P.dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return radii[:, None] * dirs


def _out_dir(path: str | None) -> str:
    d = os.environ.get("LAB_OUTPUT_DIR", path or ".")
    os.makedirs(d, exist_ok=True)
    return d


def _dump_json(obj, path: str | None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_residual(args) -> int:
    P = parse_solution(args.solution, args.params)
    spec = parse_equation(args.equation, args.dim or P.dim, args.theta, args.delta)
    pts = _exterior_points(P, args.points, args.seed)
    H = np.array([P.hess(x).m for x in pts])
    res = residual_many(spec, H)
    worst = float(np.max(np.abs(res)))
    print(f"max |residual| = {worst:.6e} over {args.points} points")
    return EXIT_OK


def cmd_oracle(args) -> int:
    P = parse_solution(args.solution, args.params)
    radii = [float(r) for r in args.radii.split(",")]
    shells = asymptotics.ShellSpec(tuple(radii), args.points_per_shell)
    out = os.path.join(_out_dir(args.outputs), args.out)
    _write_samples_csv(P, shells, out, args.seed)
    print(f"wrote {out} (rho = {P.rho})")
    return EXIT_OK


def _write_samples_csv(P: PotentialFn, shells, path: str, seed: int):
    dim = P.dim
    if dim == 2:
        header = "x1,x2,u,du1,du2,h11,h12,h22"
    else:
        header = "x1,x2,x3,u,du1,du2,du3,h11,h12,h22,h13,h23,h33"
    with open(path, "w") as f:
        f.write(header + "\n")
        for r in shells.radii:
            for x in asymptotics.shell_points(r, shells.points_per_shell, dim, seed=seed):
                u, g, H = P.value(x), P.grad(x), P.hess(x).m
                if dim == 2:
                    row = [*x, u, *g, H[0, 0], H[0, 1], H[1, 1]]
                else:
                    row = [*x, u, *g, H[0, 0], H[0, 1], H[1, 1],
                           H[0, 2], H[1, 2], H[2, 2]]
                f.write(",".join(repr(float(v)) for v in row) + "\n")


def cmd_fit(args) -> int:
    P = parse_solution(args.solution, args.params)
    spec = parse_equation(args.equation, args.dim or P.dim, args.theta, args.delta)
    radii = tuple(float(r) for r in args.shells.split(","))
    shells = asymptotics.ShellSpec(radii, args.points_per_shell)
    profile = asymptotics.fit_profile(P, spec, shells, seed=args.seed)
    _dump_json(profile.to_dict(),
               os.path.join(_out_dir(args.outputs), args.out) if args.out else None)
    return EXIT_OK


def _curve_from_config(cfg: dict, kernel: SymMat | None = None):
    kind = cfg.get("type", "circle")
    order = int(cfg.get("order", asymptotics.DEFAULT_QUAD_ORDER))
    if kind == "circle":
        return asymptotics.BoundaryCurve.circle(
            float(cfg.get("radius", 1.0)), tuple(cfg.get("center", (0.0, 0.0))), order)
    if kind == "kernel-ellipse":
        if kernel is None:
            raise ConfigError("kernel-ellipse curve needs a fitted profile first")
        return asymptotics.BoundaryCurve.ellipse_of_kernel(
            kernel, float(cfg.get("radius", 10.0)), order)
    raise ConfigError(f"unknown curve type {kind!r}")


def cmd_boundary_d(args) -> int:
    P = parse_solution(args.solution, args.params)
    spec = parse_equation(args.equation, args.dim or P.dim, args.theta, args.delta)
    curve = asymptotics.BoundaryCurve.circle(args.radius, order=args.order)
    d = asymptotics.boundary_d(spec, P, curve)
    print(f"d = {d:.12g}")
    return EXIT_OK


def _grid_from_config(cfg: dict) -> AnnulusGrid:
    return AnnulusGrid(float(cfg["rInner"]), float(cfg["rOuter"]),
                       int(cfg["nR"]), int(cfg["nTheta"]),
                       cfg.get("spacing", "logarithmic"))


def cmd_solve(args) -> int:
    P = parse_solution(args.solution, args.params)
    spec = parse_equation(args.equation, 2, args.theta, args.delta)
    r_in, r_out, n_r, n_t = args.grid.split(",")
    grid = AnnulusGrid(float(r_in), float(r_out), int(n_r), int(n_t), args.spacing)
    inner, outer = solver.boundary_data_from(P, grid)
    report = solver.solve_annulus(spec, grid, inner, outer)
    out_dir = _out_dir(args.outputs)
    _write_field_csv(report.field, os.path.join(out_dir, args.out))
    _dump_json(report.to_dict(), os.path.join(out_dir, args.report))
    print(f"converged in {report.iterations} iterations, "
          f"|r|_inf = {report.final_residual_inf:.3e}")
    return EXIT_OK


def _write_field_csv(fld, path: str):
    grid = fld.grid
    r, th = grid.r, grid.theta
    with open(path, "w") as f:
        f.write("i,j,r,theta,x1,x2,u\n")
        for i in range(grid.n_r):
            for j in range(grid.n_theta):
                x1 = r[i] * math.cos(th[j])
                x2 = r[i] * math.sin(th[j])
                f.write(f"{i},{j},{r[i]!r},{th[j]!r},{x1!r},{x2!r},"
                        f"{fld.values[i, j]!r}\n")


def cmd_experiment(args) -> int:
    with open(args.config) as f:
        cfg = json.load(f)
    _validate(cfg, "experiment.json")
    eq = cfg["equation"]
    spec = parse_equation(eq["kind"], eq["dim"], eq.get("theta"), eq.get("delta"))
    P = solution_from_spec(cfg["solution"])
    seed = int(cfg.get("seed", 0))
    shells = asymptotics.ShellSpec(tuple(cfg["shells"]["radii"]),
                                   int(cfg["shells"].get("pointsPerShell", 64)))
    out_dir = _out_dir(cfg.get("outputs"))

    summary = {"seed": seed, "checks": {}}
    profile = asymptotics.fit_profile(P, spec, shells, seed=seed)
    summary["profile"] = profile.to_dict()

    expected_d = cfg.get("expectedD")
    if expected_d is not None:
        summary["expectedD"] = expected_d
        summary["checks"]["fit_vs_expected"] = bool(
            abs(profile.d - expected_d) <= 2e-3)

    if "curve" in cfg:
        curve = _curve_from_config(cfg["curve"], profile.L)
        d_b = asymptotics.boundary_d(spec, P, curve)
        summary["dBoundary"] = d_b
        summary["checks"]["fit_vs_boundary"] = bool(abs(profile.d - d_b) <= 2e-3)
        if expected_d is not None:
            summary["checks"]["boundary_vs_expected"] = bool(
                abs(d_b - expected_d) <= 1e-4)

    if "solver" in cfg:
        grid = _grid_from_config(cfg["solver"]["grid"])
        inner, outer = solver.boundary_data_from(P, grid)
        report = solver.solve_annulus(spec, grid, inner, outer)
        _write_field_csv(report.field, os.path.join(out_dir, "field.csv"))
        summary["solve"] = report.to_dict()
        summary["checks"]["solve_converged"] = report.converged

    _write_samples_csv(P, shells, os.path.join(out_dir, "samples.csv"), seed)
    summary["pass"] = all(summary["checks"].values())
    _dump_json(summary, os.path.join(out_dir, "summary.json"))
    print(f"experiment {'PASS' if summary['pass'] else 'FAIL'}; "
          f"summary in {out_dir}/summary.json")
    return EXIT_OK if summary["pass"] else EXIT_NUMERICAL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lab",
                                description="exterior-asymptotics laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, equation=True):
        sp.add_argument("--solution", required=True,
                        help="'builtin:NAME' or path to an oracle spec JSON")
        sp.add_argument("--params", help="JSON params for a builtin solution")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--outputs", help="output directory (LAB_OUTPUT_DIR overrides)")
        if equation:
            sp.add_argument("--equation", required=True,
                            choices=["sle", "ma", "sigma2", "ihh"])
            sp.add_argument("--theta", type=float)
            sp.add_argument("--delta", type=float)
            sp.add_argument("--dim", type=int)

    sp = sub.add_parser("residual", help="max |residual| over exterior samples")
    common(sp)
    sp.add_argument("--points", type=int, default=1000)
    sp.set_defaults(func=cmd_residual)

    sp = sub.add_parser("oracle", help="dump oracle samples to CSV")
    common(sp, equation=False)
    sp.add_argument("--radii", default="10,20,40")
    sp.add_argument("--points-per-shell", type=int, default=64)
    sp.add_argument("--out", default="samples.csv")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("fit", help="fit an asymptotic profile")
    common(sp)
    sp.add_argument("--shells", default="50,100,200")
    sp.add_argument("--points-per-shell", type=int, default=64)
    sp.add_argument("--out", help="profile JSON path (default: stdout)")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("boundary-d", help="log coefficient via boundary integral")
    common(sp)
    sp.add_argument("--radius", type=float, default=1.0)
    sp.add_argument("--order", type=int, default=asymptotics.DEFAULT_QUAD_ORDER)
    sp.set_defaults(func=cmd_boundary_d)

    sp = sub.add_parser("solve", help="Newton solve on a polar annulus")
    common(sp)
    sp.add_argument("--grid", default="1,8,64,128",
                    help="rInner,rOuter,nR,nTheta")
    sp.add_argument("--spacing", choices=["uniform", "logarithmic"],
                    default="logarithmic")
    sp.add_argument("--out", default="field.csv")
    sp.add_argument("--report", default="report.json")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("experiment", help="oracle -> fit -> boundary -> solve pipeline")
    sp.add_argument("--config", required=True)
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigError, json.JSONDecodeError, FileNotFoundError, KeyError) as e:
        _emit_error(e)
        return EXIT_CONFIG
    except LabError as e:
        _emit_error(e)
        return EXIT_NUMERICAL


def _emit_error(e: Exception):
    kind = getattr(e, "kind", type(e).__name__)
    json.dump({"error": {"kind": kind, "message": str(e)}}, sys.stderr)
    sys.stderr.write("\n")


if __name__ == "__main__":
    sys.exit(main())
