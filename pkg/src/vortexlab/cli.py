"""Command-line entry point.

Subcommands::

    constants      print the coupling/spectral constants for a rank
    solve-radial   radial solve; CSV columns r,u1,u2,Q1,Q2,f,fNA,E1,E2
    solve-profile  first-order profile solve; CSV columns r,f,fNA,Q1,Q2
    solve-planar   planar solve; CSV columns x,y,w1,w2,u1,u2
    verify         verification report from a saved radial CSV
    report         solve and emit a full verification report

Exit codes: 0 success, 1 solver non-convergence, 2 invalid parameters,
3 I/O failure.  Output files carry a single ``#``-prefixed metadata line
(key=value pairs) and are byte-identical across runs for a fixed
configuration.  Reports are JSON text with all reals printed to 17
significant digits, so parsing an emitted report reproduces it exactly.

The environment variable ``VORTEXLAB_THREADS`` (integer >= 1) caps the
worker threads of the underlying linear-algebra libraries; all
orchestration here is sequential.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import numpy as np

from .errors import NonConvergenceError, VortexlabError
from .functional import FieldPair, PlanarGrid
from .model import (
    ModelParams,
    background,
    coupling_matrix,
    flux_targets,
    spectral_constants,
)
from .planar import solve_planar
from .radial import (
    RadialMesh,
    RadialSolution,
    radial_mesh,
    reconstruct_profiles,
    solve_profile_bps,
    solve_radial_P,
)
from .verify import VerificationReport, build_report

__all__ = ["main", "emit_report", "parse_report"]


# ---------------------------------------------------------------------------
# formatting helpers
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    """Render a scalar: reals at 17 significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return "null"
    return format(float(x) + 0.0, ".17g")  # folds -0.0 into 0


def _json_write(obj, out, indent=0) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for k, (key, val) in enumerate(items):
            out.append(f'{pad}  {json.dumps(str(key))}: ')
            _json_write(val, out, indent + 1)
            out.append(",\n" if k + 1 < len(items) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            out.append("[]")
            return
        out.append("[\n")
        for k, val in enumerate(obj):
            out.append(pad + "  ")
            _json_write(val, out, indent + 1)
            out.append(",\n" if k + 1 < len(obj) else "\n")
        out.append(pad + "]")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        out.append(_fmt(obj))


def emit_report(report: VerificationReport) -> str:
    """Serialize a report to JSON text (reals at 17 significant digits)."""
    payload = {
        "params": report.params,
        "constants": report.constants,
        "flux": report.flux,
        "component_flux": report.component_flux,
        "decay": report.decay,
        "residuals": report.residuals,
        "uniqueness": report.uniqueness,
        "cross_validation": report.cross_validation,
    }
    out: list[str] = []
    _json_write(payload, out)
    out.append("\n")
    return "".join(out)


def parse_report(text: str) -> VerificationReport:
    """Inverse of :func:`emit_report`; round-trips by value."""
    d = json.loads(text)
    return VerificationReport(
        params=d["params"],
        constants=d["constants"],
        flux=d["flux"],
        component_flux=d["component_flux"],
        decay=d["decay"],
        residuals=d["residuals"],
        uniqueness=d.get("uniqueness"),
        cross_validation=d.get("cross_validation"),
    )


def _metadata_line(pairs: dict) -> str:
    return "# " + " ".join(f"{k}={_fmt(v)}" for k, v in pairs.items())


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_csv(path: Optional[str], meta: dict, header: list, columns: list) -> Optional[str]:
    lines = [_metadata_line(meta), ",".join(header)]
    stacked = np.column_stack(columns)
    for row in stacked:
        lines.append(",".join(_fmt(float(v)) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        return text
    _write_text(path, text)
    return None


# ---------------------------------------------------------------------------
# thread cap
# ---------------------------------------------------------------------------


def thread_cap() -> Optional[int]:
    """Validated value of ``VORTEXLAB_THREADS``, or None when unset."""
    raw = os.environ.get("VORTEXLAB_THREADS")
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"VORTEXLAB_THREADS must be an integer >= 1, got {raw!r}")
    if value < 1:
        raise ValueError(f"VORTEXLAB_THREADS must be an integer >= 1, got {value}")
    return value


def _apply_thread_cap() -> None:
    cap = thread_cap()
    if cap is None:
        return
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(cap)
    except ImportError:
        # Best effort for libraries that read the environment lazily.
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(cap))


# ---------------------------------------------------------------------------
# shared construction
# ---------------------------------------------------------------------------


def _params_from_args(args) -> ModelParams:
    return ModelParams(
        N=args.N,
        n1=args.n1,
        n2=args.n2,
        tau=args.tau,
        theorem_mode=not args.no_theorem_mode,
    )


def _add_param_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--N", type=int, required=True, help="gauge-group rank (integer >= 2)")
    p.add_argument("--n1", type=float, default=1.0, help="first vortex multiplicity")
    p.add_argument("--n2", type=float, default=1.0, help="second vortex multiplicity")
    p.add_argument("--tau", type=float, default=1.0, help="background scale")
    p.add_argument(
        "--no-theorem-mode",
        action="store_true",
        help="allow nonnegative real multiplicities (default requires positive integers)",
    )


def _radial_solution_csv(params: ModelParams, sol: RadialSolution, tol: float) -> tuple[dict, list, list]:
    profiles = reconstruct_profiles(sol, params)
    meta = {
        "N": params.N,
        "n1": params.n1,
        "n2": params.n2,
        "tau": params.tau,
        "theorem_mode": params.theorem_mode,
        "rmin": sol.mesh.r_min,
        "rmax": sol.mesh.r_max,
        "nodes": sol.mesh.n,
        "tol": tol,
        "iterations": sol.iterations,
        "residual": sol.residual,
    }
    header = ["r", "u1", "u2", "Q1", "Q2", "f", "fNA", "E1", "E2"]
    cols = [
        sol.mesh.r,
        sol.u1,
        sol.u2,
        profiles.Q1,
        profiles.Q2,
        profiles.f,
        profiles.f_NA,
        sol.E1,
        sol.E2,
    ]
    return meta, header, cols


def _load_radial_csv(path: str) -> tuple[ModelParams, RadialSolution]:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError(f"{path}: missing metadata header line")
        meta = {}
        for item in first[1:].split():
            key, _, value = item.partition("=")
            meta[key] = value
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    params = ModelParams(
        N=int(meta["N"]),
        n1=float(meta["n1"]),
        n2=float(meta["n2"]),
        tau=float(meta["tau"]),
        theorem_mode=meta.get("theorem_mode", "true") == "true",
    )
    col = {name: data[:, k] for k, name in enumerate(header)}
    mesh = RadialMesh(r=col["r"])
    bg = background(params)
    r2 = mesh.r**2
    P1 = col["u1"] - bg.u0_1(r2)
    P2 = col["u2"] - bg.u0_2(r2)
    sol = RadialSolution(
        params=params,
        mesh=mesh,
        P1=P1,
        P2=P2,
        u1=col["u1"],
        u2=col["u2"],
        E1=col["E1"],
        E2=col["E2"],
        iterations=int(float(meta.get("iterations", "0"))),
        residual=float(meta.get("residual", "nan")),
    )
    return params, sol


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_constants(args) -> int:
    params = _params_from_args(args)
    cd = coupling_matrix(params)
    sc = spectral_constants(cd)
    t1, t2 = flux_targets(params, sc)
    payload = {
        "params": {
            "N": params.N,
            "n1": params.n1,
            "n2": params.n2,
            "tau": params.tau,
            "theorem_mode": params.theorem_mode,
        },
        "alpha": cd.alpha,
        "beta": cd.beta,
        "gamma": cd.gamma,
        "A": cd.A.tolist(),
        "L": cd.L.tolist(),
        "R": cd.R.tolist(),
        "B": cd.B.tolist(),
        "M": cd.M.tolist(),
        "lambda1": sc.lambda1,
        "lambda2": sc.lambda2,
        "lambda0": sc.lambda0,
        "lambda3": sc.lambda3,
        "lambda4": sc.lambda4,
        "lambda": sc.lambda_,
        "T": sc.T.tolist(),
        "m": sc.m,
        "p": sc.p,
        "q": sc.q,
        "flux_targets": [t1, t2],
    }
    if args.json:
        out: list[str] = []
        _json_write(payload, out)
        print("".join(out))
    else:
        for key, value in payload.items():
            if isinstance(value, dict):
                inner = " ".join(f"{k}={_fmt(v)}" for k, v in value.items())
                print(f"{key}: {inner}")
            elif isinstance(value, list):
                print(f"{key}: {value}")
            else:
                print(f"{key}: {_fmt(value)}")
    return 0


def _cmd_solve_radial(args) -> int:
    params = _params_from_args(args)
    cd = coupling_matrix(params)
    bg = background(params)
    mesh = radial_mesh(r_min=args.rmin, r_max=args.rmax, n=args.nodes)
    sol = solve_radial_P(params, cd, bg, mesh, tol=args.tol, max_iter=args.max_iter)
    meta, header, cols = _radial_solution_csv(params, sol, args.tol)
    text = _write_csv(args.out, meta, header, cols)
    if text is not None:
        sys.stdout.write(text)
    else:
        print(f"wrote {args.out} ({sol.iterations} iterations, residual {sol.residual:.3e})")
    return 0


def _cmd_solve_profile(args) -> int:
    ps = solve_profile_bps(
        args.N, r_max=args.rmax, tol=args.tol, n=args.nodes, r_min=args.rmin
    )
    meta = {
        "N": args.N,
        "rmin": ps.mesh.r_min,
        "rmax": ps.mesh.r_max,
        "nodes": ps.mesh.n,
        "tol": args.tol,
        "iterations": ps.iterations,
        "residual": ps.residual,
        "c1": ps.c1,
        "c2": ps.c2,
    }
    header = ["r", "f", "fNA", "Q1", "Q2"]
    cols = [ps.mesh.r, ps.f, ps.f_NA, ps.Q1, ps.Q2]
    text = _write_csv(args.out, meta, header, cols)
    if text is not None:
        sys.stdout.write(text)
    else:
        print(f"wrote {args.out} ({ps.iterations} iterations, residual {ps.residual:.3e})")
    return 0


def _cmd_solve_planar(args) -> int:
    params = _params_from_args(args)
    cd = coupling_matrix(params)
    bg = background(params)
    grid = PlanarGrid(half_width=args.box, points_per_side=args.grid)
    sol = solve_planar(params, cd, bg, grid, tol=args.tol, max_iter=args.max_iter)
    meta = {
        "N": params.N,
        "n1": params.n1,
        "n2": params.n2,
        "tau": params.tau,
        "theorem_mode": params.theorem_mode,
        "box": grid.half_width,
        "grid": grid.points_per_side,
        "tol": args.tol,
        "iterations": sol.iterations,
        "gradient_norm": sol.final_gradient_norm,
        "energy": sol.final_energy,
    }
    header = ["x", "y", "w1", "w2", "u1", "u2"]
    n = grid.points_per_side
    X = np.repeat(grid.coords, n)
    Y = np.tile(grid.coords, n)
    cols = [
        X,
        Y,
        sol.w.w1.ravel(),
        sol.w.w2.ravel(),
        sol.u1.ravel(),
        sol.u2.ravel(),
    ]
    text = _write_csv(args.out, meta, header, cols)
    if text is not None:
        sys.stdout.write(text)
    else:
        print(f"wrote {args.out} ({sol.iterations} iterations, residual {sol.final_gradient_norm:.3e})")
    return 0


def _cmd_verify(args) -> int:
    if not os.path.exists(args.input):
        print(f"error: solution file not found: {args.input}", file=sys.stderr)
        return 2
    params, sol = _load_radial_csv(args.input)
    requested = {"N": args.N, "n1": args.n1, "n2": args.n2}
    actual = {"N": params.N, "n1": params.n1, "n2": params.n2}
    for key, want in requested.items():
        if want is not None and want != actual[key]:
            print(
                f"error: requested {key}={want} does not match the solution file "
                f"({key}={actual[key]})",
                file=sys.stderr,
            )
            return 2
    cd = coupling_matrix(params)
    sc = spectral_constants(cd)
    report = build_report(params, cd, sc, radial_sol=sol, window=tuple(args.window))
    text = emit_report(report)
    if args.out:
        _write_text(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_report(args) -> int:
    params = _params_from_args(args)
    cd = coupling_matrix(params)
    sc = spectral_constants(cd)
    bg = background(params)
    mesh = radial_mesh(r_min=args.rmin, r_max=args.rmax, n=args.nodes)
    radial_sol = solve_radial_P(params, cd, bg, mesh, tol=args.tol)

    planar_sol = None
    planar_alt = None
    if args.planar:
        grid = PlanarGrid(half_width=args.box, points_per_side=args.grid)
        planar_sol = solve_planar(params, cd, bg, grid, tol=args.planar_tol)
        if args.uniqueness:
            rng = np.random.default_rng(args.seed)
            init = FieldPair.zeros(grid)
            shape = (grid.points_per_side - 2, grid.points_per_side - 2)
            init.w1[1:-1, 1:-1] = rng.uniform(-0.5, 0.5, shape)
            init.w2[1:-1, 1:-1] = rng.uniform(-0.5, 0.5, shape)
            planar_alt = solve_planar(params, cd, bg, grid, tol=args.planar_tol, initial=init)

    report = build_report(
        params,
        cd,
        sc,
        radial_sol=radial_sol,
        planar_sol=planar_sol,
        planar_sol_alt=planar_alt,
        window=tuple(args.window),
    )
    text = emit_report(report)
    if args.out:
        _write_text(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortexlab",
        description="Solvers and verification for coupled planar vortex equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print coupling and spectral constants")
    _add_param_options(p)
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("solve-radial", help="solve the radial system")
    _add_param_options(p)
    p.add_argument("--rmin", type=float, default=1e-4)
    p.add_argument("--rmax", type=float, default=30.0)
    p.add_argument("--nodes", type=int, default=4000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--out", help="output CSV path (stdout when omitted)")
    p.set_defaults(func=_cmd_solve_radial)

    p = sub.add_parser("solve-profile", help="solve the first-order profile system")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--rmin", type=float, default=0.02)
    p.add_argument("--rmax", type=float, default=30.0)
    p.add_argument("--nodes", type=int, default=24000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", help="output CSV path (stdout when omitted)")
    p.set_defaults(func=_cmd_solve_profile)

    p = sub.add_parser("solve-planar", help="minimize the planar functional")
    _add_param_options(p)
    p.add_argument("--box", type=float, default=15.0, help="box half-width")
    p.add_argument("--grid", type=int, default=512, help="points per side")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=60)
    p.add_argument("--out", help="output CSV path (stdout when omitted)")
    p.set_defaults(func=_cmd_solve_planar)

    p = sub.add_parser("verify", help="verification report from a saved radial CSV")
    p.add_argument("--input", default="radial.csv", help="radial solution CSV")
    p.add_argument("--N", type=int, default=None, help="expected rank (checked against the file)")
    p.add_argument("--n1", type=float, default=None)
    p.add_argument("--n2", type=float, default=None)
    p.add_argument("--window", type=float, nargs=2, default=(10.0, 14.0))
    p.add_argument("--out", help="output report path (stdout when omitted)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("report", help="solve and emit a full verification report")
    _add_param_options(p)
    p.add_argument("--rmin", type=float, default=1e-4)
    p.add_argument("--rmax", type=float, default=30.0)
    p.add_argument("--nodes", type=int, default=4000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--planar", action="store_true", help="also run the planar solver")
    p.add_argument("--box", type=float, default=15.0)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--planar-tol", type=float, default=1e-8)
    p.add_argument("--uniqueness", action="store_true", help="second planar solve from a random start")
    p.add_argument("--seed", type=int, default=20240)
    p.add_argument("--window", type=float, nargs=2, default=(10.0, 14.0))
    p.add_argument("--out", help="output report path (stdout when omitted)")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: Optional[list] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _apply_thread_cap()
        return args.func(args)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, VortexlabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        target = getattr(exc, "filename", None)
        print(f"error: I/O failure on {target or 'output'}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
