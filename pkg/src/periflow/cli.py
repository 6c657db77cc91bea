"""Command-line driver.

    periflow solve <config> [--lambda X] [--out DIR]
    periflow verify <config> [--lambda X] [--out DIR]
    periflow convergence <config> [--out DIR]

`solve` runs one case and writes the requested reports; `verify` runs the
full identity suite regardless of the configured report list; `convergence`
runs the mesh sweep (manufactured-solution study on a straight channel,
jump/derivative refinement study on wavy walls).  Exit status is 0 only if
the solve converged and every tolerance-bearing check passed.
"""

import argparse
import sys

import numpy as np

from .analysis import (
    identity_refinement_study,
    manufactured_solution_study,
    norms_and_flux,
    trace_profiles,
)
from .assembly import assemble_system
from .config import ConfigError, RunConfig, config_sections, load_config
from .constraints import build_constraints
from .dofmap import build_dofmap
from .manufactured import default_manufactured
from .meshing import build_channel_mesh
from .reports import (
    CheckResult,
    run_checks,
    write_convergence_csv,
    write_manifest,
    write_traces_csv,
)
from .solvers import NonlinearSolveError, SaddleSolveError, solve_navier_stokes, solve_stokes
from .vtk_io import write_fields

RATE_BANDS = {"u_h1": (2.0, 0.2), "u_l2": (3.0, 0.3), "p_l2": (2.0, 0.3)}


def main(argv=None):
    parser = argparse.ArgumentParser(prog="periflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("solve", "run one case and write reports"),
        ("verify", "run the full identity suite"),
        ("convergence", "run the mesh-refinement sweep"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config", help="path to the INI configuration file")
        p.add_argument("--lambda", dest="lam", type=float, default=None,
                       help="override the pressure-loss coefficient")
        p.add_argument("--out", default=None, help="override the output directory")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, lam_override=args.lam, out_override=args.out)
        _prepare_out_dir(cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2

    try:
        if args.command == "convergence":
            return _cmd_convergence(cfg)
        return _cmd_solve(cfg, full_suite=(args.command == "verify"))
    except (SaddleSolveError, NonlinearSolveError) as err:
        print(f"solver error: {err}", file=sys.stderr)
        write_manifest(cfg.out_dir / "MANIFEST.txt", config_sections(cfg), [],
                       "failed", [f"solver: {err}"])
        return 1


def _prepare_out_dir(cfg: RunConfig):
    try:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        probe = cfg.out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as err:
        raise ConfigError(f"[output] directory: not writable: {err}") from err


def _emit(check):
    tol = "-" if check.tolerance is None else f"{check.tolerance:.6g}"
    print(f"RESULT {check.name} {check.status} value={check.value:.12g} tol={tol}")


def _cmd_solve(cfg: RunConfig, full_suite=False):
    mesh = build_channel_mesh(cfg.geometry, cfg.nx, cfg.ny)
    dofs = build_dofmap(mesh)
    cs = build_constraints(mesh, dofs)
    system = assemble_system(mesh, dofs, cfg.lam)

    failure_note = None
    try:
        if cfg.problem == "navier-stokes":
            solution = solve_navier_stokes(mesh, dofs, cs, cfg.lam, cfg.solver)
        else:
            solution = solve_stokes(mesh, dofs, cs, cfg.lam, cfg.solver, system=system)
    except NonlinearSolveError as err:
        solution = err.solution
        failure_note = str(err)

    reports = set(cfg.reports) | ({"traces", "fields", "energy"} if full_suite else set())
    outputs = _write_outputs(cfg, mesh, solution, reports)

    checks = run_checks(solution, mesh, dofs, system=system,
                        tolerances=cfg.tolerances, problem=cfg.problem)
    nf = norms_and_flux(solution, mesh)
    for check in checks:
        _emit(check)
    print(f"norms: u_l2={nf['u_l2']:.9g} u_h1={nf['u_h1']:.9g} "
          f"p_l2={nf['p_l2']:.9g} flux={nf['flux']:.9g}")

    ok = failure_note is None and all(c.passed for c in checks)
    status = "ok" if ok else "failed"
    extra = [f"solver: {failure_note}"] if failure_note else []
    extra += [f"norms u_l2={nf['u_l2']:.12g} u_h1={nf['u_h1']:.12g} "
              f"p_l2={nf['p_l2']:.12g} flux={nf['flux']:.12g}"]
    extra += [f"output {name} {path}" for name, path in outputs]
    write_manifest(cfg.out_dir / "MANIFEST.txt", config_sections(cfg), checks, status, extra)
    print(f"STATUS {status}  ({cfg.out_dir / 'MANIFEST.txt'})")
    return 0 if ok else 1


def _write_outputs(cfg, mesh, solution, reports):
    outputs = []
    if "fields" in reports:
        path = write_fields(solution, mesh, cfg.out_dir / "fields.vtk")
        outputs.append(("fields", path))
    if "traces" in reports:
        g0, g1 = trace_profiles(solution, mesh)
        path = write_traces_csv(cfg.out_dir / "traces.csv", g0, g1)
        outputs.append(("traces", path))
        if cfg.figures:
            from .figures import save_trace_figure

            path = save_trace_figure(cfg.out_dir / "traces.png", g0, g1, solution.lam)
            outputs.append(("traces_figure", path))
    if cfg.figures and "fields" in reports:
        from .figures import save_field_figure

        path = save_field_figure(cfg.out_dir / "fields.png", mesh, solution)
        outputs.append(("fields_figure", path))
    return outputs


def _cmd_convergence(cfg: RunConfig):
    checks, outputs = [], []
    if cfg.geometry.is_straight:
        table = manufactured_solution_study(
            cfg.geometry, default_manufactured(), cfg.convergence_meshes,
            problem=cfg.problem, opts=cfg.solver,
        )
        outputs.append(("convergence", write_convergence_csv(
            cfg.out_dir / "convergence.csv", table)))
        if cfg.figures:
            from .figures import save_convergence_figure

            outputs.append(("convergence_figure", save_convergence_figure(
                cfg.out_dir / "convergence.png", table)))
        for key, (target, width) in RATE_BANDS.items():
            rate = table.fitted(key)
            checks.append(CheckResult(f"rate_{key}_dev", abs(rate - target), width))
            print(f"rate {key}: fitted={rate:.3f} "
                  f"pairwise={np.round(table.rates[key], 3).tolist()}")
        if not table.trusted:
            checks.append(CheckResult("monotone_errors", 1.0, 0.5))
    else:
        study = identity_refinement_study(
            cfg.geometry, cfg.lam, cfg.convergence_meshes,
            problem=cfg.problem, opts=cfg.solver,
        )
        _write_refinement_csv(cfg.out_dir / "convergence.csv", study)
        outputs.append(("convergence", cfg.out_dir / "convergence.csv"))
        if cfg.figures:
            from .figures import save_refinement_figure

            outputs.append(("convergence_figure", save_refinement_figure(
                cfg.out_dir / "convergence.png", study)))
        worst_rate = float(np.min(study["jump_rates"]))
        ratios = study["deriv_mismatch"][1:] / study["deriv_mismatch"][:-1]
        print(f"jump rates: {np.round(study['jump_rates'], 3).tolist()} "
              f"deriv ratios: {np.round(ratios, 3).tolist()}")
        checks.append(CheckResult("jump_rate_shortfall", max(0.0, 2.0 - worst_rate), 1e-12))
        checks.append(CheckResult("deriv_mismatch_ratio", float(np.max(ratios)), 0.6))

    for check in checks:
        _emit(check)
    ok = all(c.passed for c in checks)
    status = "ok" if ok else "failed"
    extra = [f"output {name} {path}" for name, path in outputs]
    write_manifest(cfg.out_dir / "MANIFEST.txt", config_sections(cfg), checks, status, extra)
    print(f"STATUS {status}  ({cfg.out_dir / 'MANIFEST.txt'})")
    return 0 if ok else 1


def _write_refinement_csv(path, study):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "jump_dev", "jump_rate", "deriv_mismatch"])
        for i in range(len(study["h"])):
            rate = f"{study['jump_rates'][i - 1]:.6g}" if i > 0 else ""
            writer.writerow(
                [f"{study['h'][i]:.17g}", f"{study['jump_dev'][i]:.17g}", rate,
                 f"{study['deriv_mismatch'][i]:.17g}"]
            )


if __name__ == "__main__":
    sys.exit(main())
