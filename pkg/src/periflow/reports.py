"""Verification checks and delimited/manifest output.

A check compares a measured quantity against a tolerance; checks without a
meaningful tolerance on the given geometry (the jump and derivative
identities hold only in the refinement limit on wavy walls) are reported as
informational unless the configuration supplies an explicit tolerance.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .analysis import derivative_periodicity, norms_and_flux, poiseuille_exact, pressure_jump
from .assembly import assemble_pressure_loss_rhs

__all__ = [
    "CheckResult",
    "run_checks",
    "write_traces_csv",
    "write_convergence_csv",
    "write_manifest",
]

DEFAULT_TOLERANCES = {
    "energy_stokes": 1e-10,
    "energy_ns": 1e-8,
    "jump": 1e-8,
    "periodicity": 1e-8,
    "divergence": 1e-10,
    "flux": 1e-8,
    "poiseuille": 1e-8,
}


@dataclass
class CheckResult:
    name: str
    value: float
    tolerance: float = None   # None -> informational only

    @property
    def passed(self):
        return True if self.tolerance is None else self.value <= self.tolerance

    @property
    def status(self):
        if self.tolerance is None:
            return "INFO"
        return "PASS" if self.passed else "FAIL"


def run_checks(solution, mesh, dofs, system=None, tolerances=None, problem="stokes"):
    """The identity suite: energy, divergence, jump, derivative periodicity.

    On a straight channel the exact solution lies in the discrete space, so
    the jump, flux and nodal errors are checked against tight tolerances;
    on wavy walls those quantities are reported without a verdict unless
    the caller supplies tolerances.
    """
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        for key, val in tolerances.items():
            if key == "energy":
                tol["energy_stokes"] = tol["energy_ns"] = val
            else:
                tol[key] = val
    straight = mesh.geometry is not None and mesh.geometry.is_straight
    lam = solution.lam
    checks = []

    nf = norms_and_flux(solution, mesh)
    energy = nf["energy"]
    f = system.f if system is not None else assemble_pressure_loss_rhs(mesh, dofs, lam)
    work = float(f @ solution.u)
    scale = energy if energy > 0 else 1.0
    ekey = "energy_ns" if problem == "navier-stokes" else "energy_stokes"
    checks.append(CheckResult("energy_identity", abs(energy - work) / scale, tol[ekey]))

    if system is not None:
        div = float(np.max(np.abs(system.B @ solution.u)))
        checks.append(
            CheckResult("divergence_residual", div, tol["divergence"] * max(nf["u_l2"], 1.0))
        )

    _, _, stats = pressure_jump(solution, mesh)
    checks.append(
        CheckResult("pressure_jump_max_dev", stats["max_dev"], tol["jump"] if straight else None)
    )
    checks.append(CheckResult("pressure_jump_mean_dev", stats["mean_dev"], None))

    mismatch = derivative_periodicity(solution, mesh)
    checks.append(
        CheckResult(
            "derivative_periodicity", mismatch, tol["periodicity"] if straight else None
        )
    )

    if straight:
        checks.append(
            CheckResult("flux", abs(nf["flux"] - 2.0 * lam / 3.0), tol["flux"] * max(abs(lam), 1.0))
        )
        u1e, u2e, pe = poiseuille_exact(
            mesh.geometry, lam, mesh.nodes[:, 0], mesh.nodes[:, 1]
        )
        verr = max(
            float(np.max(np.abs(solution.u[0::2] - u1e))),
            float(np.max(np.abs(solution.u[1::2] - u2e))),
        )
        verts = mesh.nodes[: mesh.n_vertices]
        perr = float(np.max(np.abs(solution.p - lam * (0.5 - verts[:, 0]))))
        scale = max(abs(lam), 1.0)
        checks.append(CheckResult("poiseuille_velocity", verr, tol["poiseuille"] * scale))
        checks.append(CheckResult("poiseuille_pressure", perr, tol["poiseuille"] * scale))

    return checks


def write_traces_csv(path, g0, g1):
    """Matched-ordinate section traces; dudx columns are the primary
    (streamwise) component, dvdx the transverse one."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["y", "p_gamma0", "p_gamma1", "jump", "dudx_gamma0", "dudx_gamma1",
             "dvdx_gamma0", "dvdx_gamma1"]
        )
        for i in range(len(g0.y)):
            writer.writerow(
                [
                    f"{g0.y[i]:.17g}",
                    f"{g0.pressure[i]:.17g}",
                    f"{g1.pressure[i]:.17g}",
                    f"{g1.pressure[i] - g0.pressure[i]:.17g}",
                    f"{g0.dudx1[i]:.17g}",
                    f"{g1.dudx1[i]:.17g}",
                    f"{g0.dudx2[i]:.17g}",
                    f"{g1.dudx2[i]:.17g}",
                ]
            )
    return path


def write_convergence_csv(path, table):
    keys = list(table.errors)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["h", "dofs"] + [f"err_{k}" for k in keys] + [f"rate_{k}" for k in keys]
        )
        for i in range(len(table.h)):
            row = [f"{table.h[i]:.17g}", str(int(table.dofs[i]))]
            row += [f"{table.errors[k][i]:.17g}" for k in keys]
            row += [
                f"{table.rates[k][i - 1]:.6g}" if i > 0 and np.isfinite(table.rates[k][i - 1])
                else ""
                for k in keys
            ]
            writer.writerow(row)
    return path


def write_manifest(path, sections, results, status, extra_lines=()):
    """Effective config echo (re-parseable INI) plus commented check results."""
    lines = ["# periflow run manifest", f"# STATUS {status}"]
    for res in results:
        tol = "-" if res.tolerance is None else f"{res.tolerance:.6g}"
        lines.append(f"# RESULT {res.name} {res.status} value={res.value:.12g} tol={tol}")
    lines.extend(f"# {text}" for text in extra_lines)
    lines.append("")
    for section, keys in sections.items():
        lines.append(f"[{section}]")
        for key, val in keys.items():
            lines.append(f"{key} = {val}")
        lines.append("")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
    return path
