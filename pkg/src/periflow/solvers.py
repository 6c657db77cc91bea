"""Saddle-point solves: direct sparse factorisation for the linear problem,
Picard (Oseen) iteration with optional Newton acceleration for the
nonlinear one.

The Picard map linearises convection at the previous iterate and solves the
resulting Oseen system; its fixed points are exactly the discrete steady
states.  The iteration starts from the linear-problem solution at the same
forcing, which is already the answer for a straight channel.  Existence
theory guarantees a solution but not that this iteration reaches it, so
non-convergence is reported as an explicit failure carrying the iterate
history instead of being silently absorbed.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .assembly import (
    assemble_convection_skew,
    assemble_newton_coupling,
    assemble_system,
)
from .constraints import ConstraintSet, apply_constraints, expand_solution

__all__ = [
    "SolveOptions",
    "SolveDiagnostics",
    "FieldSolution",
    "SaddleSolveError",
    "NonlinearSolveError",
    "solve_linear_saddle",
    "solve_stokes",
    "solve_navier_stokes",
]


class SaddleSolveError(RuntimeError):
    """Sparse factorisation failed (singular or structurally broken system)."""


class NonlinearSolveError(RuntimeError):
    """Picard/Newton iteration ran out of iterations.

    Carries the last iterate (`solution`) and the update-norm history
    (`update_norms`) for post-mortem inspection.
    """

    def __init__(self, message, solution, update_norms):
        super().__init__(message)
        self.solution = solution
        self.update_norms = update_norms


@dataclass(frozen=True)
class SolveOptions:
    """Tolerances and iteration limits.

    The nonlinear test is on the H1-seminorm of the velocity update,
    relative to max(1, |u|_H1) so it scales sensibly with the forcing.
    Newton steps replace Picard steps once the update norm drops below
    `newton_threshold`.
    """

    linear_tol: float = 1e-12
    nonlinear_tol: float = 1e-10
    max_picard: int = 50
    newton_threshold: float = 1e-3
    use_newton: bool = True

    def __post_init__(self):
        if self.linear_tol <= 0 or self.nonlinear_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_picard < 1:
            raise ValueError("max_picard must be >= 1")


@dataclass
class SolveDiagnostics:
    linear_residual: float = 0.0
    iterations: int = 0
    update_norms: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    converged: bool = True


@dataclass
class FieldSolution:
    """Velocity/pressure coefficients plus solve diagnostics.

    u is the full interleaved velocity vector (slaves already expanded,
    Dirichlet dofs zero); p has exact zero mean.
    """

    u: np.ndarray
    p: np.ndarray
    lam: float
    multiplier: float = 0.0
    diagnostics: SolveDiagnostics = field(default_factory=SolveDiagnostics)


def solve_linear_saddle(K, rhs, tol=1e-12):
    """Direct sparse solve of the reduced system with a residual check."""
    try:
        lu = spla.splu(K.tocsc())
    except RuntimeError as err:
        # SuperLU does not report the failing pivot; locate an obvious one
        csr = K.tocsr()
        empty = np.nonzero(np.diff(csr.indptr) == 0)[0]
        where = (
            f"structurally empty row {empty[0]}" if empty.size else "numerically singular pivot"
        )
        raise SaddleSolveError(f"saddle-point factorisation failed ({where}): {err}") from err
    x = lu.solve(rhs)
    if not np.all(np.isfinite(x)):
        raise SaddleSolveError("saddle-point solve produced non-finite values")
    # one step of iterative refinement; costs two triangular solves and buys
    # an order of magnitude or two of forward accuracy on stiff systems
    x = x + lu.solve(rhs - K @ x)
    rhs_norm = np.linalg.norm(rhs)
    residual = float(np.linalg.norm(K @ x - rhs))
    if rhs_norm > 0 and residual > 100 * tol * rhs_norm:
        raise SaddleSolveError(
            f"direct solve residual {residual:.3e} exceeds {100 * tol:.1e} * |rhs|"
        )
    return x, residual / rhs_norm if rhs_norm > 0 else residual


def _mesh_tag(mesh):
    kind = mesh.geometry.kind if mesh.geometry is not None else "custom"
    return f"{kind} {mesh.nx}x{mesh.ny}"


def solve_stokes(mesh, dofs, cs: ConstraintSet, lam, opts=None, body_force=None,
                 system=None):
    """Unique solution of the linear problem at pressure-loss coefficient lam."""
    opts = opts or SolveOptions()
    if system is None:
        system = assemble_system(mesh, dofs, lam, body_force=body_force)
    elif body_force is not None:
        raise ValueError("pass either a preassembled system or a body force, not both")
    reduced = apply_constraints(system, cs)
    K, rhs = reduced.kkt()
    try:
        x, rel = solve_linear_saddle(K, rhs, opts.linear_tol)
    except SaddleSolveError as err:
        raise SaddleSolveError(f"{err} [mesh {_mesh_tag(mesh)}]") from err
    u, p, mu = expand_solution(x, cs, system.m)
    return FieldSolution(u=u, p=p, lam=lam, multiplier=mu,
                         diagnostics=SolveDiagnostics(linear_residual=rel))


def _h1_seminorm(A, du):
    return float(np.sqrt(max(du @ (A @ du), 0.0)))


def solve_navier_stokes(mesh, dofs, cs: ConstraintSet, lam, opts=None,
                        body_force=None):
    """Steady nonlinear solve by Picard iteration with Newton acceleration."""
    opts = opts or SolveOptions()
    system = assemble_system(mesh, dofs, lam, body_force=body_force)
    reduced = apply_constraints(system, cs)
    R = cs.R

    stokes = solve_stokes(mesh, dofs, cs, lam, opts, system=system)
    u_full = stokes.u
    nr = reduced.n_reduced
    x = np.zeros(reduced.dimension)
    x[:nr] = u_full[cs.free_dofs]
    x[nr : nr + reduced.n_pressure] = stokes.p

    _, rhs = reduced.kkt()
    diag = SolveDiagnostics(converged=False)
    for it in range(1, opts.max_picard + 1):
        Ntil = assemble_convection_skew(u_full, mesh, dofs)
        Nr = (R.T @ Ntil @ R).tocsr()
        K, _ = reduced.kkt(Nr)

        newton = bool(
            opts.use_newton
            and diag.update_norms
            and diag.update_norms[-1] < opts.newton_threshold
        )
        if newton:
            Gr = (R.T @ assemble_newton_coupling(u_full, mesh, dofs) @ R).tocsr()
            J, _ = reduced.kkt(Nr + Gr)
            residual = K @ x - rhs
            delta, _ = solve_linear_saddle(J, -residual, opts.linear_tol)
            x_new = x + delta
        else:
            x_new, _ = solve_linear_saddle(K, rhs, opts.linear_tol)

        du = R @ (x_new[:nr] - x[:nr])
        u_scale = max(1.0, _h1_seminorm(system.A, R @ x_new[:nr]))
        update = _h1_seminorm(system.A, du) / u_scale
        diag.update_norms.append(update)
        diag.steps.append("newton" if newton else "picard")
        diag.iterations = it
        x = x_new
        u_full = R @ x[:nr]
        if update <= opts.nonlinear_tol:
            diag.converged = True
            break

    # true nonlinear residual at the final iterate
    Ntil = assemble_convection_skew(u_full, mesh, dofs)
    K, _ = reduced.kkt((R.T @ Ntil @ R).tocsr())
    rhs_norm = np.linalg.norm(rhs)
    diag.linear_residual = float(np.linalg.norm(K @ x - rhs)) / (rhs_norm or 1.0)

    u, p, mu = expand_solution(x, cs, system.m)
    solution = FieldSolution(u=u, p=p, lam=lam, multiplier=mu, diagnostics=diag)
    if not diag.converged:
        raise NonlinearSolveError(
            f"Picard/Newton did not converge in {opts.max_picard} iterations "
            f"(last update {diag.update_norms[-1]:.3e})",
            solution,
            diag.update_norms,
        )
    return solution
