"""Post-processing: traces on the end sections, the inter-section pressure
jump, derivative periodicity, strong-form residuals, norms and fluxes, and
mesh-refinement studies.

The jump and derivative checks probe the two relations the solver never
imposes: the pressure of the recovered mixed solution must drop by the
forcing coefficient between inlet and outlet, and the x-derivative of the
velocity must match across the sections.  Both hold exactly for the
continuous solution; discretely they converge under refinement, except on
the straight channel where the exact fields live in the discrete space and
they hold to solver precision.
"""

from dataclasses import dataclass, field

import numpy as np

from .assembly import element_data, quadrature_points_physical
from .constraints import build_constraints
from .dofmap import build_dofmap
from .elements import (
    edge_rule,
    p1_values,
    p2_ref_hessians,
    p2_values,
    triangle_jacobians,
    triangle_rule,
)
from .fields import (
    pressure_gradients,
    pressure_values,
    reference_coords,
    velocity_gradients,
)
from .geometry import ChannelGeometry
from .meshing import BoundaryTag, Mesh, build_channel_mesh
from .solvers import SolveOptions, solve_navier_stokes, solve_stokes

__all__ = [
    "TraceProfile",
    "ConvergenceTable",
    "poiseuille_exact",
    "trace_profiles",
    "pressure_jump",
    "derivative_periodicity",
    "strong_residual",
    "norms_and_flux",
    "errors_vs_exact",
    "manufactured_solution_study",
    "identity_refinement_study",
]

ERROR_RULE = triangle_rule(6)


def poiseuille_exact(geom: ChannelGeometry, lam, x, y):
    """Exact parabolic solution of the straight channel, zero-mean pressure.

    u1 = lam (1 - y^2) / 2,  u2 = 0,  p = lam (1/2 - x); the pressure drops
    by exactly lam from inlet to outlet.
    """
    if not geom.is_straight:
        raise ValueError("the parabolic exact solution requires a straight channel")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u1 = 0.5 * lam * (1.0 - y**2)
    u2 = np.zeros_like(u1)
    p = lam * (0.5 - x)
    return u1, u2, p


@dataclass(frozen=True)
class TraceProfile:
    """Samples along one end section at edge Gauss ordinates."""

    tag: BoundaryTag
    y: np.ndarray
    pressure: np.ndarray
    dudx1: np.ndarray
    dudx2: np.ndarray
    weights: np.ndarray = field(repr=False, default=None)  # dy line measure


def _section_trace(solution, mesh, tag, n_gauss=3):
    edges = sorted(
        mesh.edges_on(tag), key=lambda e: min(mesh.nodes[e.nodes[0], 1], mesh.nodes[e.nodes[1], 1])
    )
    if not edges:
        raise ValueError(f"mesh has no edges tagged {tag.name}")
    s, w = edge_rule(n_gauss)
    ys, ps, d1, d2, wts = [], [], [], [], []
    for e in edges:
        a, b = e.nodes
        if mesh.nodes[a, 1] > mesh.nodes[b, 1]:
            a, b = b, a
        ya, yb = mesh.nodes[a, 1], mesh.nodes[b, 1]
        pts = np.column_stack([np.full(n_gauss, mesh.nodes[a, 0]), ya + s * (yb - ya)])
        tris = np.full(n_gauss, e.triangle)
        ref = reference_coords(mesh, tris, pts)
        grads = velocity_gradients(mesh, solution.u, tris, ref)
        ys.append(pts[:, 1])
        ps.append(pressure_values(mesh, solution.p, tris, ref))
        d1.append(grads[:, 0, 0])
        d2.append(grads[:, 1, 0])
        wts.append(w * (yb - ya))
    return TraceProfile(
        tag=tag,
        y=np.concatenate(ys),
        pressure=np.concatenate(ps),
        dudx1=np.concatenate(d1),
        dudx2=np.concatenate(d2),
        weights=np.concatenate(wts),
    )


def trace_profiles(solution, mesh: Mesh, n_gauss=3):
    """Matched-ordinate traces on both sections."""
    g0 = _section_trace(solution, mesh, BoundaryTag.GAMMA0, n_gauss)
    g1 = _section_trace(solution, mesh, BoundaryTag.GAMMA1, n_gauss)
    if g0.y.shape != g1.y.shape or np.max(np.abs(g0.y - g1.y)) > 1e-12:
        raise ValueError("section trace ordinates do not match")
    return g0, g1


def pressure_jump(solution, mesh: Mesh, n_gauss=3):
    """Pointwise jump p(1, y) - p(0, y) and its deviation from -lam.

    Returns (inlet profile, outlet profile, stats) where stats holds the
    weighted mean jump over the section and max |jump + lam|.
    """
    g0, g1 = trace_profiles(solution, mesh, n_gauss)
    jump = g1.pressure - g0.pressure
    mean = float(jump @ g0.weights / g0.weights.sum())
    stats = {
        "mean_jump": mean,
        "max_dev": float(np.max(np.abs(jump + solution.lam))),
        "mean_dev": abs(mean + solution.lam),
    }
    return g0, g1, stats


def derivative_periodicity(solution, mesh: Mesh, n_gauss=3):
    """Sup-norm mismatch of the one-sided x-derivatives across the sections."""
    g0, g1 = trace_profiles(solution, mesh, n_gauss)
    return float(
        max(np.max(np.abs(g1.dudx1 - g0.dudx1)), np.max(np.abs(g1.dudx2 - g0.dudx2)))
    )


def strong_residual(solution, mesh: Mesh, body_force=None, convective=False):
    """Element-wise L2 norm of -lap(u) [+ (u.grad)u] + grad(p) - f.

    Second derivatives of the quadratic velocity are constant per element.
    Returns {"l2": global norm, "max_element": worst element norm}.
    """
    rule = ERROR_RULE
    N, grads, det, rule = element_data(mesh, rule)
    ucoef = solution.u.reshape(-1, 2)[mesh.tri_nodes]

    _, _, invJT = triangle_jacobians(mesh.nodes[mesh.triangles])
    Href = p2_ref_hessians()
    Hphys = np.einsum("tde,kef,tgf->tkdg", invJT, Href, invJT)
    lapN = np.einsum("tkdd->tk", Hphys)
    lap_u = np.einsum("tk,tkc->tc", lapN, ucoef)

    gradp = pressure_gradients(mesh, solution.p, np.arange(mesh.n_triangles))
    r = -lap_u[:, None, :] + gradp[:, None, :]
    if convective:
        uvals = np.einsum("qk,tkc->tqc", N, ucoef)
        gradu = np.einsum("tqke,tkc->tqce", grads, ucoef)
        r = r + np.einsum("tqe,tqce->tqc", uvals, gradu)
    else:
        r = np.broadcast_to(r, (mesh.n_triangles, len(rule.weights), 2)).copy()
    if body_force is not None:
        pts = quadrature_points_physical(mesh, rule)
        f1, f2 = body_force(pts[..., 0], pts[..., 1])
        r = r - np.stack(
            [np.broadcast_to(f1, r.shape[:2]), np.broadcast_to(f2, r.shape[:2])], axis=-1
        )
    per_element = np.einsum("q,tqc,tqc,t->t", rule.weights, r, r, det)
    return {
        "l2": float(np.sqrt(max(per_element.sum(), 0.0))),
        "max_element": float(np.sqrt(max(per_element.max(initial=0.0), 0.0))),
    }


def norms_and_flux(solution, mesh: Mesh):
    """Standard norms, the outlet flow rate, and the gradient energy."""
    N, grads, det, rule = element_data(mesh, ERROR_RULE)
    ucoef = solution.u.reshape(-1, 2)[mesh.tri_nodes]
    pcoef = solution.p[mesh.triangles]
    P = p1_values(rule.points)

    uvals = np.einsum("qk,tkc->tqc", N, ucoef)
    gradu = np.einsum("tqke,tkc->tqce", grads, ucoef)
    pvals = np.einsum("qa,ta->tq", P, pcoef)

    u_l2_sq = np.einsum("q,tqc,tqc,t->", rule.weights, uvals, uvals, det)
    semi_sq = np.einsum("q,tqce,tqce,t->", rule.weights, gradu, gradu, det)
    p_l2_sq = np.einsum("q,tq,tq,t->", rule.weights, pvals, pvals, det)

    s, w = edge_rule(3)
    flux = 0.0
    for e in mesh.edges_on(BoundaryTag.GAMMA1):
        a, b = e.nodes
        if mesh.nodes[a, 1] > mesh.nodes[b, 1]:
            a, b = b, a
        ya, yb = mesh.nodes[a, 1], mesh.nodes[b, 1]
        pts = np.column_stack([np.full(len(s), 1.0), ya + s * (yb - ya)])
        tris = np.full(len(s), e.triangle)
        ref = reference_coords(mesh, tris, pts)
        coefs = solution.u.reshape(-1, 2)[mesh.tri_nodes[tris]]
        vals = np.einsum("nk,nkc->nc", p2_values(ref), coefs)
        flux += (yb - ya) * float(w @ vals[:, 0])

    return {
        "u_l2": float(np.sqrt(u_l2_sq)),
        "u_h1_semi": float(np.sqrt(semi_sq)),
        "u_h1": float(np.sqrt(u_l2_sq + semi_sq)),
        "p_l2": float(np.sqrt(p_l2_sq)),
        "flux": flux,
        "energy": float(semi_sq),
    }


def errors_vs_exact(solution, mesh: Mesh, velocity, velocity_gradient, pressure):
    """Quadrature errors of the discrete fields against exact callables.

    Returns (velocity L2, velocity full H1, pressure L2) errors.
    """
    N, grads, det, rule = element_data(mesh, ERROR_RULE)
    pts = quadrature_points_physical(mesh, rule)
    x, y = pts[..., 0], pts[..., 1]

    ucoef = solution.u.reshape(-1, 2)[mesh.tri_nodes]
    uvals = np.einsum("qk,tkc->tqc", N, ucoef)
    gradu = np.einsum("tqke,tkc->tqce", grads, ucoef)
    pvals = np.einsum("qa,ta->tq", p1_values(rule.points), solution.p[mesh.triangles])

    u1, u2 = velocity(x, y)
    du = uvals - np.stack([u1, u2], axis=-1)
    d11, d12, d21, d22 = velocity_gradient(x, y)
    dgrad = gradu - np.stack(
        [np.stack([d11, d12], axis=-1), np.stack([d21, d22], axis=-1)], axis=2
    )
    dp = pvals - pressure(x, y)

    e_l2_sq = np.einsum("q,tqc,tqc,t->", rule.weights, du, du, det)
    e_h1_sq = e_l2_sq + np.einsum("q,tqce,tqce,t->", rule.weights, dgrad, dgrad, det)
    e_p_sq = np.einsum("q,tq,tq,t->", rule.weights, dp, dp, det)
    return float(np.sqrt(e_l2_sq)), float(np.sqrt(e_h1_sq)), float(np.sqrt(e_p_sq))


@dataclass
class ConvergenceTable:
    """Errors and observed orders over a refinement sequence (largest h first)."""

    h: np.ndarray
    dofs: np.ndarray
    errors: dict
    rates: dict
    trusted: bool
    note: str = ""

    def rows(self):
        keys = list(self.errors)
        for i in range(len(self.h)):
            row = {"h": self.h[i], "dofs": int(self.dofs[i])}
            for k in keys:
                row[f"err_{k}"] = self.errors[k][i]
                row[f"rate_{k}"] = self.rates[k][i - 1] if i > 0 else float("nan")
            yield row

    def fitted(self, key):
        """Least-squares slope of log error vs log h over the whole table."""
        e = np.asarray(self.errors[key])
        if np.any(e <= 0):
            return float("nan")
        return float(np.polyfit(np.log(self.h), np.log(e), 1)[0])


def _fit_rates(h, errors):
    rates, trusted = {}, True
    for key, e in errors.items():
        e = np.asarray(e)
        if np.any(e[1:] >= e[:-1]):
            trusted = False
        with np.errstate(divide="ignore", invalid="ignore"):
            rates[key] = np.log(e[:-1] / e[1:]) / np.log(h[:-1] / h[1:])
    return rates, trusted


def _solve_on(geom, nx, ny, lam, problem, opts, body_force=None):
    mesh = build_channel_mesh(geom, nx, ny)
    dofs = build_dofmap(mesh)
    cs = build_constraints(mesh, dofs)
    if problem == "navier-stokes":
        sol = solve_navier_stokes(mesh, dofs, cs, lam, opts, body_force=body_force)
    else:
        sol = solve_stokes(mesh, dofs, cs, lam, opts, body_force=body_force)
    return mesh, dofs, cs, sol


def manufactured_solution_study(
    geom: ChannelGeometry,
    ms,
    nx_values,
    problem="stokes",
    opts: SolveOptions = None,
    lam=0.0,
) -> ConvergenceTable:
    """Mesh-refinement study against a manufactured exact solution.

    `ms` bundles the exact fields and body force (see `manufactured`).
    Solves with the manufactured body force (plus the pressure-loss forcing
    `lam`, zero by default) and reports L2/H1 velocity and L2 pressure
    errors with observed orders.
    """
    nx_values = list(nx_values)
    if len(nx_values) < 2:
        raise ValueError("need at least two meshes for a convergence study")
    convective = problem == "navier-stokes"
    force = lambda x, y: ms.body_force(x, y, convective=convective)

    hs, ndofs = [], []
    errs = {"u_l2": [], "u_h1": [], "p_l2": []}
    for nx in nx_values:
        mesh, dofs, cs, sol = _solve_on(geom, nx, nx, lam, problem, opts, body_force=force)
        e_l2, e_h1, e_p = errors_vs_exact(
            sol, mesh, ms.velocity, ms.velocity_gradient, ms.pressure
        )
        hs.append(1.0 / nx)
        ndofs.append(dofs.n_velocity + dofs.n_pressure)
        errs["u_l2"].append(e_l2)
        errs["u_h1"].append(e_h1)
        errs["p_l2"].append(e_p)

    h = np.array(hs)
    errors = {k: np.array(v) for k, v in errs.items()}
    roundoff = all(np.all(e < 1e-12) for e in errors.values())
    if roundoff:
        rates = {k: np.full(len(h) - 1, np.nan) for k in errors}
        return ConvergenceTable(h, np.array(ndofs), errors, rates, True,
                                note="exact (errors at roundoff level)")
    rates, trusted = _fit_rates(h, errors)
    note = "" if trusted else "non-monotone error sequence; rates untrusted"
    return ConvergenceTable(h, np.array(ndofs), errors, rates, trusted, note)


def identity_refinement_study(geom, lam, nx_values, problem="stokes", opts=None):
    """Refinement behaviour of the jump and derivative-periodicity defects.

    Returns a dict with per-mesh mean-jump deviations |mean(j) + lam|,
    derivative mismatches, and the observed orders of the jump deviation.
    """
    jump_dev, deriv_mismatch, hs = [], [], []
    for nx in nx_values:
        mesh, dofs, cs, sol = _solve_on(geom, nx, nx, lam, problem, opts)
        _, _, stats = pressure_jump(sol, mesh)
        jump_dev.append(stats["mean_dev"])
        deriv_mismatch.append(derivative_periodicity(sol, mesh))
        hs.append(1.0 / nx)
    h = np.array(hs)
    jump_dev = np.array(jump_dev)
    deriv_mismatch = np.array(deriv_mismatch)
    with np.errstate(divide="ignore", invalid="ignore"):
        jump_rates = np.log(jump_dev[:-1] / jump_dev[1:]) / np.log(h[:-1] / h[1:])
    return {
        "h": h,
        "jump_dev": jump_dev,
        "jump_rates": jump_rates,
        "deriv_mismatch": deriv_mismatch,
    }
