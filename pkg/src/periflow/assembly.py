"""Assembly of the discrete operators of the mixed weak formulation.

Velocity uses continuous piecewise quadratics (two components per node),
pressure continuous piecewise linears: the inf-sup stable Taylor-Hood pair.
Everything is integrated with a degree-5 triangle rule, which is exact for
every form that appears, including the trilinear convection integrand
(quadratic velocity times its gradient times a quadratic test function has
total degree 5).

Element loops are vectorised over all triangles; contributions are scattered
in a fixed element order, so assembly is bitwise deterministic.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dofmap import DofMap
from .elements import (
    edge_rule,
    p1_values,
    p2_ref_grads,
    p2_values,
    triangle_jacobians,
    triangle_rule,
)
from .meshing import BoundaryTag, Mesh

__all__ = [
    "SparseSystem",
    "assemble_vector_laplacian",
    "assemble_divergence",
    "assemble_pressure_loss_rhs",
    "assemble_pressure_mean",
    "assemble_body_force",
    "assemble_convection",
    "assemble_convection_skew",
    "assemble_newton_coupling",
    "trilinear_form",
    "assemble_system",
]

DEFAULT_RULE = triangle_rule(5)


def element_data(mesh: Mesh, rule=None):
    """Per-element quadrature data: (N, grads, det, rule).

    N[q, i]          quadratic shape values at quadrature points,
    grads[t, q, i, d] physical gradients,
    det[t]           Jacobian determinants (twice the areas).
    """
    rule = rule or DEFAULT_RULE
    N = p2_values(rule.points)
    Gref = p2_ref_grads(rule.points)
    _, det, invJT = triangle_jacobians(mesh.nodes[mesh.triangles])
    grads = np.einsum("tde,qne->tqnd", invJT, Gref)
    return N, grads, det, rule


def quadrature_points_physical(mesh: Mesh, rule=None):
    rule = rule or DEFAULT_RULE
    J, _, _ = triangle_jacobians(mesh.nodes[mesh.triangles])
    v0 = mesh.nodes[mesh.triangles[:, 0]]
    return v0[:, None, :] + np.einsum("tde,qe->tqd", J, rule.points)


def _velocity_element_dofs(mesh: Mesh):
    """(ntri, 12) velocity dofs per element, components interleaved."""
    dofs = np.empty((mesh.n_triangles, 12), dtype=int)
    dofs[:, 0::2] = 2 * mesh.tri_nodes
    dofs[:, 1::2] = 2 * mesh.tri_nodes + 1
    return dofs


def _scatter(rows_per_el, cols_per_el, data, shape):
    rows = np.repeat(rows_per_el, data.shape[2], axis=1)
    cols = np.tile(cols_per_el, (1, data.shape[1]))
    mat = sp.coo_matrix(
        (data.reshape(-1), (rows.reshape(-1), cols.reshape(-1))), shape=shape
    )
    return mat.tocsr()


def assemble_vector_laplacian(mesh: Mesh, dofs: DofMap, rule=None):
    """Gram matrix of velocity gradients, int grad(u) : grad(v).

    The grad-grad inner products are formed before any scaling so element
    matrices (and hence the assembled matrix) are bitwise symmetric.
    """
    N, grads, det, rule = element_data(mesh, rule)
    gg = np.einsum("tqid,tqjd->tqij", grads, grads)
    K = np.einsum("q,t,tqij->tij", rule.weights, det, gg)
    el = np.zeros((mesh.n_triangles, 12, 12))
    el[:, 0::2, 0::2] = K
    el[:, 1::2, 1::2] = K
    vdofs = _velocity_element_dofs(mesh)
    return _scatter(vdofs, vdofs, el, (dofs.n_velocity, dofs.n_velocity))


def assemble_divergence(mesh: Mesh, dofs: DofMap, rule=None):
    """Coupling matrix B with entries -int q div(v), pressure rows."""
    N, grads, det, rule = element_data(mesh, rule)
    P = p1_values(rule.points)
    el = np.empty((mesh.n_triangles, 3, 12))
    for c in range(2):
        # component c of v contributes its d/dx_c derivative to div(v)
        el[:, :, c::2] = -np.einsum(
            "q,qa,tqj,t->taj", rule.weights, P, grads[:, :, :, c], det, optimize=True
        )
    vdofs = _velocity_element_dofs(mesh)
    return _scatter(mesh.triangles, vdofs, el, (dofs.n_pressure, dofs.n_velocity))


def assemble_pressure_mean(mesh: Mesh, dofs: DofMap, rule=None):
    """Vector m with m[q] = int q dx; m @ p is the integral of p over the domain."""
    rule = rule or DEFAULT_RULE
    P = p1_values(rule.points)
    _, det, _ = triangle_jacobians(mesh.nodes[mesh.triangles])
    el = np.einsum("q,qa,t->ta", rule.weights, P, det)
    m = np.zeros(dofs.n_pressure)
    np.add.at(m, mesh.triangles.reshape(-1), el.reshape(-1))
    return m


def assemble_pressure_loss_rhs(mesh: Mesh, dofs: DofMap, lam: float):
    """Boundary functional lam * int_{Gamma1} v1 dy as a velocity-space vector."""
    edges = mesh.edges_on(BoundaryTag.GAMMA1)
    if not edges:
        raise ValueError("mesh has no GAMMA1 edges; outlet section missing")
    s, w = edge_rule(3)
    # quadratic trace basis along an edge parameterised by s in [0, 1]
    shape = np.column_stack([(1 - s) * (1 - 2 * s), s * (2 * s - 1), 4 * s * (1 - s)])
    f = np.zeros(dofs.n_velocity)
    for e in edges:
        a, b = e.nodes
        length = abs(mesh.nodes[b, 1] - mesh.nodes[a, 1])
        vals = lam * length * (w @ shape)
        for node, val in zip((a, b, e.midpoint), vals):
            f[2 * node] += val
    return f


def assemble_body_force(mesh: Mesh, dofs: DofMap, force, rule=None):
    """Load vector int f . v for a callable force(x, y) -> (f1, f2)."""
    N, grads, det, rule = element_data(mesh, rule)
    pts = quadrature_points_physical(mesh, rule)
    f1, f2 = force(pts[..., 0], pts[..., 1])
    fvals = np.stack([np.broadcast_to(f1, pts.shape[:2]),
                      np.broadcast_to(f2, pts.shape[:2])], axis=-1)
    el = np.einsum("q,tqc,qi,t->tic", rule.weights, fvals, N, det, optimize=True)
    out = np.zeros(dofs.n_velocity)
    vdofs = _velocity_element_dofs(mesh)
    el_interleaved = np.empty((mesh.n_triangles, 12))
    el_interleaved[:, 0::2] = el[:, :, 0]
    el_interleaved[:, 1::2] = el[:, :, 1]
    np.add.at(out, vdofs.reshape(-1), el_interleaved.reshape(-1))
    return out


def _velocity_at_quadrature(mesh, coefs, N):
    c = np.asarray(coefs).reshape(-1, 2)[mesh.tri_nodes]  # (t, 6, 2)
    return np.einsum("qk,tkc->tqc", N, c), c


def assemble_convection(wfield, mesh: Mesh, dofs: DofMap, rule=None):
    """Matrix C of the linearised convection, z^T C v = int (w . grad v) . z."""
    N, grads, det, rule = element_data(mesh, rule)
    wvals, _ = _velocity_at_quadrature(mesh, wfield, N)
    wdotg = np.einsum("tqc,tqjc->tqj", wvals, grads)
    K = np.einsum("q,qi,tqj,t->tij", rule.weights, N, wdotg, det, optimize=True)
    el = np.zeros((mesh.n_triangles, 12, 12))
    el[:, 0::2, 0::2] = K
    el[:, 1::2, 1::2] = K
    vdofs = _velocity_element_dofs(mesh)
    return _scatter(vdofs, vdofs, el, (dofs.n_velocity, dofs.n_velocity))


def assemble_convection_skew(wfield, mesh: Mesh, dofs: DofMap, rule=None):
    """Skew-symmetrised convection: z^T Ntilde v = (b(w,v,z) - b(w,z,v)) / 2.

    v^T Ntilde v vanishes identically (exact antisymmetry by construction),
    which transfers the continuous energy cancellation of the convective
    term to the discrete level even though div(w) is only weakly zero.
    """
    C = assemble_convection(wfield, mesh, dofs, rule)
    return 0.5 * (C - C.T).tocsr()


def assemble_newton_coupling(ufield, mesh: Mesh, dofs: DofMap, rule=None):
    """Derivative of the skew convection wrt its transported state.

    Returns G with z^T G d = (b(d, u, z) - b(d, z, u)) / 2, so the Newton
    Jacobian of Ntilde(u) u is Ntilde(u) + G(u).
    """
    N, grads, det, rule = element_data(mesh, rule)
    uvals, ucoef = _velocity_at_quadrature(mesh, ufield, N)
    gradu = np.einsum("tqke,tkc->tqce", grads, ucoef)  # gradu[t,q,c,e] = d_e u_c
    term1 = np.einsum("q,qi,qj,tqce,t->ticje", rule.weights, N, N, gradu, det, optimize=True)
    term2 = np.einsum("q,tqie,qj,tqc,t->ticje", rule.weights, grads, N, uvals, det, optimize=True)
    el = 0.5 * (term1 - term2)  # el[t, i, c, j, e] -> rows 2i+c, cols 2j+e
    el = el.reshape(mesh.n_triangles, 12, 12)
    vdofs = _velocity_element_dofs(mesh)
    return _scatter(vdofs, vdofs, el, (dofs.n_velocity, dofs.n_velocity))


def trilinear_form(u, v, w, mesh: Mesh, dofs: DofMap, rule=None):
    """b(u, v, w) = int (u . grad) v . w, all arguments velocity coefficients."""
    N, grads, det, rule = element_data(mesh, rule)
    uvals, _ = _velocity_at_quadrature(mesh, u, N)
    wvals, _ = _velocity_at_quadrature(mesh, w, N)
    vcoef = np.asarray(v).reshape(-1, 2)[mesh.tri_nodes]
    gradv = np.einsum("tqke,tkd->tqde", grads, vcoef)  # d_e v_d
    conv = np.einsum("tqe,tqde->tqd", uvals, gradv)
    return float(np.einsum("q,tqd,tqd,t->", rule.weights, conv, wvals, det, optimize=True))


@dataclass
class SparseSystem:
    """Assembled operator blocks of the saddle-point problem.

    A        velocity stiffness (vector Laplacian), symmetric
    B        pressure-velocity coupling, entries -int q div v
    f        right-hand side on velocity dofs
    m        pressure mean-value vector
    convection   optional skew convection matrix linearised at a state
    """

    A: sp.csr_matrix
    B: sp.csr_matrix
    f: np.ndarray
    m: np.ndarray
    convection: sp.csr_matrix = None


def assemble_system(mesh: Mesh, dofs: DofMap, lam: float, body_force=None, rule=None):
    f = assemble_pressure_loss_rhs(mesh, dofs, lam)
    if body_force is not None:
        f = f + assemble_body_force(mesh, dofs, body_force, rule)
    return SparseSystem(
        A=assemble_vector_laplacian(mesh, dofs, rule),
        B=assemble_divergence(mesh, dofs, rule),
        f=f,
        m=assemble_pressure_mean(mesh, dofs, rule),
    )
