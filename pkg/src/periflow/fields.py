"""Interpolation into and point evaluation of the discrete fields."""

import numpy as np

from .elements import p1_ref_grads, p1_values, p2_ref_grads, p2_values, triangle_jacobians
from .meshing import Mesh

__all__ = [
    "interpolate_velocity",
    "interpolate_pressure",
    "reference_coords",
    "velocity_values",
    "velocity_gradients",
    "pressure_values",
    "pressure_gradients",
]


def interpolate_velocity(mesh: Mesh, fn):
    """Nodal interpolant of a callable (x, y) -> (u1, u2), interleaved coefficients."""
    u1, u2 = fn(mesh.nodes[:, 0], mesh.nodes[:, 1])
    out = np.empty(2 * mesh.n_nodes)
    out[0::2] = np.broadcast_to(u1, (mesh.n_nodes,))
    out[1::2] = np.broadcast_to(u2, (mesh.n_nodes,))
    return out


def interpolate_pressure(mesh: Mesh, fn):
    verts = mesh.nodes[: mesh.n_vertices]
    return np.asarray(fn(verts[:, 0], verts[:, 1]), dtype=float)


def reference_coords(mesh: Mesh, tri_ids, points):
    """Invert the affine map of each listed triangle at the given physical points."""
    tri_ids = np.asarray(tri_ids, dtype=int)
    points = np.atleast_2d(points)
    verts = mesh.nodes[mesh.triangles[tri_ids]]
    J, _, _ = triangle_jacobians(verts)
    d = points - verts[:, 0, :]
    invJ = np.linalg.inv(J)
    return np.einsum("ned,nd->ne", invJ, d)


def velocity_values(mesh: Mesh, u, tri_ids, ref_pts):
    """Velocity (n, 2) at reference points inside the listed triangles."""
    coefs = np.asarray(u).reshape(-1, 2)[mesh.tri_nodes[np.asarray(tri_ids, dtype=int)]]
    N = p2_values(np.atleast_2d(ref_pts))
    return np.einsum("nk,nkc->nc", N, coefs)


def velocity_gradients(mesh: Mesh, u, tri_ids, ref_pts):
    """Velocity gradient tensors (n, 2, 2); entry [c, e] is d u_c / d x_e."""
    tri_ids = np.asarray(tri_ids, dtype=int)
    coefs = np.asarray(u).reshape(-1, 2)[mesh.tri_nodes[tri_ids]]
    Gref = p2_ref_grads(np.atleast_2d(ref_pts))
    _, _, invJT = triangle_jacobians(mesh.nodes[mesh.triangles[tri_ids]])
    g = np.einsum("nde,nke->nkd", invJT, Gref)
    return np.einsum("nkd,nkc->ncd", g, coefs)


def pressure_values(mesh: Mesh, p, tri_ids, ref_pts):
    coefs = np.asarray(p)[mesh.triangles[np.asarray(tri_ids, dtype=int)]]
    P = p1_values(np.atleast_2d(ref_pts))
    return np.einsum("na,na->n", P, coefs)


def pressure_gradients(mesh: Mesh, p, tri_ids):
    """Constant pressure gradient (n, 2) of the listed triangles."""
    tri_ids = np.asarray(tri_ids, dtype=int)
    coefs = np.asarray(p)[mesh.triangles[tri_ids]]
    _, _, invJT = triangle_jacobians(mesh.nodes[mesh.triangles[tri_ids]])
    g = np.einsum("nde,ae->nad", invJT, p1_ref_grads())
    return np.einsum("nad,na->nd", g, coefs)
