"""Constraint reduction: wall Dirichlet data, section periodicity, pressure gauge.

Velocity dofs on the walls are eliminated (homogeneous Dirichlet); each
velocity dof on the outlet section is folded onto its inlet partner
(master on GAMMA0, slave on GAMMA1).  Both act through a single sparse
prolongation R that maps reduced velocity vectors to full ones, so the
reduced operators are congruence transforms R^T A R and keep symmetry.

Pressure keeps all of its dofs: the only pressure constraint is the
zero-mean gauge, imposed by bordering the saddle system with the
mean-value vector and one scalar multiplier.  Leaving the section pressure
dofs independent is deliberate; the inter-section pressure jump is a
result to be measured, not a condition to be imposed.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .assembly import SparseSystem
from .dofmap import DofMap
from .meshing import Mesh

__all__ = ["ConstraintSet", "ReducedSystem", "build_constraints", "apply_constraints",
           "expand_solution"]


@dataclass(frozen=True)
class ConstraintSet:
    n_velocity: int
    n_pressure: int
    dirichlet: np.ndarray
    slave_dofs: np.ndarray
    master_dofs: np.ndarray
    free_dofs: np.ndarray       # reduced index -> full velocity dof
    R: sp.csr_matrix            # full = R @ reduced (slaves copy masters)
    gauge: bool = True          # border with the zero-mean multiplier

    @property
    def n_reduced(self):
        return self.free_dofs.size

    @staticmethod
    def identity(n_velocity, n_pressure, gauge=False):
        free = np.arange(n_velocity)
        R = sp.identity(n_velocity, format="csr")
        empty = np.empty(0, dtype=int)
        return ConstraintSet(n_velocity, n_pressure, empty, empty, empty, free, R, gauge)


def build_constraints(mesh: Mesh, dofs: DofMap, gauge=True) -> ConstraintSet:
    conflict = np.intersect1d(dofs.dirichlet, dofs.slave_dofs)
    if conflict.size:
        d = int(conflict[0])
        node, comp = divmod(d, 2)
        x, y = mesh.nodes[node]
        raise ValueError(
            f"velocity dof {d} (node {node} at ({x:.6g}, {y:.6g}), component {comp}) "
            "is both Dirichlet and periodic slave"
        )

    constrained = np.zeros(dofs.n_velocity, dtype=bool)
    constrained[dofs.dirichlet] = True
    constrained[dofs.slave_dofs] = True
    free = np.nonzero(~constrained)[0]
    reduced_index = np.full(dofs.n_velocity, -1, dtype=int)
    reduced_index[free] = np.arange(free.size)

    master_reduced = reduced_index[dofs.master_dofs]
    if np.any(master_reduced < 0):
        raise ValueError("a periodic master dof is itself constrained")

    rows = np.concatenate([free, dofs.slave_dofs])
    cols = np.concatenate([np.arange(free.size), master_reduced])
    R = sp.coo_matrix(
        (np.ones(rows.size), (rows, cols)), shape=(dofs.n_velocity, free.size)
    ).tocsr()

    return ConstraintSet(
        n_velocity=dofs.n_velocity,
        n_pressure=dofs.n_pressure,
        dirichlet=dofs.dirichlet,
        slave_dofs=dofs.slave_dofs,
        master_dofs=dofs.master_dofs,
        free_dofs=free,
        R=R,
        gauge=gauge,
    )


@dataclass
class ReducedSystem:
    """Constrained operator blocks plus the bordered saddle matrix builder."""

    A: sp.csr_matrix
    B: sp.csr_matrix
    f: np.ndarray
    m: np.ndarray
    cs: ConstraintSet
    convection: sp.csr_matrix = None

    @property
    def n_reduced(self):
        return self.A.shape[0]

    @property
    def n_pressure(self):
        return self.B.shape[0]

    @property
    def dimension(self):
        return self.n_reduced + self.n_pressure + (1 if self.cs.gauge else 0)

    def kkt(self, velocity_block_extra=None):
        """Bordered saddle matrix and right-hand side.

        [ A + extra   B^T   0 ] [u]   [f]
        [ B           0     m ] [p] = [0]
        [ 0           m^T   0 ] [mu]  [0]
        """
        Avv = self.A if velocity_block_extra is None else self.A + velocity_block_extra
        if self.cs.gauge:
            mcol = sp.csr_matrix(self.m.reshape(-1, 1))
            K = sp.bmat(
                [[Avv, self.B.T, None], [self.B, None, mcol], [None, mcol.T, None]],
                format="csc",
            )
        else:
            K = sp.bmat([[Avv, self.B.T], [self.B, None]], format="csc")
        rhs = np.zeros(K.shape[0])
        rhs[: self.n_reduced] = self.f
        return K, rhs


def apply_constraints(system: SparseSystem, cs: ConstraintSet) -> ReducedSystem:
    R = cs.R
    reduced = ReducedSystem(
        A=(R.T @ system.A @ R).tocsr(),
        B=(system.B @ R).tocsr(),
        f=R.T @ system.f,
        m=system.m,
        cs=cs,
    )
    if system.convection is not None:
        reduced.convection = (R.T @ system.convection @ R).tocsr()
    return reduced


def expand_solution(x: np.ndarray, cs: ConstraintSet, m: np.ndarray):
    """Reduced solution vector -> (full velocity, zero-mean pressure, multiplier).

    Slave dofs copy their masters, Dirichlet dofs are zero, and the pressure
    is shifted so m @ p vanishes exactly.
    """
    nr, npres = cs.n_reduced, cs.n_pressure
    u = cs.R @ x[:nr]
    p = x[nr : nr + npres].copy()
    mu = float(x[nr + npres]) if cs.gauge and x.size > nr + npres else 0.0
    total = m.sum()
    if npres and total != 0.0:
        p -= (m @ p) / total
    return u, p, mu
