"""Degree-of-freedom numbering and constraint metadata.

Velocity: two components on every quadratic node, interleaved as
dof = 2*node + component.  Pressure: one dof per linear vertex, numbered
separately (pressure never carries Dirichlet or periodic constraints; the
inter-section pressure jump must be free to emerge).
"""

from dataclasses import dataclass

import numpy as np

from .meshing import BoundaryTag, Mesh

__all__ = ["DofMap", "build_dofmap", "velocity_dof"]


def velocity_dof(node, component):
    return 2 * node + component


@dataclass(frozen=True)
class DofMap:
    n_nodes: int
    n_velocity: int
    n_pressure: int
    dirichlet: np.ndarray        # velocity dofs clamped to zero (wall nodes)
    slave_dofs: np.ndarray       # velocity dofs on GAMMA1 folded onto GAMMA0
    master_dofs: np.ndarray      # matching masters, same length as slave_dofs
    paired_nodes: np.ndarray     # (GAMMA0 node, GAMMA1 node) pairs actually coupled

    def validate(self):
        dir_set = set(self.dirichlet.tolist())
        slave_set = set(self.slave_dofs.tolist())
        if dir_set & slave_set:
            raise ValueError("a velocity dof is both Dirichlet and periodic slave")
        if slave_set & set(self.master_dofs.tolist()):
            raise ValueError("constraint chain: a master dof is also a slave")
        if len(slave_set) != len(self.slave_dofs):
            raise ValueError("duplicate slave dof")
        return self


def build_dofmap(mesh: Mesh) -> DofMap:
    n_nodes = mesh.n_nodes
    wall_nodes = mesh.nodes_on(BoundaryTag.GAMMA2)
    dirichlet = np.sort(
        np.concatenate([velocity_dof(wall_nodes, 0), velocity_dof(wall_nodes, 1)])
    )

    # Corner nodes sit on both a section and the wall; the wall (Dirichlet)
    # wins and the pair is dropped.
    wall = set(wall_nodes.tolist())
    keep = [
        (a, b)
        for a, b in mesh.periodic_pairs
        if a not in wall and b not in wall
    ]
    paired = np.array(keep, dtype=int).reshape(-1, 2)
    slaves = np.concatenate([velocity_dof(paired[:, 1], 0), velocity_dof(paired[:, 1], 1)])
    masters = np.concatenate([velocity_dof(paired[:, 0], 0), velocity_dof(paired[:, 0], 1)])

    return DofMap(
        n_nodes=n_nodes,
        n_velocity=2 * n_nodes,
        n_pressure=mesh.n_vertices,
        dirichlet=dirichlet,
        slave_dofs=slaves,
        master_dofs=masters,
        paired_nodes=paired,
    ).validate()
