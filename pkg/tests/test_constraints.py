import numpy as np
import pytest

from periflow.assembly import assemble_system
from periflow.constraints import (
    ConstraintSet,
    apply_constraints,
    build_constraints,
    expand_solution,
)
from periflow.dofmap import DofMap, build_dofmap
from periflow.meshing import build_channel_mesh


def test_reduced_dimensions(straight_geom):
    mesh = build_channel_mesh(straight_geom, 2, 2)
    dofs = build_dofmap(mesh)
    cs = build_constraints(mesh, dofs)
    system = assemble_system(mesh, dofs, 1.0)
    red = apply_constraints(system, cs)
    expected_velocity = dofs.n_velocity - len(dofs.dirichlet) - len(dofs.slave_dofs)
    assert cs.n_reduced == expected_velocity == 24
    assert red.dimension == expected_velocity + dofs.n_pressure + 1


def test_reduction_preserves_symmetry(wavy8):
    mesh, dofs, cs = wavy8
    red = apply_constraints(assemble_system(mesh, dofs, 1.0), cs)
    d = red.A - red.A.T
    assert np.abs(d.data).max(initial=0.0) == 0.0


def test_identity_constraints_change_nothing(straight_geom):
    mesh = build_channel_mesh(straight_geom, 2, 3)
    dofs = build_dofmap(mesh)
    system = assemble_system(mesh, dofs, 2.0)
    cs = ConstraintSet.identity(dofs.n_velocity, dofs.n_pressure, gauge=False)
    red = apply_constraints(system, cs)
    assert (red.A - system.A).count_nonzero() == 0
    assert (red.B - system.B).count_nonzero() == 0
    np.testing.assert_array_equal(red.f, system.f)
    assert red.dimension == dofs.n_velocity + dofs.n_pressure


def test_restriction_expansion_roundtrip(wavy8, rng):
    # folding is idempotent: expanding a reduced vector and reading the free
    # dofs back reproduces it exactly, twice over
    mesh, dofs, cs = wavy8
    x = rng.standard_normal(cs.n_reduced)
    full = cs.R @ x
    np.testing.assert_array_equal(full[cs.free_dofs], x)
    np.testing.assert_array_equal(cs.R @ (cs.R @ x)[cs.free_dofs], full)
    np.testing.assert_array_equal(full[dofs.slave_dofs], full[dofs.master_dofs])
    assert np.abs(full[dofs.dirichlet]).max() == 0.0


def test_expand_solution_gauges_pressure(wavy8, rng):
    mesh, dofs, cs = wavy8
    system = assemble_system(mesh, dofs, 1.0)
    x = rng.standard_normal(cs.n_reduced + dofs.n_pressure + 1)
    u, p, mu = expand_solution(x, cs, system.m)
    assert abs(system.m @ p) <= 1e-13 * np.abs(p).max()
    np.testing.assert_array_equal(u[dofs.slave_dofs], u[dofs.master_dofs])
    assert np.abs(u[dofs.dirichlet]).max() == 0.0


def test_conflicting_constraints_name_the_node(straight_geom):
    mesh = build_channel_mesh(straight_geom, 2, 2)
    good = build_dofmap(mesh)
    bad = DofMap(
        n_nodes=good.n_nodes,
        n_velocity=good.n_velocity,
        n_pressure=good.n_pressure,
        dirichlet=np.union1d(good.dirichlet, good.slave_dofs[:1]),
        slave_dofs=good.slave_dofs,
        master_dofs=good.master_dofs,
        paired_nodes=good.paired_nodes,
    )
    with pytest.raises(ValueError) as err:
        build_constraints(mesh, bad)
    msg = str(err.value)
    assert "dof" in msg and "node" in msg and "(" in msg  # names dof and coordinates


def test_kkt_shape_and_symmetry(straight16):
    mesh, dofs, cs, _ = straight16
    red = apply_constraints(assemble_system(mesh, dofs, 1.0), cs)
    K, rhs = red.kkt()
    n = red.dimension
    assert K.shape == (n, n)
    assert rhs.shape == (n,)
    d = (K - K.T).tocsr()
    assert np.abs(d.data).max(initial=0.0) == 0.0
