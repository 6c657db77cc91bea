import numpy as np
import pytest

from periflow import (
    ChannelGeometry,
    build_channel_mesh,
    build_constraints,
    build_dofmap,
    solve_stokes,
)


@pytest.fixture(scope="session")
def straight_geom():
    return ChannelGeometry.straight()


@pytest.fixture(scope="session")
def wavy_geom():
    return ChannelGeometry.cosine(0.2, 1)


@pytest.fixture(scope="session")
def straight16(straight_geom):
    """Straight-channel 16x16 problem with its Stokes solution at lam=1."""
    mesh = build_channel_mesh(straight_geom, 16, 16)
    dofs = build_dofmap(mesh)
    cs = build_constraints(mesh, dofs)
    sol = solve_stokes(mesh, dofs, cs, 1.0)
    return mesh, dofs, cs, sol


@pytest.fixture(scope="session")
def wavy8(wavy_geom):
    mesh = build_channel_mesh(wavy_geom, 8, 8)
    dofs = build_dofmap(mesh)
    cs = build_constraints(mesh, dofs)
    return mesh, dofs, cs


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
