import numpy as np
import pytest
from scipy.integrate import quad

from periflow.geometry import ChannelGeometry, GeometryError
from periflow.meshing import BoundaryTag, build_channel_mesh, mesh_quality_report


def test_structured_counts_2x2(straight_geom):
    mesh = build_channel_mesh(straight_geom, 2, 2)
    assert mesh.n_vertices == 9
    assert mesh.n_triangles == 8
    counts = mesh_quality_report(mesh).edge_counts
    assert counts == {"GAMMA0": 2, "GAMMA1": 2, "GAMMA2": 4}


def test_two_triangle_channel_area(straight_geom):
    mesh = build_channel_mesh(straight_geom, 1, 1)
    assert mesh.n_triangles == 2
    assert mesh.triangle_areas().sum() == pytest.approx(2.0, abs=1e-15)


def test_wavy_area_matches_width_integral(wavy_geom):
    mesh = build_channel_mesh(wavy_geom, 16, 16)
    assert mesh.n_triangles == 512
    areas = mesh.triangle_areas()
    assert np.all(areas > 0)
    # the split-quad columns integrate the piecewise-linear width exactly,
    # i.e. the mesh area equals the trapezoid rule on the mesh abscissae
    xs = np.arange(17) / 16
    trap = np.trapezoid(wavy_geom.width(xs), xs)
    assert areas.sum() == pytest.approx(trap, abs=1e-12)
    # and approaches the true integral at the trapezoid-rule order
    exact = quad(lambda x: float(wavy_geom.width(x)), 0, 1, epsabs=1e-13)[0]
    assert abs(areas.sum() - exact) < 0.05 / 16**2


def test_pairing_residual_zero_and_exact_sections(straight_geom, wavy_geom):
    for geom in (straight_geom, wavy_geom):
        mesh = build_channel_mesh(geom, 6, 5)
        rep = mesh_quality_report(mesh)
        assert rep.pairing_residual == 0.0
        left = mesh.nodes[mesh.periodic_pairs[:, 0]]
        right = mesh.nodes[mesh.periodic_pairs[:, 1]]
        assert np.all(left[:, 0] == 0.0)
        assert np.all(right[:, 0] == 1.0)
        # matched multisets of ordinates
        np.testing.assert_array_equal(np.sort(left[:, 1]), np.sort(right[:, 1]))


def test_section_node_count(straight_geom):
    # 2*ny + 1 quadratic node locations per section
    mesh = build_channel_mesh(straight_geom, 3, 4)
    assert len(mesh.nodes_on(BoundaryTag.GAMMA0)) == 2 * 4 + 1
    assert len(mesh.nodes_on(BoundaryTag.GAMMA1)) == 2 * 4 + 1
    assert mesh.periodic_pairs.shape == (9, 2)


def test_corners_belong_to_walls(straight_geom):
    mesh = build_channel_mesh(straight_geom, 2, 2)
    wall = set(mesh.nodes_on(BoundaryTag.GAMMA2).tolist())
    for x in (0.0, 1.0):
        for y in (-1.0, 1.0):
            (idx,) = np.nonzero(
                (mesh.nodes[:, 0] == x) & (mesh.nodes[:, 1] == y)
            )[0]
            assert int(idx) in wall


def test_refinement_topology(wavy_geom):
    coarse = build_channel_mesh(wavy_geom, 4, 3)
    fine = build_channel_mesh(wavy_geom, 8, 6)
    assert fine.n_triangles == 4 * coarse.n_triangles
    for mesh, ny in ((coarse, 3), (fine, 6)):
        counts = mesh_quality_report(mesh).edge_counts
        assert counts["GAMMA0"] == ny
        assert counts["GAMMA1"] == ny


def test_boundary_edges_cover_boundary(straight_geom):
    mesh = build_channel_mesh(straight_geom, 3, 3)
    counts = mesh_quality_report(mesh).edge_counts
    assert sum(counts.values()) == 2 * 3 + 2 * 3


def test_near_degenerate_quality_report(wavy_geom):
    mesh = build_channel_mesh(ChannelGeometry.cosine(0.45, 1), 8, 8)
    rep = mesh_quality_report(mesh)
    assert rep.min_area > 0
    assert 0 < rep.min_angle_deg < 60


def test_degenerate_geometry_rejected():
    with pytest.raises(GeometryError, match="x="):
        build_channel_mesh(ChannelGeometry.cosine(0.5, 1), 4, 4)


def test_invalid_subdivisions(straight_geom):
    with pytest.raises(ValueError):
        build_channel_mesh(straight_geom, 0, 4)
    with pytest.raises(ValueError):
        build_channel_mesh(straight_geom, 4, -1)


def test_positive_orientation_everywhere(wavy_geom):
    mesh = build_channel_mesh(ChannelGeometry.cosine(0.3, 2), 12, 7)
    assert np.all(mesh.triangle_areas() > 0)


def test_midpoints_are_edge_midpoints(straight_geom):
    mesh = build_channel_mesh(straight_geom, 2, 2)
    for t in range(mesh.n_triangles):
        v = mesh.tri_nodes[t]
        for k, (a, b) in enumerate(((0, 1), (1, 2), (2, 0))):
            np.testing.assert_allclose(
                mesh.nodes[v[3 + k]],
                0.5 * (mesh.nodes[v[a]] + mesh.nodes[v[b]]),
                atol=1e-15,
            )


def test_tabulated_geometry_meshes(straight_geom):
    x = np.linspace(0, 1, 9)
    bump = 0.15 * np.sin(np.pi * x) ** 2
    geom = ChannelGeometry.tabulated(x, -1 + bump, 1 - bump)
    mesh = build_channel_mesh(geom, 8, 4)
    assert np.all(mesh.triangle_areas() > 0)
    assert mesh_quality_report(mesh).pairing_residual == 0.0
