"""Structured triangulation of the channel with quadratic midside nodes.

The grid maps an nx-by-ny rectangle of quads onto the channel: columns stay
vertical (so the end sections are meshed identically and node pairing across
them is exact), rows follow the walls.  Each quad is split into two
triangles, with the diagonal direction alternating in a union-jack pattern;
for even ny the triangulation is then mirror-symmetric about the
centreline, so solutions on symmetric geometries inherit the symmetry to
solver precision instead of only to discretisation error.
"""

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .geometry import ChannelGeometry, GeometryError

__all__ = [
    "BoundaryTag",
    "BoundaryEdge",
    "Mesh",
    "MeshQualityReport",
    "build_channel_mesh",
    "mesh_quality_report",
]

# Structured construction makes periodic pairs exact; the tolerance below
# (relative to the section height 2) only catches construction bugs.
PAIRING_TOLERANCE = 1e-12 * 2.0


class BoundaryTag(IntEnum):
    GAMMA0 = 0  # inlet section  x = 0
    GAMMA1 = 1  # outlet section x = 1
    GAMMA2 = 2  # walls


@dataclass(frozen=True)
class BoundaryEdge:
    nodes: tuple          # (vertex a, vertex b)
    midpoint: int         # quadratic midside node
    triangle: int         # adjacent triangle (unique for a boundary edge)
    tag: BoundaryTag


@dataclass(frozen=True)
class Mesh:
    """Triangulation with quadratic nodes and tagged boundary.

    nodes[:n_vertices] are the linear (pressure) vertices; the rest are edge
    midpoints.  tri_nodes lists, per triangle, [v1, v2, v3, m12, m23, m31].
    periodic_pairs holds (node on GAMMA0, node on GAMMA1) for *every*
    geometrically matched node pair, corners included; constraint building
    decides which pairs become actual couplings.
    """

    nodes: np.ndarray
    n_vertices: int
    triangles: np.ndarray
    tri_nodes: np.ndarray
    boundary_edges: tuple
    periodic_pairs: np.ndarray
    geometry: ChannelGeometry = field(default=None, repr=False)
    nx: int = 0
    ny: int = 0

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]

    def triangle_areas(self):
        v = self.nodes[self.triangles]
        return 0.5 * (
            (v[:, 1, 0] - v[:, 0, 0]) * (v[:, 2, 1] - v[:, 0, 1])
            - (v[:, 2, 0] - v[:, 0, 0]) * (v[:, 1, 1] - v[:, 0, 1])
        )

    def edges_on(self, tag):
        return [e for e in self.boundary_edges if e.tag == tag]

    def nodes_on(self, tag):
        """Sorted unique quadratic node ids lying on edges with this tag."""
        ids = []
        for e in self.edges_on(tag):
            ids.extend((e.nodes[0], e.nodes[1], e.midpoint))
        return np.unique(np.array(ids, dtype=int))

    def validate(self):
        areas = self.triangle_areas()
        if np.any(areas <= 0):
            bad = int(np.argmin(areas))
            raise ValueError(f"triangle {bad} has non-positive area {areas[bad]:.3g}")
        pairs = self.periodic_pairs
        if pairs.size:
            left, right = self.nodes[pairs[:, 0]], self.nodes[pairs[:, 1]]
            if np.any(left[:, 0] != 0.0) or np.any(right[:, 0] != 1.0):
                raise ValueError("periodic pairs must join x=0 nodes to x=1 nodes")
            if np.max(np.abs(left[:, 1] - right[:, 1])) > PAIRING_TOLERANCE:
                raise ValueError("periodic pair ordinates mismatch beyond tolerance")
        # Corner vertices belong to the walls (Dirichlet wins over pairing).
        wall = set(self.nodes_on(BoundaryTag.GAMMA2).tolist())
        for x in (0.0, 1.0):
            for y in (-1.0, 1.0):
                hits = np.nonzero(
                    (self.nodes[: self.n_vertices, 0] == x)
                    & (self.nodes[: self.n_vertices, 1] == y)
                )[0]
                if hits.size != 1 or int(hits[0]) not in wall:
                    raise ValueError(f"corner ({x}, {y}) missing or not on the wall boundary")
        return self


@dataclass(frozen=True)
class MeshQualityReport:
    n_vertices: int
    n_nodes: int
    n_triangles: int
    min_area: float
    min_angle_deg: float
    pairing_residual: float
    edge_counts: dict


def build_channel_mesh(geom: ChannelGeometry, nx: int, ny: int) -> Mesh:
    """Mesh the channel with an nx-by-ny structured grid of split quads."""
    if nx < 1 or ny < 1:
        raise ValueError(f"nx and ny must be >= 1, got nx={nx}, ny={ny}")
    geom.validate()

    xs = np.arange(nx + 1) / nx
    yb = geom.wall_bottom(xs)
    yt = geom.wall_top(xs)
    bad = np.nonzero(yt - yb <= 0.0)[0]
    if bad.size:
        raise GeometryError(
            f"degenerate geometry at x={xs[bad[0]]:.6g}: walls give width {(yt - yb)[bad[0]]:.3g}"
        )

    # Vertices, column-major: index(i, j) = i*(ny+1) + j, j increasing with y.
    fractions = np.arange(ny + 1) / ny
    verts = np.empty(((nx + 1) * (ny + 1), 2))
    for i in range(nx + 1):
        sl = slice(i * (ny + 1), (i + 1) * (ny + 1))
        verts[sl, 0] = xs[i]
        verts[sl, 1] = yb[i] + (yt[i] - yb[i]) * fractions

    def vid(i, j):
        return i * (ny + 1) + j

    tris = []
    for i in range(nx):
        for j in range(ny):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            if (i + j) % 2 == 0:
                tris.append((v00, v10, v11))
                tris.append((v00, v11, v01))
            else:
                tris.append((v00, v10, v01))
                tris.append((v10, v11, v01))
    triangles = np.array(tris, dtype=int)

    # Quadratic midside nodes, shared through a canonical edge key.
    n_verts = verts.shape[0]
    midpoint_of = {}
    mid_coords = []
    tri_nodes = np.empty((len(triangles), 6), dtype=int)
    edge_tris = {}
    local_pairs = ((0, 1), (1, 2), (2, 0))
    for t, (a, b, c) in enumerate(triangles):
        tri_nodes[t, :3] = (a, b, c)
        for k, (li, lj) in enumerate(local_pairs):
            key = tuple(sorted((triangles[t, li], triangles[t, lj])))
            if key not in midpoint_of:
                midpoint_of[key] = n_verts + len(mid_coords)
                mid_coords.append(0.5 * (verts[key[0]] + verts[key[1]]))
            tri_nodes[t, 3 + k] = midpoint_of[key]
            edge_tris.setdefault(key, []).append(t)
    nodes = np.vstack([verts, np.array(mid_coords)])

    boundary = []
    for key, owners in edge_tris.items():
        if len(owners) != 1:
            continue
        xa, xb = nodes[key[0], 0], nodes[key[1], 0]
        if xa == 0.0 and xb == 0.0:
            tag = BoundaryTag.GAMMA0
        elif xa == 1.0 and xb == 1.0:
            tag = BoundaryTag.GAMMA1
        else:
            tag = BoundaryTag.GAMMA2
        boundary.append(BoundaryEdge(key, midpoint_of[key], owners[0], tag))
    boundary.sort(key=lambda e: (int(e.tag), e.nodes))

    mesh = Mesh(
        nodes=nodes,
        n_vertices=n_verts,
        triangles=triangles,
        tri_nodes=tri_nodes,
        boundary_edges=tuple(boundary),
        periodic_pairs=_match_sections(nodes, boundary),
        geometry=geom,
        nx=nx,
        ny=ny,
    )
    return mesh.validate()


def _match_sections(nodes, boundary):
    def section_nodes(tag):
        ids = []
        for e in boundary:
            if e.tag == tag:
                ids.extend((e.nodes[0], e.nodes[1], e.midpoint))
        ids = np.unique(np.array(ids, dtype=int))
        return ids[np.argsort(nodes[ids, 1])]

    left = section_nodes(BoundaryTag.GAMMA0)
    right = section_nodes(BoundaryTag.GAMMA1)
    if left.size != right.size:
        raise ValueError("section node counts differ; sections cannot be paired")
    return np.column_stack([left, right])


def mesh_quality_report(mesh: Mesh) -> MeshQualityReport:
    areas = mesh.triangle_areas()
    v = mesh.nodes[mesh.triangles]
    min_angle = np.inf
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        e1 = v[:, b] - v[:, a]
        e2 = v[:, c] - v[:, a]
        cosang = np.sum(e1 * e2, axis=1) / (
            np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1)
        )
        min_angle = min(min_angle, np.degrees(np.arccos(np.clip(cosang, -1, 1))).min())
    pairs = mesh.periodic_pairs
    residual = 0.0
    if pairs.size:
        residual = float(np.max(np.abs(mesh.nodes[pairs[:, 0], 1] - mesh.nodes[pairs[:, 1], 1])))
    counts = {tag.name: sum(1 for e in mesh.boundary_edges if e.tag == tag) for tag in BoundaryTag}
    return MeshQualityReport(
        n_vertices=mesh.n_vertices,
        n_nodes=mesh.n_nodes,
        n_triangles=mesh.n_triangles,
        min_area=float(areas.min()),
        min_angle_deg=float(min_angle),
        pairing_residual=residual,
        edge_counts=counts,
    )
