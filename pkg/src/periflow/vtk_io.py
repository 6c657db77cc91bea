"""Legacy ASCII VTK output of the solution fields.

Each quadratic triangle is split into four linear sub-triangles through its
midside nodes, so every quadratic node becomes a plain VTK point and
viewers render the quadratic velocity faithfully.  Pressure (linear, on
vertices) is carried to midside points by edge averaging.

Output is deterministic: fixed point order, fixed cell order, all reals
printed with 17 significant digits, so re-running produces byte-identical
files.
"""

import numpy as np

from .meshing import Mesh

__all__ = ["write_fields", "subtriangulate"]


def subtriangulate(mesh: Mesh):
    """Four linear sub-triangles per quadratic triangle, on all nodes."""
    t = mesh.tri_nodes
    v1, v2, v3, m12, m23, m31 = (t[:, k] for k in range(6))
    cells = np.empty((4 * mesh.n_triangles, 3), dtype=int)
    cells[0::4] = np.column_stack([v1, m12, m31])
    cells[1::4] = np.column_stack([m12, v2, m23])
    cells[2::4] = np.column_stack([m31, m23, v3])
    cells[3::4] = np.column_stack([m12, m23, m31])
    return cells


def pressure_on_all_nodes(mesh: Mesh, p):
    """Linear pressure extended to midside nodes by edge-endpoint averaging."""
    out = np.empty(mesh.n_nodes)
    out[: mesh.n_vertices] = p
    pairs = ((0, 1), (1, 2), (2, 0))
    for k, (a, b) in enumerate(pairs):
        mids = mesh.tri_nodes[:, 3 + k]
        out[mids] = 0.5 * (p[mesh.triangles[:, a]] + p[mesh.triangles[:, b]])
    return out


def _fmt(x):
    return f"{x:.17g}"


def write_fields(solution, mesh: Mesh, path):
    """Write velocity and pressure as a legacy VTK unstructured grid."""
    cells = subtriangulate(mesh)
    pn = pressure_on_all_nodes(mesh, solution.p)
    u = solution.u.reshape(-1, 2)
    lines = [
        "# vtk DataFile Version 3.0",
        "periflow channel flow fields",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {mesh.n_nodes} double",
    ]
    for x, y in mesh.nodes:
        lines.append(f"{_fmt(x)} {_fmt(y)} 0")
    lines.append(f"CELLS {len(cells)} {4 * len(cells)}")
    for a, b, c in cells:
        lines.append(f"3 {a} {b} {c}")
    lines.append(f"CELL_TYPES {len(cells)}")
    lines.extend(["5"] * len(cells))
    lines.append(f"POINT_DATA {mesh.n_nodes}")
    lines.append("VECTORS velocity double")
    for ux, uy in u:
        lines.append(f"{_fmt(ux)} {_fmt(uy)} 0")
    lines.append("SCALARS pressure double 1")
    lines.append("LOOKUP_TABLE default")
    for val in pn:
        lines.append(_fmt(val))
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as err:
        raise OSError(f"cannot write VTK file {path}: {err}") from err
    return path
