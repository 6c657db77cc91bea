"""Reference-element toolbox: triangle quadrature, 1-d edge quadrature,
and quadratic/linear Lagrange bases on the reference triangle.

Reference triangle: vertices (0,0), (1,0), (0,1); barycentric coordinates
L1 = 1-x-y, L2 = x, L3 = y.  Local node order for the quadratic element is
[v1, v2, v3, m12, m23, m31] with m_ij the midpoint of edge (i, j).
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadratureRule",
    "triangle_rule",
    "edge_rule",
    "p1_values",
    "p1_ref_grads",
    "p2_values",
    "p2_ref_grads",
    "p2_ref_hessians",
    "triangle_jacobians",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Points (reference x, y) and weights on the reference triangle.

    Weights sum to the reference-element measure 1/2.  `degree` is the
    highest total polynomial degree integrated exactly.
    """

    points: np.ndarray
    weights: np.ndarray
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "points", np.ascontiguousarray(self.points, dtype=float))
        object.__setattr__(self, "weights", np.ascontiguousarray(self.weights, dtype=float))


def _from_barycentric(groups):
    """Expand (weight, barycentric-triple) orbit groups into point/weight arrays."""
    pts, wts = [], []
    for w, bary in groups:
        for perm in {tuple(p) for p in _permutations3(bary)}:
            pts.append((perm[1], perm[2]))  # (L2, L3) are the reference (x, y)
            wts.append(w)
    pts = np.array(pts)
    wts = np.array(wts)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    return pts[order], 0.5 * wts[order]


def _permutations3(t):
    a, b, c = t
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


# Symmetric Gauss rules on the triangle (weights normalised to sum to 1
# before the factor 1/2).  Standard published point sets.
_TRI_RULES = {
    1: [(1.0, (1 / 3, 1 / 3, 1 / 3))],
    2: [(1 / 3, (2 / 3, 1 / 6, 1 / 6))],
    4: [
        (0.223381589678011, (0.108103018168070, 0.445948490915965, 0.445948490915965)),
        (0.109951743655322, (0.816847572980459, 0.091576213509771, 0.091576213509771)),
    ],
    5: [
        (0.225, (1 / 3, 1 / 3, 1 / 3)),
        (0.132394152788506, (0.059715871789770, 0.470142064105115, 0.470142064105115)),
        (0.125939180544827, (0.797426985353087, 0.101286507323456, 0.101286507323456)),
    ],
    6: [
        (0.116786275726379, (0.501426509658179, 0.249286745170910, 0.249286745170910)),
        (0.050844906370207, (0.873821971016996, 0.063089014491502, 0.063089014491502)),
        (0.082851075618374, (0.053145049844816, 0.310352451033785, 0.636502499121399)),
    ],
}


def triangle_rule(degree):
    """Smallest stocked symmetric rule exact to at least `degree`."""
    for d in sorted(_TRI_RULES):
        if d >= degree:
            pts, wts = _from_barycentric(_TRI_RULES[d])
            return QuadratureRule(pts, wts, d)
    raise ValueError(f"no stocked triangle rule of degree >= {degree}")


def edge_rule(npoints=3):
    """Gauss-Legendre rule on the unit interval [0, 1]; exact to degree 2n-1."""
    x, w = np.polynomial.legendre.leggauss(npoints)
    return 0.5 * (x + 1.0), 0.5 * w


# -- linear basis ------------------------------------------------------------

def p1_values(points):
    x, y = points[:, 0], points[:, 1]
    return np.column_stack([1.0 - x - y, x, y])


def p1_ref_grads():
    return np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])


# -- quadratic basis ---------------------------------------------------------

_DL = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])  # barycentric gradients


def p2_values(points):
    x, y = points[:, 0], points[:, 1]
    L = np.column_stack([1.0 - x - y, x, y])
    return np.column_stack(
        [
            L[:, 0] * (2 * L[:, 0] - 1),
            L[:, 1] * (2 * L[:, 1] - 1),
            L[:, 2] * (2 * L[:, 2] - 1),
            4 * L[:, 0] * L[:, 1],
            4 * L[:, 1] * L[:, 2],
            4 * L[:, 2] * L[:, 0],
        ]
    )


def p2_ref_grads(points):
    """Gradients wrt reference coordinates, shape (npts, 6, 2)."""
    x, y = points[:, 0], points[:, 1]
    L = np.column_stack([1.0 - x - y, x, y])
    g = np.empty((len(points), 6, 2))
    for i in range(3):
        g[:, i, :] = (4 * L[:, i] - 1)[:, None] * _DL[i]
    pairs = [(0, 1), (1, 2), (2, 0)]
    for k, (i, j) in enumerate(pairs):
        g[:, 3 + k, :] = 4 * (L[:, i][:, None] * _DL[j] + L[:, j][:, None] * _DL[i])
    return g


def p2_ref_hessians():
    """Constant reference Hessians of the six shape functions, shape (6, 2, 2)."""
    H = np.empty((6, 2, 2))
    for i in range(3):
        H[i] = 4.0 * np.outer(_DL[i], _DL[i])
    pairs = [(0, 1), (1, 2), (2, 0)]
    for k, (i, j) in enumerate(pairs):
        H[3 + k] = 4.0 * (np.outer(_DL[i], _DL[j]) + np.outer(_DL[j], _DL[i]))
    return H


# -- affine mapping ----------------------------------------------------------

def triangle_jacobians(vertex_coords):
    """Affine maps for a batch of triangles.

    vertex_coords: (ntri, 3, 2) corner coordinates.
    Returns (J, detJ, invJT) with shapes (ntri, 2, 2), (ntri,), (ntri, 2, 2);
    detJ is twice the signed area.
    """
    v = np.asarray(vertex_coords, dtype=float)
    J = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]], axis=-1)
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    invJT = np.empty_like(J)
    invJT[:, 0, 0] = J[:, 1, 1]
    invJT[:, 0, 1] = -J[:, 1, 0]
    invJT[:, 1, 0] = -J[:, 0, 1]
    invJT[:, 1, 1] = J[:, 0, 0]
    invJT /= det[:, None, None]
    return J, det, invJT
