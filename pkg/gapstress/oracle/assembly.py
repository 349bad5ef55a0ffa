"""
Lagrange P1/P2 triangles on the matrix region and sparse stiffness assembly.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
import structlog
from scipy import sparse

from ..elasticity.energy import energy_density
from ..errors import GeometryError
from ..geometry.mesh import NodeRole, OracleMesh
from ..models import BoundaryTag, LameParams

logger = structlog.get_logger()

# local edges of a triangle; P2 midpoints follow the vertices in this order
LOCAL_EDGES = ((0, 1), (1, 2), (2, 0))

# edge-midpoint rule, exact for quadratics
QUAD_POINTS = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
QUAD_WEIGHTS = np.full(3, 1.0 / 3.0)

_TAG_ROLE = {
    BoundaryTag.INCLUSION_1: NodeRole.INCLUSION_1,
    BoundaryTag.INCLUSION_2: NodeRole.INCLUSION_2,
    BoundaryTag.OUTER: NodeRole.OUTER,
    BoundaryTag.CELL_SIDE: NodeRole.SIDE,
}


@dataclass
class DofLayout:
    """
    Nodes and elements of the matrix region.

    Vertex nodes come first (n_vertices of them), P2 edge midpoints after.
    Displacement dof 2*node + c carries component c.
    """
    points: np.ndarray
    roles: np.ndarray
    elements: np.ndarray
    n_vertices: int
    order: int
    mesh_nodes: np.ndarray
    boundary_edges: np.ndarray
    edge_tags: List[BoundaryTag]
    edge_elements: np.ndarray
    mesh_h: float = 0.0

    @property
    def n_nodes(self) -> int:
        return len(self.points)

    @property
    def n_dofs(self) -> int:
        return 2 * len(self.points)

    @property
    def vertex_elements(self) -> np.ndarray:
        return self.elements[:, :3]

    def nodes_with_role(self, role: NodeRole) -> np.ndarray:
        return np.where(self.roles == int(role))[0]

    def element_dofs(self) -> np.ndarray:
        n = self.elements.shape[1]
        dofs = np.empty((len(self.elements), 2 * n), dtype=int)
        dofs[:, 0::2] = 2 * self.elements
        dofs[:, 1::2] = 2 * self.elements + 1
        return dofs

    @classmethod
    def from_mesh(cls, mesh: OracleMesh, order: int = 2) -> "DofLayout":
        if order not in (1, 2):
            raise GeometryError(f"element order must be 1 or 2, got {order}")
        tris = mesh.matrix_triangles
        used, local = np.unique(tris, return_inverse=True)
        vert = local.reshape(tris.shape)
        points = mesh.nodes[used]
        roles = mesh.roles[used].astype(int)
        remap = -np.ones(mesh.n_nodes, dtype=int)
        remap[used] = np.arange(len(used))

        edges = remap[mesh.edges] if len(mesh.edges) else np.zeros((0, 2), dtype=int)
        edge_role: Dict[Tuple[int, int], int] = {
            (min(a, b), max(a, b)): int(_TAG_ROLE[t]) for (a, b), t in zip(edges, mesh.edge_tags)
        }

        # adjacency of boundary edges to their matrix triangle
        owner: Dict[Tuple[int, int], int] = {}
        for e, tri in enumerate(vert):
            for i, j in LOCAL_EDGES:
                key = (min(tri[i], tri[j]), max(tri[i], tri[j]))
                if key in edge_role:
                    owner[key] = e

        elements = vert
        n_vertices = len(points)
        mids: Dict[Tuple[int, int], int] = {}
        if order == 2:
            new_points, new_roles = [], []
            elements = np.empty((len(vert), 6), dtype=int)
            elements[:, :3] = vert
            for e, tri in enumerate(vert):
                for k, (i, j) in enumerate(LOCAL_EDGES):
                    key = (min(tri[i], tri[j]), max(tri[i], tri[j]))
                    if key not in mids:
                        mids[key] = n_vertices + len(new_points)
                        new_points.append(0.5 * (points[key[0]] + points[key[1]]))
                        new_roles.append(edge_role.get(key, int(NodeRole.INTERIOR)))
                    elements[e, 3 + k] = mids[key]
            points = np.vstack([points, np.asarray(new_points).reshape(-1, 2)])
            roles = np.concatenate([roles, np.asarray(new_roles, dtype=int)])

        bnd = []
        for a, b in edges:
            key = (min(a, b), max(a, b))
            bnd.append([a, b, mids[key]] if order == 2 else [a, b])
        boundary_edges = np.asarray(bnd, dtype=int).reshape(-1, 3 if order == 2 else 2)
        edge_elements = np.array(
            [owner[(min(a, b), max(a, b))] for a, b in edges], dtype=int
        )

        layout = cls(
            points=points,
            roles=roles,
            elements=elements,
            n_vertices=n_vertices,
            order=order,
            mesh_nodes=used,
            boundary_edges=boundary_edges,
            edge_tags=list(mesh.edge_tags),
            edge_elements=edge_elements,
            mesh_h=mesh.h_target,
        )
        logger.debug("Dof layout", nodes=layout.n_nodes, elements=len(elements), order=order)
        return layout


def barycentric_gradients(coords: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gradients of the barycentric coordinates and triangle areas.

    Args:
        coords: Vertex coordinates of shape (T, 3, 2), counter-clockwise

    Returns:
        (grad_lambda of shape (T, 3, 2), area of shape (T,))
    """
    x, y = coords[..., 0], coords[..., 1]
    area2 = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    if np.any(area2 <= 0):
        raise GeometryError("element with non-positive area")
    glam = np.empty(coords.shape)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        glam[:, i, 0] = y[:, j] - y[:, k]
        glam[:, i, 1] = x[:, k] - x[:, j]
    return glam / area2[:, None, None], 0.5 * area2


def shape_gradients(order: int, lam: np.ndarray, glam: np.ndarray) -> np.ndarray:
    """
    Gradients of the local basis at barycentric points.

    Args:
        order: 1 or 2
        lam: Barycentric points of shape (Q, 3), or (T, Q, 3) per element
        glam: Barycentric gradients of shape (T, 3, 2)

    Returns:
        Array of shape (T, Q, n_local, 2)
    """
    lam = lam if lam.ndim == 3 else lam[None]
    T, Q = glam.shape[0], lam.shape[1]
    if order == 1:
        return np.broadcast_to(glam[:, None, :, :], (T, Q, 3, 2)).copy()
    out = np.empty((T, Q, 6, 2))
    for i in range(3):
        out[:, :, i, :] = (4 * lam[..., i, None] - 1) * glam[:, None, i, :]
    for k, (i, j) in enumerate(LOCAL_EDGES):
        out[:, :, 3 + k, :] = 4 * (
            lam[..., i, None] * glam[:, None, j, :] + lam[..., j, None] * glam[:, None, i, :]
        )
    return out


def shape_values(order: int, lam: np.ndarray) -> np.ndarray:
    """Basis values at barycentric points, shape (Q, n_local)."""
    if order == 1:
        return lam.copy()
    out = np.empty((lam.shape[0], 6))
    for i in range(3):
        out[:, i] = lam[:, i] * (2 * lam[:, i] - 1)
    for k, (i, j) in enumerate(LOCAL_EDGES):
        out[:, 3 + k] = 4 * lam[:, i] * lam[:, j]
    return out


def _basis_gradient_matrices(sg: np.ndarray) -> np.ndarray:
    """Gradient matrices of the vector basis: (T, Q, 2 n_local, 2, 2)."""
    T, Q, n, _ = sg.shape
    out = np.zeros((T, Q, 2 * n, 2, 2))
    out[:, :, 0::2, 0, :] = sg
    out[:, :, 1::2, 1, :] = sg
    return out


def element_stiffness(layout: DofLayout, p: LameParams, elements: np.ndarray) -> np.ndarray:
    """Local stiffness matrices for a block of elements, shape (T, 2n, 2n)."""
    coords = layout.points[layout.elements[elements, :3]]
    glam, area = barycentric_gradients(coords)
    B = _basis_gradient_matrices(shape_gradients(layout.order, QUAD_POINTS, glam))
    Ke = np.zeros((len(elements), B.shape[2], B.shape[2]))
    for q, w in enumerate(QUAD_WEIGHTS):
        Bq = B[:, q]
        Ke += w * energy_density(p, Bq[:, :, None], Bq[:, None, :])
    return Ke * area[:, None, None]


def assemble_stiffness(layout: DofLayout, p: LameParams, chunk: int = 2048) -> sparse.csr_matrix:
    """
    Global stiffness matrix of the matrix region.

    Args:
        layout: Dof layout
        p: Lamé parameters (d = 2)
        chunk: Elements per vectorized block

    Returns:
        Symmetric CSR matrix of size n_dofs
    """
    dofs = layout.element_dofs()
    rows, cols, vals = [], [], []
    for start in range(0, len(dofs), chunk):
        idx = np.arange(start, min(start + chunk, len(dofs)))
        Ke = element_stiffness(layout, p, idx)
        d = dofs[idx]
        rows.append(np.repeat(d, d.shape[1], axis=1).ravel())
        cols.append(np.tile(d, (1, d.shape[1])).ravel())
        vals.append(Ke.ravel())
    K = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(layout.n_dofs, layout.n_dofs),
    ).tocsr()
    logger.debug("Stiffness assembled", dofs=layout.n_dofs, nnz=K.nnz)
    return K


def element_gradients(
    layout: DofLayout, u: np.ndarray, lam: np.ndarray, elements: np.ndarray
) -> np.ndarray:
    """Displacement gradients (E, Q, 2, 2) at barycentric points lam of shape (Q, 3) or (E, Q, 3)."""
    coords = layout.points[layout.elements[elements, :3]]
    glam, _ = barycentric_gradients(coords)
    sg = shape_gradients(layout.order, lam, glam)
    nodes = layout.elements[elements]
    ux, uy = u[2 * nodes], u[2 * nodes + 1]
    grad = np.empty(sg.shape[:2] + (2, 2))
    grad[:, :, 0, :] = np.einsum("en,eqnj->eqj", ux, sg)
    grad[:, :, 1, :] = np.einsum("en,eqnj->eqj", uy, sg)
    return grad
