"""
Oracle solves on one mesh: the v-family, the full and touching-limit problems,
capacities, boundary functionals and gradient probes.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy import sparse
from scipy.spatial import cKDTree

from ..config import settings
from ..elasticity.energy import traction_form
from ..elasticity.rigid import rigid_basis
from ..errors import GeometryError, PointOutsideMeshError, SolverError
from ..geometry.mesh import NodeRole, OracleMesh, build_domain_mesh
from ..geometry.shapes import PairDomain
from ..models import BoundaryTag, LameParams
from .assembly import LOCAL_EDGES, DofLayout, assemble_stiffness, element_gradients, shape_values
from .system import ConstraintMode, N_RIGID, SolveStatus, build_system, node_dofs, solve_system

logger = structlog.get_logger()

BoundaryFunction = Callable[[np.ndarray], np.ndarray]

_INCLUSION_ROLES = {1: NodeRole.INCLUSION_1, 2: NodeRole.INCLUSION_2}
_INCLUSION_TAGS = {1: BoundaryTag.INCLUSION_1, 2: BoundaryTag.INCLUSION_2}


@dataclass
class OracleSolution:
    """
    Discrete displacement field with its rigid constants.

    Attributes:
        layout: Dof layout the field lives on
        u: Dof vector of length n_dofs
        C1, C2: Rigid constants of the two inclusions (equal in limit mode)
        shared: Constants come from the touching-limit problem
        residual: Relative residual of the reduced solve
        energy: u^T K u
        status: Residual against the solver tolerance; None for fields not solved here
    """
    layout: DofLayout
    u: np.ndarray
    C1: Optional[np.ndarray] = None
    C2: Optional[np.ndarray] = None
    shared: bool = False
    residual: float = 0.0
    energy: float = 0.0
    status: Optional[SolveStatus] = None

    @property
    def displacement(self) -> np.ndarray:
        return self.u.reshape(-1, 2)

    @property
    def dofs(self) -> int:
        return self.layout.n_dofs

    @property
    def C_star(self) -> Optional[np.ndarray]:
        return self.C1 if self.shared else None

    @property
    def converged(self) -> bool:
        return self.status is None or self.status.converged


@dataclass
class VFamily:
    """v_i^alpha (psi_alpha on D_i, 0 elsewhere) and v_0 (phi on the outer boundary)."""
    layout: DofLayout
    K: sparse.csr_matrix
    v: Dict[Tuple[int, int], np.ndarray]
    v0: np.ndarray
    residual: float
    status: Optional[SolveStatus] = None

    @property
    def converged(self) -> bool:
        return self.status is None or self.status.converged

    def field(self, i: int, alpha: int) -> np.ndarray:
        return self.v[(i, alpha)]

    def pair_sum(self, alpha: int) -> np.ndarray:
        return self.v[(1, alpha)] + self.v[(2, alpha)]

    def solution(self, i: int, alpha: int) -> OracleSolution:
        u = self.field(i, alpha)
        return OracleSolution(
            layout=self.layout, u=u, residual=self.residual, energy=float(u @ (self.K @ u)), status=self.status
        )


@dataclass
class FunctionalResults:
    """
    Capacities and boundary functionals on one mesh.

    Vectors over (j, beta) are ordered (1,1), (1,2), (1,3), (2,1), (2,2), (2,3).
    """
    a: np.ndarray
    b_tilde: np.ndarray
    C: np.ndarray
    b1: np.ndarray
    b1_paths: Dict[str, np.ndarray]
    b1_star: Optional[np.ndarray] = None
    energies: Dict[str, float] = field(default_factory=dict)

    def a_block(self, i: int, j: int) -> np.ndarray:
        """3 x 3 block a_ij^{alpha beta}."""
        return self.a[3 * (i - 1):3 * i, 3 * (j - 1):3 * j]

    @property
    def C1(self) -> np.ndarray:
        return self.C[:N_RIGID]

    @property
    def C2(self) -> np.ndarray:
        return self.C[N_RIGID:]


def _boundary_values(layout: DofLayout, fn: Optional[BoundaryFunction]) -> np.ndarray:
    """Dof vector with fn evaluated at every node; zero when fn is None."""
    if fn is None:
        return np.zeros(layout.n_dofs)
    vals = np.asarray(fn(layout.points), dtype=float)
    if vals.shape != layout.points.shape:
        raise SolverError(f"boundary data returned shape {vals.shape}, expected {layout.points.shape}")
    return vals.ravel()


def rigid_lift(layout: DofLayout, i: int, alpha: int) -> np.ndarray:
    """psi_alpha on the nodes of inclusion i, 0 at every other node."""
    nodes = layout.nodes_with_role(_INCLUSION_ROLES[i])
    out = np.zeros(layout.n_dofs)
    out[node_dofs(nodes)] = rigid_basis(2)[alpha - 1](layout.points[nodes]).ravel()
    return out


class OracleProblem:
    """
    Dof layout and stiffness matrix of one mesh, shared by all solves on it.

    Args:
        mesh: Oracle mesh
        p: Lamé parameters (d = 2)
        order: Element order; settings.element_order when None
    """

    def __init__(self, mesh: OracleMesh, p: LameParams, order: Optional[int] = None):
        if p.d != 2:
            raise GeometryError("the oracle solves 2D problems only")
        self.mesh = mesh
        self.p = p
        self.layout = DofLayout.from_mesh(mesh, order=settings.element_order if order is None else order)
        self.K = assemble_stiffness(self.layout, p)

    @property
    def mesh_h(self) -> float:
        return self.mesh.h_target

    def energy(self, u: np.ndarray, w: Optional[np.ndarray] = None) -> float:
        w = u if w is None else w
        return float(w @ (self.K @ u))

    def v_family(self, phi: Optional[BoundaryFunction] = None) -> VFamily:
        """Solve all seven Dirichlet problems with one factorization."""
        keys = [(i, alpha) for i in (1, 2) for alpha in range(1, N_RIGID + 1)]
        n = self.layout.n_dofs
        inc = np.zeros((n, len(keys) + 1))
        for k, (i, alpha) in enumerate(keys):
            inc[:, k] = rigid_lift(self.layout, i, alpha)
        outer = np.zeros((n, len(keys) + 1))
        outer[:, -1] = _boundary_values(self.layout, phi)
        system = build_system(
            self.layout, self.K, ConstraintMode.PRESCRIBED, outer_values=outer, inclusion_values=inc
        )
        u, _, status = solve_system(system)
        return VFamily(
            layout=self.layout,
            K=self.K,
            v={key: u[:, k] for k, key in enumerate(keys)},
            v0=u[:, -1],
            residual=status.residual,
            status=status,
        )

    def _rigid_solve(self, mode: ConstraintMode, phi: Optional[BoundaryFunction]) -> OracleSolution:
        system = build_system(self.layout, self.K, mode, outer_values=_boundary_values(self.layout, phi))
        u, q, status = solve_system(system)
        masters = system.masters(q)
        if mode == ConstraintMode.SHARED_RIGID:
            C1 = C2 = masters
        else:
            C1, C2 = masters[:N_RIGID], masters[N_RIGID:]
        return OracleSolution(
            layout=self.layout,
            u=u,
            C1=np.array(C1),
            C2=np.array(C2),
            shared=mode == ConstraintMode.SHARED_RIGID,
            residual=status.residual,
            status=status,
            energy=self.energy(u),
        )

    def full(self, phi: Optional[BoundaryFunction] = None) -> OracleSolution:
        """Energy minimizer with independent rigid motions on the two inclusions."""
        return self._rigid_solve(ConstraintMode.FREE_RIGID, phi)

    def limit(self, phi: Optional[BoundaryFunction] = None) -> OracleSolution:
        """Energy minimizer with one rigid motion shared by both inclusions."""
        return self._rigid_solve(ConstraintMode.SHARED_RIGID, phi)

    def prescribed(self, values: np.ndarray, phi: Optional[BoundaryFunction] = None) -> OracleSolution:
        """Dirichlet problem with given inclusion dof values."""
        system = build_system(
            self.layout,
            self.K,
            ConstraintMode.PRESCRIBED,
            outer_values=_boundary_values(self.layout, phi),
            inclusion_values=values,
        )
        u, _, status = solve_system(system)
        return OracleSolution(
            layout=self.layout, u=u, residual=status.residual, energy=self.energy(u), status=status
        )


def _problem(mesh_or_problem, p: Optional[LameParams], order: Optional[int]) -> OracleProblem:
    if isinstance(mesh_or_problem, OracleProblem):
        return mesh_or_problem
    if p is None:
        raise SolverError("Lamé parameters are required to assemble a mesh")
    return OracleProblem(mesh_or_problem, p, order)


def solve_v_family(mesh, p: Optional[LameParams] = None, phi: Optional[BoundaryFunction] = None, order: Optional[int] = None) -> VFamily:
    """
    Solve for v_1^alpha, v_2^alpha and v_0.

    Args:
        mesh: OracleMesh or an assembled OracleProblem
        p: Lamé parameters
        phi: Outer boundary data as a function of points (n, 2) -> (n, 2); zero when None
        order: Element order

    Returns:
        VFamily
    """
    return _problem(mesh, p, order).v_family(phi)


def solve_full(mesh, p: Optional[LameParams] = None, phi: Optional[BoundaryFunction] = None, order: Optional[int] = None) -> OracleSolution:
    return _problem(mesh, p, order).full(phi)


def solve_limit(mesh, p: Optional[LameParams] = None, phi: Optional[BoundaryFunction] = None, order: Optional[int] = None) -> OracleSolution:
    """Touching-limit solve; build the mesh on touching_domain(domain)."""
    return _problem(mesh, p, order).limit(phi)


def touching_eps(domain: PairDomain) -> float:
    """eps_0 = touching_ratio * diameter of the smaller inclusion."""
    return settings.touching_ratio * domain.inclusion_diameter


def touching_domain(domain: PairDomain) -> PairDomain:
    return domain.with_eps(touching_eps(domain))


def build_touching_mesh(domain: PairDomain, h_target: Optional[float] = None, n_layers: Optional[int] = None) -> OracleMesh:
    return build_domain_mesh(touching_domain(domain), h_target=h_target, n_layers=n_layers)


def compute_capacity(fam: VFamily) -> np.ndarray:
    """
    a_ij^{alpha beta} = v_i^alpha^T K v_j^beta as a symmetric 6 x 6 matrix.

    Row and column index 3 (i - 1) + alpha - 1.
    """
    V = np.column_stack([fam.v[(i, alpha)] for i in (1, 2) for alpha in range(1, N_RIGID + 1)])
    a = V.T @ (fam.K @ V)
    asym = float(np.max(np.abs(a - a.T)))
    a = 0.5 * (a + a.T)
    logger.debug("Capacity matrix", a11=a[0, 0], asymmetry=asym)
    return a


def compute_b(
    fam: VFamily,
    a: Optional[np.ndarray] = None,
    limit: Optional[OracleSolution] = None,
    limit_K: Optional[sparse.spmatrix] = None,
    full: Optional[OracleSolution] = None,
) -> FunctionalResults:
    """
    Boundary functionals through volume duality.

    b~_j^beta = -v_j^beta^T K v_0. The rigid constants solve a C = b~, and
    b_1^beta is formed along three paths:

        u_b:       -v_1^beta^T K u_b,  u_b = sum C_2^alpha (v_1^alpha + v_2^alpha) + v_0
        expanded:  b~_1^beta - sum C_2^alpha (a_11^{alpha beta} + a_21^{alpha beta})
        system:    sum (C_1^alpha - C_2^alpha) a_11^{alpha beta}

    Args:
        fam: Solved v-family
        a: Capacity matrix (computed when None)
        limit: Touching-limit solution for b_1^{*beta}
        limit_K: Stiffness matrix of the touching mesh; required with limit
        full: Direct solve on the same mesh, used for the energy record

    Returns:
        FunctionalResults
    """
    a = compute_capacity(fam) if a is None else a
    K = fam.K
    Kv0 = K @ fam.v0
    b_tilde = np.array([-fam.v[(j, beta)] @ Kv0 for j in (1, 2) for beta in range(1, N_RIGID + 1)])
    try:
        C = np.linalg.solve(a, b_tilde)
    except np.linalg.LinAlgError as e:
        raise SolverError(f"capacity matrix is singular: {e}") from e
    C1, C2 = C[:N_RIGID], C[N_RIGID:]

    u_b = fam.v0 + sum(C2[k] * fam.pair_sum(k + 1) for k in range(N_RIGID))
    Ku_b = K @ u_b
    a11, a21 = a[:3, :3], a[3:, :3]
    paths = {
        "u_b": np.array([-fam.v[(1, beta)] @ Ku_b for beta in range(1, N_RIGID + 1)]),
        "expanded": b_tilde[:3] - C2 @ (a11 + a21),
        "system": (C1 - C2) @ a11,
    }

    b1_star = None
    if limit is not None:
        if limit_K is None:
            raise SolverError("the stiffness matrix of the touching mesh is required")
        b1_star = limit_pairing(limit, limit_K)

    energies = {"v0": float(fam.v0 @ Kv0), "u_b": float(u_b @ Ku_b)}
    if full is not None:
        energies["full"] = full.energy
    return FunctionalResults(
        a=a,
        b_tilde=b_tilde,
        C=C,
        b1=paths["u_b"],
        b1_paths=paths,
        b1_star=b1_star,
        energies=energies,
    )


def limit_pairing(limit: OracleSolution, K: sparse.spmatrix) -> np.ndarray:
    """b_1^{*beta} = -lift_1^beta^T K u* on the touching mesh."""
    Ku = K @ limit.u
    return np.array([-rigid_lift(limit.layout, 1, beta) @ Ku for beta in range(1, N_RIGID + 1)])


def boundary_pairing(
    layout: DofLayout,
    K: sparse.spmatrix,
    u: np.ndarray,
    i: int,
    beta: int,
    p: Optional[LameParams] = None,
    method: str = "duality",
) -> float:
    """
    Pairing of the traction of u on the boundary of D_i with psi_beta.

    The normal points out of D_i into the matrix. With method="duality" the
    pairing is -lift^T K u, which is exact for discrete solutions; with
    method="flux" the element tractions are integrated along the boundary edges
    by 3-point Gauss quadrature.
    """
    if method == "duality":
        return float(-rigid_lift(layout, i, beta) @ (K @ u))
    if method != "flux":
        raise ValueError(f"unknown pairing method '{method}'")
    if p is None:
        raise SolverError("flux pairing needs Lamé parameters")

    tag = _INCLUSION_TAGS[i]
    sel = np.array([t == tag for t in layout.edge_tags], dtype=bool)
    if not np.any(sel):
        return 0.0
    edges = layout.boundary_edges[sel, :2]
    elems = layout.edge_elements[sel]
    s, w = np.polynomial.legendre.leggauss(3)
    s, w = 0.5 * (s + 1), 0.5 * w

    a, b = layout.points[edges[:, 0]], layout.points[edges[:, 1]]
    tangent = b - a
    length = np.linalg.norm(tangent, axis=-1)
    normal = np.column_stack([tangent[:, 1], -tangent[:, 0]]) / length[:, None]
    # orient the normal away from the matrix triangle
    centroid = layout.points[layout.elements[elems, :3]].mean(axis=1)
    flip = np.einsum("ij,ij->i", normal, 0.5 * (a + b) - centroid) < 0
    normal[flip] *= -1
    normal = -normal

    coords = layout.points[layout.elements[elems, :3]]
    total = 0.0
    psi = rigid_basis(2)[beta - 1]
    for sq, wq in zip(s, w):
        x = a + sq * tangent
        lam = _barycentric(coords, x)
        grads = element_gradients(layout, u, lam[:, None, :], elems)[:, 0]
        t = traction_form(p, grads, normal)
        total += float(np.sum(wq * length * np.einsum("ij,ij->i", t, psi(x))))
    return total


def _barycentric(coords: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of points x (n, 2) in triangles coords (n, 3, 2)."""
    v0, v1, v2 = coords[:, 0], coords[:, 1], coords[:, 2]
    det = (v1[:, 0] - v0[:, 0]) * (v2[:, 1] - v0[:, 1]) - (v2[:, 0] - v0[:, 0]) * (v1[:, 1] - v0[:, 1])
    l1 = ((x[:, 0] - v0[:, 0]) * (v2[:, 1] - v0[:, 1]) - (v2[:, 0] - v0[:, 0]) * (x[:, 1] - v0[:, 1])) / det
    l2 = ((v1[:, 0] - v0[:, 0]) * (x[:, 1] - v0[:, 1]) - (x[:, 0] - v0[:, 0]) * (v1[:, 1] - v0[:, 1])) / det
    return np.column_stack([1 - l1 - l2, l1, l2])


# superconvergent sampling points of the element gradients, barycentric
_SAMPLE_POINTS = {
    1: np.array([[1.0, 1.0, 1.0]]) / 3.0,
    2: np.array([[4.0, 1.0, 1.0], [1.0, 4.0, 1.0], [1.0, 1.0, 4.0]]) / 6.0,
}

# patch fits above this condition number fall back to a lower degree
_MAX_PATCH_COND = 1e6


def _monomials(xy: np.ndarray, degree: int) -> np.ndarray:
    x, y = xy[:, 0], xy[:, 1]
    cols = [np.ones_like(x)]
    if degree >= 1:
        cols += [x, y]
    if degree >= 2:
        cols += [x * x, x * y, y * y]
    return np.column_stack(cols)


def _patch_targets(layout: DofLayout) -> List[List[Tuple[int, float]]]:
    """Nodes fed by each vertex patch: the vertex itself, and half of every adjacent P2 midpoint."""
    targets: List[List[Tuple[int, float]]] = [[(v, 1.0)] for v in range(layout.n_vertices)]
    if layout.order == 2:
        tri = layout.vertex_elements
        mids = layout.elements[:, 3:].ravel()
        ends_a = tri[:, [i for i, _ in LOCAL_EDGES]].ravel()
        ends_b = tri[:, [j for _, j in LOCAL_EDGES]].ravel()
        _, first = np.unique(mids, return_index=True)
        for node, a, b in zip(mids[first], ends_a[first], ends_b[first]):
            targets[a].append((int(node), 0.5))
            targets[b].append((int(node), 0.5))
    return targets


def recovery_operator(layout: DofLayout) -> sparse.csr_matrix:
    """
    Superconvergent patch recovery as a sparse map from gradient samples to nodes.

    Around every vertex a polynomial of the element order is fitted by least
    squares to the element gradients sampled at the superconvergent points of
    the patch. Coordinates are scaled per axis, so thin gap patches stay well
    conditioned; the degree drops where a patch is too small. Vertex nodes take
    their own patch fit, P2 midpoints the mean of the two end-vertex fits.

    Args:
        layout: Dof layout

    Returns:
        Matrix of shape (n_nodes, n_elements * n_samples); samples are ordered
        element-major
    """
    lam = _SAMPLE_POINTS[layout.order]
    ns = len(lam)
    tri = layout.vertex_elements
    sample_xy = np.einsum("qk,ekj->eqj", lam, layout.points[tri]).reshape(-1, 2)

    flat = tri.ravel()
    by_vertex = np.argsort(flat, kind="stable")
    starts = np.searchsorted(flat[by_vertex], np.arange(layout.n_vertices + 1))
    patch_elements = by_vertex // 3
    targets = _patch_targets(layout)

    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    vals: List[np.ndarray] = []
    n_reduced = 0
    for v in range(layout.n_vertices):
        elems = patch_elements[starts[v]:starts[v + 1]]
        idx = (elems[:, None] * ns + np.arange(ns)).ravel()
        centre = layout.points[v]
        pts = sample_xy[idx]
        scale = np.maximum(np.ptp(pts - centre, axis=0), 1e-300)
        local = (pts - centre) / scale
        for degree in range(layout.order, -1, -1):
            P = _monomials(local, degree)
            if len(P) >= P.shape[1] and np.linalg.cond(P) < _MAX_PATCH_COND:
                break
        n_reduced += degree < layout.order
        fit = np.linalg.pinv(P)
        nodes = np.array([t for t, _ in targets[v]])
        weights = np.array([w for _, w in targets[v]])
        W = weights[:, None] * (_monomials((layout.points[nodes] - centre) / scale, degree) @ fit)
        rows.append(np.repeat(nodes, len(idx)))
        cols.append(np.tile(idx, len(nodes)))
        vals.append(W.ravel())

    if n_reduced:
        logger.debug("Patch fits with reduced degree", patches=n_reduced, vertices=layout.n_vertices)
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(layout.n_nodes, len(tri) * ns),
    )


class GradientProbe:
    """
    Point location and recovered gradients on a dof layout.

    Recovered gradients come from superconvergent patch recovery at the nodes,
    interpolated with the element basis inside the containing triangle. Raw
    gradients are those of the containing element.
    """

    def __init__(self, layout: DofLayout, k_nearest: int = 12):
        self.layout = layout
        coords = layout.points[layout.vertex_elements]
        self._coords = coords
        self._tree = cKDTree(coords.mean(axis=1))
        self._k = min(k_nearest, len(coords))
        self._recovery: Optional[sparse.csr_matrix] = None

    def locate(self, points: np.ndarray, tol: float = 1e-10) -> Tuple[np.ndarray, np.ndarray]:
        """Containing element and barycentric coordinates per point."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        _, cand = self._tree.query(points, k=self._k)
        cand = np.atleast_2d(cand).reshape(len(points), -1)
        elems = np.empty(len(points), dtype=int)
        lams = np.empty((len(points), 3))
        for n, x in enumerate(points):
            found = self._search(x, cand[n], tol)
            if found is None:
                found = self._search(x, np.arange(len(self._coords)), tol)
            if found is None:
                raise PointOutsideMeshError(f"point ({x[0]:.6g}, {x[1]:.6g}) is not in the matrix region")
            elems[n], lams[n] = found
        return elems, lams

    def _search(self, x: np.ndarray, cand: np.ndarray, tol: float):
        lam = _barycentric(self._coords[cand], np.broadcast_to(x, (len(cand), 2)))
        ok = np.where(np.min(lam, axis=1) >= -tol)[0]
        if len(ok) == 0:
            return None
        return int(cand[ok[0]]), lam[ok[0]]

    @property
    def recovery(self) -> sparse.csr_matrix:
        if self._recovery is None:
            self._recovery = recovery_operator(self.layout)
        return self._recovery

    def nodal_gradients(self, u: np.ndarray) -> np.ndarray:
        """Patch-recovered gradients at every node, shape (n_nodes, 2, 2)."""
        lay = self.layout
        lam = _SAMPLE_POINTS[lay.order]
        samples = element_gradients(lay, u, lam, np.arange(len(lay.elements)))
        nodal = self.recovery @ samples.reshape(-1, 4)
        return nodal.reshape(-1, 2, 2)

    def __call__(self, u: np.ndarray, points: np.ndarray, recovered: bool = True) -> np.ndarray:
        elems, lams = self.locate(points)
        if recovered:
            basis = shape_values(self.layout.order, lams)
            nodal = self.nodal_gradients(u)[self.layout.elements[elems]]
            return np.einsum("nk,nkij->nij", basis, nodal)
        return element_gradients(self.layout, u, lams[:, None, :], elems)[:, 0]


def gradient_probe(sol: OracleSolution, points, recovered: bool = True) -> np.ndarray:
    """
    Gradient matrices of a solution at points inside the matrix region.

    Args:
        sol: Oracle solution
        points: Array of shape (n, 2) or (2,)
        recovered: Use patch-recovered gradients; raw element gradients otherwise

    Returns:
        Array of shape (n, 2, 2) with G[n, i, j] = d u^i / d x_j
    """
    return GradientProbe(sol.layout)(sol.u, points, recovered=recovered)


def max_gradient(layout: DofLayout, u: np.ndarray, points: Sequence) -> float:
    """Largest Frobenius norm of the recovered gradient over the given points."""
    grads = GradientProbe(layout)(u, np.asarray(points))
    return float(np.max(np.linalg.norm(grads, axis=(-2, -1))))
