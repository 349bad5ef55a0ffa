"""
Constrained discrete systems u = T q + g and their sparse factorization.

Inclusion boundary dofs are either prescribed or slaved to rigid master
unknowns; outer boundary dofs carry the Dirichlet data; everything else is free.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import structlog
from scipy import sparse
from scipy.sparse.linalg import splu

from ..config import settings
from ..elasticity.rigid import rigid_basis
from ..errors import SingularSystemError, SolverError
from ..geometry.mesh import NodeRole
from .assembly import DofLayout

try:
    from sksparse import cholmod
except ImportError:  # pragma: no cover - optional accelerator
    cholmod = None

logger = structlog.get_logger()

N_RIGID = 3


class ConstraintMode(str, Enum):
    """How the inclusion boundaries enter the system."""
    FREE_RIGID = "free-rigid"
    SHARED_RIGID = "shared-rigid"
    PRESCRIBED = "prescribed"


def rigid_block(layout: DofLayout, nodes: np.ndarray) -> sparse.csr_matrix:
    """
    Columns psi_1..psi_3 evaluated at the given nodes.

    Returns:
        CSR matrix of shape (n_dofs, 3)
    """
    pts = layout.points[nodes]
    rows, cols, vals = [], [], []
    for a, psi in enumerate(rigid_basis(2)):
        v = psi(pts)
        for c in range(2):
            rows.append(2 * nodes + c)
            cols.append(np.full(len(nodes), a))
            vals.append(v[:, c])
    return sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(layout.n_dofs, N_RIGID),
    ).tocsr()


def node_dofs(nodes: np.ndarray) -> np.ndarray:
    return np.column_stack([2 * nodes, 2 * nodes + 1]).ravel()


@dataclass
class DiscreteSystem:
    """
    Stiffness matrix with its constraint transformation.

    Attributes:
        layout: Dof layout of the matrix region
        K: Full symmetric stiffness matrix
        T: Transformation from reduced unknowns q to all dofs
        g: Prescribed part, shape (n_dofs,) or (n_dofs, k) for several data sets
        mode: Constraint mode
        n_free: Number of free dofs; masters follow them in q
    """
    layout: DofLayout
    K: sparse.csr_matrix
    T: sparse.csr_matrix
    g: np.ndarray
    mode: ConstraintMode
    n_free: int

    @property
    def n_masters(self) -> int:
        return self.T.shape[1] - self.n_free

    def reduced(self):
        """K_r = T^T K T and f = -T^T K g."""
        Kr = (self.T.T @ self.K @ self.T).tocsc()
        f = -(self.T.T @ (self.K @ self.g))
        return Kr, np.asarray(f)

    def expand(self, q: np.ndarray) -> np.ndarray:
        return self.T @ q + self.g

    def masters(self, q: np.ndarray) -> np.ndarray:
        return np.asarray(q[self.n_free:])


def build_system(
    layout: DofLayout,
    K: sparse.csr_matrix,
    mode: ConstraintMode,
    outer_values: Optional[np.ndarray] = None,
    inclusion_values: Optional[np.ndarray] = None,
) -> DiscreteSystem:
    """
    Assemble the constraint transformation for one mode.

    Args:
        layout: Dof layout
        K: Stiffness matrix
        mode: Constraint mode
        outer_values: Dirichlet data on outer nodes, shape (n_dofs,) or (n_dofs, k);
            only entries at outer dofs are read
        inclusion_values: Dirichlet data on inclusion nodes for PRESCRIBED mode,
            same shape convention

    Returns:
        DiscreteSystem
    """
    roles = layout.roles
    n = layout.n_dofs
    inc1 = layout.nodes_with_role(NodeRole.INCLUSION_1)
    inc2 = layout.nodes_with_role(NodeRole.INCLUSION_2)
    outer = layout.nodes_with_role(NodeRole.OUTER)
    free_nodes = np.where((roles == int(NodeRole.INTERIOR)) | (roles == int(NodeRole.SIDE)))[0]
    free = np.sort(node_dofs(free_nodes))

    cols = [sparse.coo_matrix(
        (np.ones(len(free)), (free, np.arange(len(free)))), shape=(n, len(free))
    ).tocsr()]
    if mode == ConstraintMode.FREE_RIGID:
        cols += [rigid_block(layout, inc1), rigid_block(layout, inc2)]
    elif mode == ConstraintMode.SHARED_RIGID:
        cols.append(rigid_block(layout, np.concatenate([inc1, inc2])))
    T = sparse.hstack(cols).tocsr()

    k = None
    for data in (outer_values, inclusion_values):
        if data is not None and np.ndim(data) == 2:
            k = data.shape[1]
    g = np.zeros(n if k is None else (n, k))
    if outer_values is not None and len(outer):
        d = node_dofs(outer)
        g[d] = np.asarray(outer_values)[d]
    if mode == ConstraintMode.PRESCRIBED:
        if inclusion_values is None:
            raise SolverError("prescribed mode needs inclusion data")
        d = node_dofs(np.concatenate([inc1, inc2]))
        g[d] = np.asarray(inclusion_values)[d]

    logger.debug("Constraint transform", mode=mode.value, free=len(free), reduced=T.shape[1])
    return DiscreteSystem(layout=layout, K=K, T=T, g=g, mode=mode, n_free=len(free))


class Factorization:
    """Sparse SPD factorization: CHOLMOD when scikit-sparse is installed, SuperLU otherwise."""

    def __init__(self, A: sparse.csc_matrix):
        self.A = A
        if A.shape[0] == 0:
            self.backend = "empty"
            return
        if cholmod is not None:
            self.backend = "cholmod"
            try:
                self._factor = cholmod.cholesky(A)
            except cholmod.CholmodError as e:
                raise SingularSystemError(f"Cholesky factorization failed: {e}") from e
        else:
            self.backend = "superlu"
            try:
                self._factor = splu(A)
            except RuntimeError as e:
                raise SingularSystemError(f"LU factorization failed: {e}") from e

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.backend == "empty":
            return np.zeros_like(rhs)
        if self.backend == "cholmod":
            return self._factor(rhs)
        return self._factor.solve(rhs)


def factorize(A: sparse.spmatrix) -> Factorization:
    """Factorize a reduced stiffness matrix."""
    return Factorization(sparse.csc_matrix(A))


def relative_residual(A: sparse.spmatrix, x: np.ndarray, b: np.ndarray) -> float:
    """||A x - b|| / ||b|| (absolute when b vanishes)."""
    r = np.linalg.norm(A @ x - b)
    nb = np.linalg.norm(b)
    return float(r / nb) if nb > 0 else float(r)


@dataclass(frozen=True)
class SolveStatus:
    """Relative residual of a reduced solve and the tolerance it was held to."""
    residual: float
    rtol: float

    @property
    def converged(self) -> bool:
        return self.residual <= self.rtol

    def describe(self) -> str:
        return f"residual {self.residual:.3e} above rtol {self.rtol:.1e}"


def solve_system(system: DiscreteSystem, rtol: Optional[float] = None):
    """
    Solve a constrained system.

    Args:
        system: Constrained system
        rtol: Residual tolerance; settings.solver_rtol when None

    Returns:
        (u, q, SolveStatus); u and q carry a trailing axis for several data sets
    """
    rtol = settings.solver_rtol if rtol is None else rtol
    Kr, f = system.reduced()
    fac = factorize(Kr)
    q = fac.solve(f)
    if not np.all(np.isfinite(q)):
        raise SingularSystemError("solution contains non-finite values")
    status = SolveStatus(residual=relative_residual(Kr, q, f), rtol=rtol)
    if not status.converged:
        logger.warning("Solver residual above tolerance", residual=status.residual, rtol=rtol)
    logger.info(
        "System solved",
        mode=system.mode.value,
        unknowns=Kr.shape[0],
        backend=fac.backend,
        residual=status.residual,
    )
    return system.expand(q), q, status
