"""
Period-cell problem for the effective moduli of a fibre array.

The top boundary of the cell (upper fibre arc and top segments) moves with
psi_alpha, the bottom boundary is clamped and the sides are traction free.
The cell energies give

    mu*  = (L2/L1) E^1
    E*   = E/(lambda+2mu) (L2/L1) E^2
"""

from typing import Dict, Optional

import numpy as np
import structlog

from ..errors import GeometryError
from ..geometry.mesh import OracleMesh, build_domain_mesh
from ..geometry.shapes import cell_domain
from ..models import EffectiveModuli, LameParams
from .solver import OracleProblem, OracleSolution, rigid_lift

logger = structlog.get_logger()


def _cell_problem(mesh, p: Optional[LameParams], order: Optional[int]) -> OracleProblem:
    if isinstance(mesh, OracleProblem):
        problem = mesh
    else:
        if p is None:
            raise GeometryError("Lamé parameters are required to assemble a mesh")
        problem = OracleProblem(mesh, p, order)
    if problem.mesh.domain is not None and not problem.mesh.domain.cell:
        raise GeometryError("the cell problem needs a period-cell mesh")
    return problem


def solve_cell(mesh, p: Optional[LameParams] = None, alpha: int = 1, order: Optional[int] = None) -> OracleSolution:
    """
    Cell solution with psi_alpha on the top boundary and 0 on the bottom.

    Args:
        mesh: Cell OracleMesh or an assembled OracleProblem
        p: Lamé parameters
        alpha: Rigid motion index 1..3
        order: Element order

    Returns:
        OracleSolution whose energy is the cell energy E^alpha
    """
    if not 1 <= alpha <= 3:
        raise ValueError(f"alpha must lie in 1..3, got {alpha}")
    problem = _cell_problem(mesh, p, order)
    sol = problem.prescribed(rigid_lift(problem.layout, 1, alpha))
    logger.info("Cell solved", alpha=alpha, energy=sol.energy, dofs=sol.dofs)
    return sol


def cell_energies(mesh, p: Optional[LameParams] = None, order: Optional[int] = None) -> Dict[int, float]:
    """Cell energies for the shear (alpha = 1) and extension (alpha = 2) loadings."""
    problem = _cell_problem(mesh, p, order)
    return {alpha: solve_cell(problem, alpha=alpha).energy for alpha in (1, 2)}


def moduli_from_energies(p: LameParams, L1: float, L2: float, eps: float, energies: Dict[int, float]) -> EffectiveModuli:
    scale = L2 / L1
    return EffectiveModuli(
        m=2,
        eps=eps,
        L1=L1,
        L2=L2,
        kappa=1.0 / (L2 - eps / 2),
        mu_star=scale * energies[1],
        e_star=p.young / p.lam2mu * scale * energies[2],
        young=p.young,
        source="oracle",
        has_unknown_constant=False,
    )


def cell_moduli(
    p: LameParams,
    L1: float,
    L2: float,
    eps: float,
    h_target: Optional[float] = None,
    n_layers: Optional[int] = None,
    order: Optional[int] = None,
    mesh: Optional[OracleMesh] = None,
) -> EffectiveModuli:
    """
    Oracle effective moduli of the disk-fibre cell (-L1, L1) x (-L2, L2).

    Args:
        p: Lamé parameters of the matrix
        L1: Horizontal half-length
        L2: Vertical half-length
        eps: Distance between neighbouring fibres
        h_target: Far-field element size
        n_layers: Element layers across the gap
        order: Element order
        mesh: Prebuilt cell mesh (built from the other arguments when None)

    Returns:
        EffectiveModuli with source "oracle"
    """
    if mesh is None:
        mesh = build_domain_mesh(cell_domain(L1, L2, eps), h_target=h_target, n_layers=n_layers)
    energies = cell_energies(mesh, p, order)
    if not all(np.isfinite(v) and v > 0 for v in energies.values()):
        raise GeometryError(f"cell energies are not positive: {energies}")
    return moduli_from_energies(p, L1, L2, eps, energies)
