"""2D finite-element oracle for the rigid-inclusion Lamé problem."""

from .assembly import DofLayout, assemble_stiffness, element_gradients
from .cell import cell_energies, cell_moduli, moduli_from_energies, solve_cell
from .io import functional_records, read_functionals_json, write_functionals_json, write_solution_csv
from .solver import (
    FunctionalResults,
    GradientProbe,
    OracleProblem,
    OracleSolution,
    VFamily,
    boundary_pairing,
    build_touching_mesh,
    compute_b,
    compute_capacity,
    gradient_probe,
    limit_pairing,
    max_gradient,
    recovery_operator,
    rigid_lift,
    solve_full,
    solve_limit,
    solve_v_family,
    touching_domain,
    touching_eps,
)
from .system import (
    ConstraintMode,
    DiscreteSystem,
    Factorization,
    SolveStatus,
    build_system,
    factorize,
    solve_system,
)

__all__ = [
    "DofLayout",
    "assemble_stiffness",
    "element_gradients",
    "cell_energies",
    "cell_moduli",
    "moduli_from_energies",
    "solve_cell",
    "functional_records",
    "read_functionals_json",
    "write_functionals_json",
    "write_solution_csv",
    "FunctionalResults",
    "GradientProbe",
    "OracleProblem",
    "OracleSolution",
    "VFamily",
    "boundary_pairing",
    "build_touching_mesh",
    "compute_b",
    "compute_capacity",
    "gradient_probe",
    "limit_pairing",
    "max_gradient",
    "recovery_operator",
    "rigid_lift",
    "solve_full",
    "solve_limit",
    "solve_v_family",
    "touching_domain",
    "touching_eps",
    "ConstraintMode",
    "DiscreteSystem",
    "Factorization",
    "SolveStatus",
    "build_system",
    "factorize",
    "solve_system",
]
