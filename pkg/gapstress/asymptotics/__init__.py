"""Closed-form and quadrature evaluation of the asymptotic laws."""

from .anisotropy import anisotropy, g_closed_form, g_integral, g_tilde_integral
from .capacity import (
    a11_leading,
    blowup_matrix,
    blowup_ridge,
    c_diff_leading,
    capacity_leading,
    composed_gradient_coefficients,
    displayed_gradient_coefficients,
    displayed_ratio,
    grad_u_asymptotic,
    leading_alphas,
    near_origin_gradient,
    rotational_blowup_matrix,
)
from .moduli import cell_kappa, effective_moduli
from .qintegrals import q_closed_form, q_converges, q_integral, q_table
from .rates import rate, rate_e, rate_f, rho_d, rho_md

__all__ = [
    "anisotropy",
    "g_closed_form",
    "g_integral",
    "g_tilde_integral",
    "a11_leading",
    "blowup_matrix",
    "blowup_ridge",
    "c_diff_leading",
    "capacity_leading",
    "composed_gradient_coefficients",
    "displayed_gradient_coefficients",
    "displayed_ratio",
    "grad_u_asymptotic",
    "leading_alphas",
    "near_origin_gradient",
    "rotational_blowup_matrix",
    "cell_kappa",
    "effective_moduli",
    "q_closed_form",
    "q_converges",
    "q_integral",
    "q_table",
    "rate",
    "rate_e",
    "rate_f",
    "rho_d",
    "rho_md",
]
