"""
Isotropic elastic constitutive model: rigid motions and energy forms.
"""

from .rigid import RigidMotion, rigid_basis, rigid_count
from .energy import (
    energy_density,
    traction_form,
    apply_lame,
    strain,
    divergence,
)

__all__ = [
    "RigidMotion",
    "rigid_basis",
    "rigid_count",
    "energy_density",
    "traction_form",
    "apply_lame",
    "strain",
    "divergence",
]
