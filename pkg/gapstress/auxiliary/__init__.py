"""Keel, bridge and corrected auxiliary fields in the narrow region."""

from .keel import ScalarKeel, bridge, keel_eval
from .fields import (
    VectorAuxField,
    aux_eval,
    aux_family,
    aux_field,
    aux_hessian,
    cancellation_terms,
    corrector_energy,
    lame_residual,
)

__all__ = [
    "ScalarKeel",
    "bridge",
    "keel_eval",
    "VectorAuxField",
    "aux_eval",
    "aux_family",
    "aux_field",
    "aux_hessian",
    "cancellation_terms",
    "corrector_energy",
    "lame_residual",
]
