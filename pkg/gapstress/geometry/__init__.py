"""Inclusion geometry, gap profiles and oracle meshes."""

from .mesh import (
    MeshBuilder,
    NodeRole,
    OracleMesh,
    build_domain_mesh,
    build_mesh,
    mesh_quality,
    read_mesh,
    write_mesh,
)
from .profile import (
    AnisotropicPowerProfile,
    FlatProfile,
    GapProfile,
    PowerProfile,
    Profile,
    gap,
    gap_profile,
    surface_chart,
)
from .samplers import narrow_region_samples
from .shapes import (
    Circle,
    OuterDisk,
    OuterRectangle,
    PairDomain,
    Superellipse,
    cell_domain,
    cell_geometry,
    disks_to_model,
    geometry_domain,
    superellipses_to_model,
)

__all__ = [
    "MeshBuilder",
    "NodeRole",
    "OracleMesh",
    "build_domain_mesh",
    "build_mesh",
    "mesh_quality",
    "read_mesh",
    "write_mesh",
    "AnisotropicPowerProfile",
    "FlatProfile",
    "GapProfile",
    "PowerProfile",
    "Profile",
    "gap",
    "gap_profile",
    "surface_chart",
    "narrow_region_samples",
    "Circle",
    "OuterDisk",
    "OuterRectangle",
    "PairDomain",
    "Superellipse",
    "cell_domain",
    "cell_geometry",
    "disks_to_model",
    "geometry_domain",
    "superellipses_to_model",
]
