"""
Data models for gapstress.
"""

import math
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class RegionTag(str, Enum):
    """Region a triangle belongs to."""
    MATRIX = "matrix"
    INCLUSION_1 = "inclusion-1"
    INCLUSION_2 = "inclusion-2"


class BoundaryTag(str, Enum):
    """Boundary an edge belongs to."""
    INCLUSION_1 = "inclusion-1"
    INCLUSION_2 = "inclusion-2"
    OUTER = "outer"
    CELL_SIDE = "cell-side"


class OuterKind(str, Enum):
    """Shape of the outer boundary."""
    DISK = "disk"
    RECTANGLE = "rectangle"


class ShapeKind(str, Enum):
    """Cross-section of a single inclusion."""
    DISK = "disk"
    SUPERELLIPSE = "superellipse"


class LameParams(BaseModel):
    """Lamé constants of the isotropic matrix in dimension d."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda")
    mu: float
    d: int = 2

    @model_validator(mode="after")
    def _check_ellipticity(self) -> "LameParams":
        if self.d not in (2, 3):
            raise ValueError(f"unsupported dimension d={self.d}")
        if not (self.mu > 0 and self.d * self.lam + 2 * self.mu > 0):
            raise ValueError(
                f"ellipticity violated: mu={self.mu}, d*lambda+2*mu={self.d * self.lam + 2 * self.mu}"
            )
        return self

    @property
    def lam2mu(self) -> float:
        return self.lam + 2 * self.mu

    @property
    def young(self) -> float:
        """Young-type combination mu(3 lambda + 2 mu)/(lambda + mu)."""
        return self.mu * (3 * self.lam + 2 * self.mu) / (self.lam + self.mu)

    @property
    def n_rigid(self) -> int:
        return self.d * (self.d + 1) // 2

    def with_dimension(self, d: int) -> "LameParams":
        return LameParams(lam=self.lam, mu=self.mu, d=d)


class OuterBoundary(BaseModel):
    """Outer boundary descriptor: a disk radius or rectangle half-lengths."""

    model_config = ConfigDict(frozen=True)

    kind: OuterKind = OuterKind.DISK
    radius: float = 4.0
    half_lengths: Tuple[float, float] = (1.0, 1.0)

    @model_validator(mode="after")
    def _check_sizes(self) -> "OuterBoundary":
        if self.kind == OuterKind.DISK and self.radius <= 0:
            raise ValueError("outer radius must be positive")
        if self.kind == OuterKind.RECTANGLE and min(self.half_lengths) <= 0:
            raise ValueError("cell half-lengths must be positive")
        return self

    @property
    def size(self) -> float:
        if self.kind == OuterKind.DISK:
            return self.radius
        return min(self.half_lengths)


class InclusionPairGeometry(BaseModel):
    """
    Two m-convex inclusions at distance eps near the origin.

    Near contact the facing surfaces are x_d = eps/2 + (kappa/2)|x'|^m and
    x_d = -eps/2 - (kappa/2)|x'|^m, so the gap is delta = eps + kappa|x'|^m.
    """

    model_config = ConfigDict(frozen=True)

    d: int = 2
    m: int = 2
    kappa: float
    kappa_prime: Optional[float] = None
    eps: float
    R: float
    gamma: float = 0.5
    outer: OuterBoundary = Field(default_factory=OuterBoundary)
    radii: Optional[Tuple[float, float]] = None

    @model_validator(mode="after")
    def _check_geometry(self) -> "InclusionPairGeometry":
        if self.d not in (2, 3):
            raise ValueError(f"unsupported dimension d={self.d}")
        if self.m < 2:
            raise ValueError(f"convexity order must be >= 2, got {self.m}")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.kappa_prime is not None and self.kappa_prime <= 0:
            raise ValueError("kappa_prime must be positive")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0 < self.eps < self.R < self.outer.size:
            raise ValueError(
                f"need 0 < eps < R < outer size, got eps={self.eps}, R={self.R}, "
                f"outer={self.outer.size}"
            )
        return self

    @property
    def kappa1(self) -> float:
        return self.kappa / 2

    @property
    def kappa2(self) -> float:
        return self.kappa / 2

    @property
    def n_rigid(self) -> int:
        return self.d * (self.d + 1) // 2

    def with_eps(self, eps: float) -> "InclusionPairGeometry":
        return self.model_copy(update={"eps": eps})


class QIntegrals(BaseModel):
    """Profile integrals Q_{d,m} and Q~_{d,m}; None where divergent."""

    d: int
    m: int
    q: Optional[float] = None
    q_tilde: Optional[float] = None
    q_closed: Optional[float] = None
    q_tilde_closed: Optional[float] = None


class RateFunctions(BaseModel):
    """Rate functions at a given eps. Fields not defined for (d, m) are None."""

    d: int
    m: int
    eps: float
    kappa: float = 1.0
    rho_d: float
    rho_md: Optional[float] = None
    e_rate: Optional[float] = None
    f_rate: Optional[float] = None


class CapacityAsymptote(BaseModel):
    """
    Leading term of a_11^{alpha alpha}.

    The leading value is coefficient * eps**eps_power, or coefficient * |log eps|
    when logarithmic is set.
    """

    alpha: int
    d: int
    m: int
    coefficient: float
    eps_power: float = 0.0
    logarithmic: bool = False
    value: float
    has_unknown_constant: bool = False
    law: str

    @field_validator("coefficient")
    @classmethod
    def _positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("leading coefficient must be positive")
        return v


class BlowUpFactorVector(BaseModel):
    """Boundary functionals b_1^{*beta}[phi], beta = 1..d(d+1)/2."""

    values: List[float]

    @field_validator("values")
    @classmethod
    def _length(cls, v: List[float]) -> List[float]:
        if len(v) not in (3, 6):
            raise ValueError(f"expected 3 (d=2) or 6 (d=3) entries, got {len(v)}")
        return v

    @property
    def d(self) -> int:
        return 2 if len(self.values) == 3 else 3

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @classmethod
    def zeros(cls, d: int) -> "BlowUpFactorVector":
        return cls(values=[0.0] * (d * (d + 1) // 2))


class AnisotropyIntegrals(BaseModel):
    """Angular integrals for inclusions with two principal coefficients."""

    m: int
    kappa: float
    kappa_prime: float
    g_m: float
    g_tilde: float
    g_closed: float
    sqrt_kappa: float
    coefficient_m3: Optional[float] = None
    coefficient_gradient: Optional[float] = None
    coefficient_rotation: Optional[float] = None
    isotropic_ratio: float


class EffectiveModuli(BaseModel):
    """Effective shear and extensional moduli of a periodic fibre array."""

    m: int
    eps: float
    L1: float
    L2: float
    kappa: float
    mu_star: float
    e_star: float
    young: float
    source: str = "asymptotic"
    has_unknown_constant: bool = True


class RateFitResult(BaseModel):
    """Least-squares power law fitted on log-log data."""

    exponent: float
    prefactor: float
    residuals: List[float] = Field(default_factory=list)
    half_width: float = 0.0
    logarithmic: bool = False
    n_points: int
    dropped: List[float] = Field(default_factory=list)


class ConstantEstimate(BaseModel):
    """Additive constant remaining after subtracting a known leading law."""

    constant: float
    residuals: List[float] = Field(default_factory=list)
    correction_coefficients: List[float] = Field(default_factory=list)
    trend_growing: bool = False


class GeometryTemplate(BaseModel):
    """Inclusion pair used by every eps in a sweep."""

    shape: ShapeKind = ShapeKind.DISK
    radius: float = 1.0
    radius2: Optional[float] = None
    order: int = 2
    outer: OuterBoundary = Field(default_factory=OuterBoundary)
    chart_R: Optional[float] = None

    @property
    def is_cell(self) -> bool:
        return self.outer.kind == OuterKind.RECTANGLE


class MeshOptions(BaseModel):
    """Refinement ladder and element settings."""

    levels: List[float] = Field(default_factory=lambda: [0.5, 0.35, 0.25])
    n_layers: int = 6
    order: int = 2

    @field_validator("n_layers")
    @classmethod
    def _layers(cls, v: int) -> int:
        if v < 4:
            raise ValueError("at least 4 gap layers are required")
        return v

    @field_validator("order")
    @classmethod
    def _order(cls, v: int) -> int:
        if v not in (1, 2):
            raise ValueError("element order must be 1 or 2")
        return v


class SweepConfig(BaseModel):
    """Complete description of an eps sweep."""

    geometry: GeometryTemplate = Field(default_factory=GeometryTemplate)
    material: LameParams = Field(default_factory=lambda: LameParams(lam=1.0, mu=1.0))
    phi: str = "shear"
    alpha: int = 1
    eps_list: List[float] = Field(default_factory=lambda: [0.08, 0.04, 0.02, 0.01])
    mesh: MeshOptions = Field(default_factory=MeshOptions)
    output_dir: Path = Path("./results")
    jobs: int = 1
    seed: int = 0
    n_probes: int = 20

    @field_validator("eps_list")
    @classmethod
    def _ladder(cls, v: List[float]) -> List[float]:
        if len(v) < 3:
            raise ValueError("eps list needs at least 3 entries")
        if any(e <= 0 or e >= 0.5 for e in v):
            raise ValueError("every eps must lie in (0, 1/2)")
        if any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError("eps list must be strictly decreasing")
        return v


class ResultRow(BaseModel):
    """One CSV row of a sweep."""

    epsilon: float
    d: int
    m: int
    quantity: str
    indices: str = ""
    value: float
    mesh_h: float
    dofs: int
    status: str = "ok"
    message: str = ""

    @model_validator(mode="after")
    def _finite_when_ok(self) -> "ResultRow":
        if self.status == "ok" and not math.isfinite(self.value):
            raise ValueError(f"non-finite value for {self.quantity}[{self.indices}]")
        return self

    def sort_key(self) -> Tuple:
        return (-self.epsilon, -self.mesh_h, self.quantity, self.indices)


class FunctionalRecord(BaseModel):
    """JSON record for a computed functional."""

    epsilon: float
    quantity: str
    indices: List[int]
    value: float
    mesh_h: float
    dofs: int


class CheckResult(BaseModel):
    """Outcome of one acceptance check."""

    number: int
    name: str
    passed: bool
    detail: str = ""
    measured: Dict[str, float] = Field(default_factory=dict)
