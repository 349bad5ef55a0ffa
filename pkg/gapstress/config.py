"""
Configuration management for gapstress.
"""

import hashlib
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import structlog
from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings

from .errors import ConfigError
from .models import GeometryTemplate, LameParams, MeshOptions, SweepConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = structlog.get_logger()


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Output
    output_dir: Path = Field(default=Path("./results"), alias="GAPSTRESS_OUTPUT_DIR")

    # Processing
    max_workers: int = Field(default=2, alias="GAPSTRESS_MAX_WORKERS")

    # Meshing
    element_order: int = Field(default=2, alias="GAPSTRESS_ELEMENT_ORDER")
    gap_layers: int = Field(default=6, alias="GAPSTRESS_GAP_LAYERS")
    h_target: float = Field(default=0.25, alias="GAPSTRESS_H_TARGET")
    smoothing_iterations: int = Field(default=30, alias="GAPSTRESS_SMOOTHING_ITERATIONS")
    # eps0 = touching_ratio * diameter of the smaller inclusion
    touching_ratio: float = Field(default=1e-4, alias="GAPSTRESS_TOUCHING_RATIO")

    # Tolerances
    solver_rtol: float = Field(default=1e-10, alias="GAPSTRESS_SOLVER_RTOL")
    quad_tol: float = Field(default=1e-13, alias="GAPSTRESS_QUAD_TOL")
    normal_tol: float = Field(default=1e-12, alias="GAPSTRESS_NORMAL_TOL")

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"


settings = Settings()


_SECTIONS = ("geometry", "material", "sweep", "output")


def sweep_config_from_dict(data: Dict[str, Any]) -> SweepConfig:
    """
    Build a SweepConfig from the sectioned TOML layout.

    Args:
        data: Mapping with optional [geometry], [material], [sweep], [output] tables

    Returns:
        Validated SweepConfig
    """
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    geometry = dict(data.get("geometry", {}))
    material = dict(data.get("material", {}))
    sweep = dict(data.get("sweep", {}))
    output = dict(data.get("output", {}))

    mesh: Dict[str, Any] = {}
    for key in ("levels", "n_layers", "order"):
        if key in sweep:
            mesh[key] = sweep.pop(key)
    if "eps" in sweep:
        sweep["eps_list"] = sweep.pop("eps")

    try:
        fields: Dict[str, Any] = dict(sweep)
        if geometry:
            fields["geometry"] = GeometryTemplate(**geometry)
        if material:
            fields["material"] = LameParams(**material)
        if mesh:
            fields["mesh"] = MeshOptions(**mesh)
        if "dir" in output:
            fields["output_dir"] = Path(output["dir"])
        else:
            fields["output_dir"] = settings.output_dir
        return SweepConfig(**fields)
    except (ValidationError, TypeError) as e:
        raise ConfigError(f"invalid sweep configuration: {e}") from e


def load_sweep_config(
    path: Path,
    out: Optional[Path] = None,
    jobs: Optional[int] = None,
    eps_list: Optional[List[float]] = None,
) -> SweepConfig:
    """
    Load a sweep configuration file and apply command-line overrides.

    Args:
        path: TOML file
        out: Output directory override
        jobs: Worker count override
        eps_list: eps ladder override

    Returns:
        Validated SweepConfig
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e

    cfg = sweep_config_from_dict(data)
    return apply_overrides(cfg, out=out, jobs=jobs, eps_list=eps_list)


def apply_overrides(
    cfg: SweepConfig,
    out: Optional[Path] = None,
    jobs: Optional[int] = None,
    eps_list: Optional[List[float]] = None,
) -> SweepConfig:
    """Return a copy of cfg with the given fields replaced and revalidated."""
    update: Dict[str, Any] = {}
    if out is not None:
        update["output_dir"] = Path(out)
    if jobs is not None:
        update["jobs"] = jobs
    if eps_list is not None:
        update["eps_list"] = list(eps_list)
    if not update:
        return cfg
    try:
        return SweepConfig(**{**cfg.model_dump(), **update})
    except ValidationError as e:
        raise ConfigError(f"invalid override: {e}") from e


def config_hash(cfg: SweepConfig) -> str:
    """sha256 of the canonical JSON form, ignoring output location and worker count."""
    payload = cfg.model_dump(mode="json", exclude={"output_dir", "jobs"}, by_alias=True)
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def parse_eps_list(text: str) -> List[float]:
    """Parse a comma separated eps ladder such as '0.08,0.04,0.02'."""
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as e:
        raise ConfigError(f"cannot parse eps list '{text}'") from e
