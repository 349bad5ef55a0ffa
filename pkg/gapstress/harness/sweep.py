"""
eps sweeps: oracle solves, asymptotic predictions and the results table.

Every (eps, mesh level) pair is an independent work item. In pair mode a
touching-limit solve per mesh level runs first and supplies the blow-up
factors b_1^{*beta}; in cell mode each item solves the period-cell problem.
"""

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy
import structlog
from tqdm import tqdm

from .. import __version__
from ..asymptotics.capacity import a11_leading, c_diff_leading, grad_u_asymptotic, leading_alphas
from ..asymptotics.moduli import cell_kappa, effective_moduli
from ..auxiliary.fields import aux_eval, aux_field
from ..config import config_hash
from ..errors import GapStressError, SolverError
from ..geometry.mesh import build_domain_mesh
from ..geometry.samplers import narrow_region_samples
from ..geometry.shapes import PairDomain, cell_geometry, disks_to_model, geometry_domain, superellipses_to_model
from ..models import FunctionalRecord, InclusionPairGeometry, ResultRow, ShapeKind, SweepConfig
from ..oracle.cell import moduli_from_energies, solve_cell
from ..oracle.io import functional_records, write_functionals_json
from ..oracle.solver import GradientProbe, OracleProblem, compute_b, compute_capacity, limit_pairing, touching_domain
from ..oracle.system import SolveStatus
from .presets import get_boundary_data

logger = structlog.get_logger()

CSV_COLUMNS = ["epsilon", "d", "m", "quantity", "indices", "value", "mesh_h", "dofs", "status", "message"]
RESULTS_FILE = "results.csv"
METADATA_FILE = "metadata.json"
FUNCTIONALS_FILE = "functionals.json"


@dataclass(frozen=True)
class WorkItem:
    kind: str
    eps: float
    h: float


@dataclass
class LimitResult:
    """Touching-limit quantities of one mesh level."""
    h: float
    eps0: float
    b1_star: List[float]
    C_star: List[float]
    dofs: int


@dataclass
class SweepResult:
    rows: List[ResultRow]
    output_dir: Path
    csv_path: Path
    metadata_path: Path
    functionals_path: Optional[Path] = None
    failed: int = 0
    records: List[FunctionalRecord] = field(default_factory=list)

    def series(self, quantity: str, indices: str = "", mesh_h: Optional[float] = None) -> List[Tuple[float, float]]:
        """(eps, value) pairs of one quantity on one mesh level (the finest by default)."""
        return select_series(self.rows, quantity, indices, mesh_h)


def select_series(
    rows: List[ResultRow], quantity: str, indices: str = "", mesh_h: Optional[float] = None
) -> List[Tuple[float, float]]:
    ok = [r for r in rows if r.status == "ok" and r.quantity == quantity and r.indices == indices]
    if not ok:
        return []
    h = min(r.mesh_h for r in ok) if mesh_h is None else mesh_h
    return sorted(((r.epsilon, r.value) for r in ok if r.mesh_h == h), key=lambda t: -t[0])


def model_geometry(cfg: SweepConfig, eps: float) -> InclusionPairGeometry:
    """Model geometry of the configured inclusion pair at distance eps."""
    geo = cfg.geometry
    if geo.is_cell:
        L1, L2 = geo.outer.half_lengths
        g = cell_geometry(L1, L2, eps)
    elif geo.shape == ShapeKind.DISK:
        r2 = geo.radius if geo.radius2 is None else geo.radius2
        g = disks_to_model(geo.radius, r2, eps, geo.outer.radius)
    else:
        g = superellipses_to_model(geo.radius, geo.order, eps, geo.outer.radius)
    if geo.chart_R is not None:
        g = g.model_copy(update={"R": geo.chart_R})
    return g


def sweep_domain(cfg: SweepConfig, eps: float) -> PairDomain:
    return geometry_domain(model_geometry(cfg, eps))


def _row(quantity: str, value: float, eps: float, h: float, dofs: int, m: int, indices: str = "") -> Dict[str, Any]:
    return {
        "epsilon": eps,
        "d": 2,
        "m": m,
        "quantity": quantity,
        "indices": indices,
        "value": float(value),
        "mesh_h": h,
        "dofs": dofs,
    }


def _error_row(item: WorkItem, m: int, error: Exception) -> Dict[str, Any]:
    return {
        "epsilon": item.eps,
        "d": 2,
        "m": m,
        "quantity": "error",
        "indices": item.kind,
        "value": math.nan,
        "mesh_h": item.h,
        "dofs": 0,
        "status": "error",
        "message": f"{type(error).__name__}: {error}"[:200],
    }


def _status_row(
    name: str, status: SolveStatus, eps: float, h: float, dofs: int, m: int
) -> Dict[str, Any]:
    """Error row for a solve whose residual exceeds the solver tolerance."""
    row = _row("error", status.residual, eps, h, dofs, m, name)
    row.update(status="error", message=f"{name} solve: {status.describe()}")
    return row


def _has_errors(rows: List[Dict[str, Any]]) -> bool:
    return any(r.get("status") == "error" for r in rows)


def _idx(*ks: int) -> str:
    return ",".join(str(k) for k in ks)


def _max_norm(grads: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(grads, axis=(-2, -1))))


def run_limit(cfg: SweepConfig, h: float) -> LimitResult:
    """Touching-limit solve on one mesh level."""
    domain = touching_domain(sweep_domain(cfg, cfg.eps_list[0]))
    mesh = build_domain_mesh(domain, h_target=h, n_layers=cfg.mesh.n_layers)
    problem = OracleProblem(mesh, cfg.material, cfg.mesh.order)
    lim = problem.limit(get_boundary_data(cfg.phi))
    if not lim.converged:
        raise SolverError(f"touching limit solve: {lim.status.describe()}")
    bstar = limit_pairing(lim, problem.K)
    logger.info("Touching limit solved", h=h, eps0=domain.eps, b1_star=bstar.tolist())
    return LimitResult(h=h, eps0=domain.eps, b1_star=bstar.tolist(), C_star=lim.C1.tolist(), dofs=lim.dofs)


def run_pair(
    cfg: SweepConfig, eps: float, h: float, bstar: Optional[List[float]]
) -> Tuple[List[Dict[str, Any]], List[FunctionalRecord]]:
    """All oracle and asymptotic quantities of one pair-mode work item."""
    p = cfg.material
    g = model_geometry(cfg, eps)
    mesh = build_domain_mesh(geometry_domain(g), h_target=h, n_layers=cfg.mesh.n_layers)
    problem = OracleProblem(mesh, p, cfg.mesh.order)
    phi = get_boundary_data(cfg.phi)
    dofs = problem.layout.n_dofs
    m = g.m

    fam = problem.v_family(phi)
    a = compute_capacity(fam)
    full = problem.full(phi)
    res = compute_b(fam, a, full=full)

    rows: List[Dict[str, Any]] = []

    def add(quantity: str, value: float, indices: str = "") -> None:
        rows.append(_row(quantity, value, eps, h, dofs, m, indices))

    for name, sol in (("v_family", fam), ("full", full)):
        if not sol.converged:
            rows.append(_status_row(name, sol.status, eps, h, dofs, m))

    for r in range(6):
        for c in range(6):
            add("a", a[r, c], _idx(r // 3 + 1, c // 3 + 1, r % 3 + 1, c % 3 + 1))
    add("a_min_eig", float(np.min(np.linalg.eigvalsh(a))))

    C_full = np.concatenate([full.C1, full.C2])
    for r in range(6):
        add("b_tilde", res.b_tilde[r], _idx(r // 3 + 1, r % 3 + 1))
        add("C", res.C[r], _idx(r // 3 + 1, r % 3 + 1))
        add("C_full", C_full[r], _idx(r // 3 + 1, r % 3 + 1))
    scale = max(float(np.max(np.abs(C_full))), 1e-12)
    add("cross_path", float(np.max(np.abs(C_full - res.C))) / scale)

    recon = fam.v0 + sum(
        res.C[3 * (i - 1) + k] * fam.v[(i, k + 1)] for i in (1, 2) for k in range(3)
    )
    add("reconstruction", float(np.max(np.abs(full.u - recon))) / max(1.0, float(np.max(np.abs(full.u)))))

    b_scale = max(float(np.max(np.abs(res.b1))), 1e-12)
    spread = max(float(np.max(np.abs(v - res.b1))) for v in res.b1_paths.values())
    add("b1_path_diff", spread / b_scale)
    for beta in range(3):
        add("b1", res.b1[beta], _idx(beta + 1))
        add("c_diff", res.C1[beta] - res.C2[beta], _idx(beta + 1))
    for alpha in leading_alphas(2, m):
        add("a11_asym", a11_leading(p, g, alpha).value, _idx(alpha))

    probe = GradientProbe(problem.layout)
    origin = np.zeros((1, 2))
    grad0 = probe(full.u, origin)[0]
    for i in range(2):
        for j in range(2):
            add("grad_center", grad0[i, j], _idx(i + 1, j + 1))
    if bstar is not None:
        cd = c_diff_leading(p, g, bstar)
        grad_asym = grad_u_asymptotic(p, g, bstar, origin)[0]
        for alpha in leading_alphas(2, m):
            add("c_diff_asym", cd[alpha - 1], _idx(alpha))
        for i in range(2):
            for j in range(2):
                add("grad_center_asym", grad_asym[i, j], _idx(i + 1, j + 1))

    pts = narrow_region_samples(g, cfg.n_probes)
    gv = probe(fam.v[(1, 1)], pts)
    gsum = probe(fam.pair_sum(1), pts)
    _, gu = aux_eval(aux_field(g, p, 1), pts)
    add("grad_v11_max", _max_norm(gv))
    add("grad_u11_max", _max_norm(gu))
    add("grad_diff_max", _max_norm(gv - gu))
    add("grad_sum_max", _max_norm(gsum))
    add("residual", max(fam.residual, full.residual))

    records = functional_records(res, eps, h, dofs)
    logger.info("Sweep point done", eps=eps, h=h, dofs=dofs, a11=float(a[0, 0]))
    return rows, records


def run_cell(cfg: SweepConfig, eps: float, h: float) -> List[Dict[str, Any]]:
    """Oracle and asymptotic effective moduli of one cell-mode work item."""
    p = cfg.material
    L1, L2 = cfg.geometry.outer.half_lengths
    g = model_geometry(cfg, eps)
    mesh = build_domain_mesh(geometry_domain(g), h_target=h, n_layers=cfg.mesh.n_layers)
    problem = OracleProblem(mesh, p, cfg.mesh.order)
    sols = {alpha: solve_cell(problem, alpha=alpha) for alpha in (1, 2)}
    energies = {alpha: sol.energy for alpha, sol in sols.items()}
    oracle = moduli_from_energies(p, L1, L2, eps, energies)
    asym = effective_moduli(p, 2, L1, L2, cell_kappa(L2, eps), eps)
    dofs = problem.layout.n_dofs
    rows = [
        _status_row(f"cell_{alpha}", sol.status, eps, h, dofs, 2)
        for alpha, sol in sols.items()
        if not sol.converged
    ]
    rows += [_row("cell_energy", energies[a], eps, h, dofs, 2, _idx(a)) for a in (1, 2)]
    rows += [
        _row("mu_star", oracle.mu_star, eps, h, dofs, 2),
        _row("e_star", oracle.e_star, eps, h, dofs, 2),
        _row("mu_star_asym", asym.mu_star, eps, h, dofs, 2),
        _row("e_star_asym", asym.e_star, eps, h, dofs, 2),
    ]
    logger.info("Cell point done", eps=eps, h=h, mu_star=oracle.mu_star)
    return rows


def _execute(payload: Dict[str, Any]) -> Dict[str, Any]:
    """Process-pool entry point; never raises for gapstress or numerical failures."""
    cfg = SweepConfig(**payload["config"])
    item = WorkItem(**payload["item"])
    m = cfg.geometry.order if cfg.geometry.shape == ShapeKind.SUPERELLIPSE and not cfg.geometry.is_cell else 2
    try:
        if item.kind == "limit":
            return {"limit": run_limit(cfg, item.h).__dict__}
        if item.kind == "cell":
            rows = run_cell(cfg, item.eps, item.h)
            return {"rows": rows, "failed": _has_errors(rows)}
        rows, records = run_pair(cfg, item.eps, item.h, payload.get("bstar"))
        records_json = [r.model_dump(mode="json") for r in records]
        return {"rows": rows, "records": records_json, "failed": _has_errors(rows)}
    except (GapStressError, ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as e:
        logger.error("Sweep point failed", kind=item.kind, eps=item.eps, h=item.h, error=str(e))
        return {"rows": [_error_row(item, m, e)], "failed": True}


def _run_items(payloads: List[Dict[str, Any]], jobs: int, desc: str, progress: bool) -> List[Dict[str, Any]]:
    out: List[Dict[str, Any]] = []
    bar = tqdm(total=len(payloads), desc=desc, disable=not progress)
    if jobs <= 1:
        for pl in payloads:
            out.append(_execute(pl))
            bar.update(1)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_execute, pl) for pl in payloads]
            for fut in as_completed(futures):
                out.append(fut.result())
                bar.update(1)
    bar.close()
    return out


def sweep_metadata(cfg: SweepConfig, n_rows: int, failed: int) -> Dict[str, Any]:
    return {
        "config_hash": config_hash(cfg),
        "config": cfg.model_dump(mode="json", exclude={"output_dir", "jobs"}, by_alias=True),
        "versions": {"gapstress": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
        "rows": n_rows,
        "failed": failed,
    }


def write_results_csv(rows: List[ResultRow], path: Path) -> None:
    """Write validated rows sorted by (eps desc, mesh_h desc, quantity, indices)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for r in sorted(rows, key=ResultRow.sort_key):
            writer.writerow([
                repr(r.epsilon), r.d, r.m, r.quantity, r.indices, repr(r.value),
                repr(r.mesh_h), r.dofs, r.status, r.message,
            ])


def read_results_csv(path: Path) -> List[ResultRow]:
    with open(path, newline="", encoding="utf-8") as f:
        return [ResultRow(**row) for row in csv.DictReader(f)]


def run_sweep(cfg: SweepConfig, progress: bool = True) -> SweepResult:
    """
    Run an eps sweep and write results.csv, metadata.json and functionals.json.

    Args:
        cfg: Validated sweep configuration
        progress: Show a tqdm progress bar

    Returns:
        SweepResult with the sorted rows
    """
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = cfg.model_dump(mode="json", by_alias=True)
    levels = list(cfg.mesh.levels)
    logger.info("Sweep started", eps=cfg.eps_list, levels=levels, jobs=cfg.jobs, cell=cfg.geometry.is_cell)

    m_model = model_geometry(cfg, cfg.eps_list[0]).m
    raw_rows: List[Dict[str, Any]] = []
    records: List[FunctionalRecord] = []
    failed = 0

    if cfg.geometry.is_cell:
        payloads = [
            {"config": base, "item": WorkItem("cell", eps, h).__dict__} for eps in cfg.eps_list for h in levels
        ]
        results = _run_items(payloads, cfg.jobs, "Cell sweep", progress)
    else:
        limits: Dict[float, LimitResult] = {}
        lim_payloads = [{"config": base, "item": WorkItem("limit", 0.0, h).__dict__} for h in levels]
        for out in _run_items(lim_payloads, cfg.jobs, "Touching limit", progress):
            if "limit" in out:
                lim = LimitResult(**out["limit"])
                limits[lim.h] = lim
            else:
                raw_rows.extend(out["rows"])
                failed += 1
        for h, lim in sorted(limits.items()):
            for beta in range(3):
                raw_rows.append(_row("b1_star", lim.b1_star[beta], lim.eps0, h, lim.dofs, m_model, _idx(beta + 1)))
                raw_rows.append(_row("C_star", lim.C_star[beta], lim.eps0, h, lim.dofs, m_model, _idx(beta + 1)))

        payloads = [
            {
                "config": base,
                "item": WorkItem("pair", eps, h).__dict__,
                "bstar": limits[h].b1_star if h in limits else None,
            }
            for eps in cfg.eps_list
            for h in levels
        ]
        results = _run_items(payloads, cfg.jobs, "Sweep", progress)

    for out in results:
        raw_rows.extend(out["rows"])
        records.extend(FunctionalRecord(**r) for r in out.get("records", []))
        failed += int(out.get("failed", False))

    rows = sorted((ResultRow(**r) for r in raw_rows), key=ResultRow.sort_key)
    records.sort(key=lambda r: (-r.epsilon, -r.mesh_h, r.quantity, r.indices))

    csv_path = out_dir / RESULTS_FILE
    write_results_csv(rows, csv_path)
    meta_path = out_dir / METADATA_FILE
    meta_path.write_text(
        json.dumps(sweep_metadata(cfg, len(rows), failed), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    func_path = None
    if records:
        func_path = out_dir / FUNCTIONALS_FILE
        write_functionals_json(records, func_path)

    logger.info("Sweep finished", rows=len(rows), failed=failed, output=str(out_dir))
    return SweepResult(
        rows=rows,
        output_dir=out_dir,
        csv_path=csv_path,
        metadata_path=meta_path,
        functionals_path=func_path,
        failed=failed,
        records=records,
    )
