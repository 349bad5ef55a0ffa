"""
Markdown summary of a completed sweep.

Each line compares one oracle quantity with its asymptotic law: fitted
exponent, expected exponent, prefactor ratio at the smallest eps and a
pass/fail verdict against the acceptance tolerances.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import structlog
from scipy import special

from ..asymptotics.anisotropy import anisotropy
from ..asymptotics.capacity import (
    a11_leading,
    composed_gradient_coefficients,
    displayed_gradient_coefficients,
    displayed_ratio,
)
from ..errors import InvalidSeriesError, ReportInputError
from ..models import InclusionPairGeometry, LameParams, ResultRow, SweepConfig
from .fitting import cauchy_series, fit_rate
from .sweep import METADATA_FILE, RESULTS_FILE, model_geometry, read_results_csv, select_series

logger = structlog.get_logger()

REPORT_FILE = "report.md"

PASS, FAIL, INFO = "pass", "fail", "info"


@dataclass
class ReportLine:
    """One row of the report table."""
    quantity: str
    law: str
    fitted: Optional[float] = None
    expected: Optional[float] = None
    ratio: Optional[float] = None
    status: str = INFO
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status != FAIL


def _fmt(v: Optional[float], spec: str = ".4f") -> str:
    return "-" if v is None or not math.isfinite(v) else format(v, spec)


def load_results(results_dir: Path) -> Tuple[List[ResultRow], SweepConfig]:
    """Rows and configuration of a sweep directory."""
    results_dir = Path(results_dir)
    csv_path = results_dir / RESULTS_FILE
    meta_path = results_dir / METADATA_FILE
    if not csv_path.is_file() or not meta_path.is_file():
        raise ReportInputError(f"no sweep results in {results_dir}")
    rows = read_results_csv(csv_path)
    if not rows:
        raise ReportInputError(f"{csv_path} has no rows")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    return rows, SweepConfig(**meta["config"])


def _last(series: List[Tuple[float, float]]) -> Optional[float]:
    return series[-1][1] if series else None


def capacity_line(rows: List[ResultRow], cfg: SweepConfig, alpha: int, mandatory: bool = True) -> ReportLine:
    """Rate and prefactor of a_11^{alpha alpha} against its leading law."""
    g = model_geometry(cfg, cfg.eps_list[-1])
    law = a11_leading(cfg.material, g, alpha)
    series = select_series(rows, "a", f"1,1,{alpha},{alpha}")
    asym = select_series(rows, "a11_asym", str(alpha))
    line = ReportLine(
        quantity=f"a11^{alpha}{alpha}",
        law=law.law,
        expected=1.0 if law.logarithmic else law.eps_power,
    )
    if len(series) < 3 or not asym:
        line.status = FAIL if mandatory else INFO
        line.detail = "not enough sweep points"
        return line
    fit = fit_rate(series, logarithmic=law.logarithmic)
    line.fitted = fit.exponent
    line.ratio = series[-1][1] / asym[-1][1]
    ratio_tol = 0.15 if g.m == 2 else 0.2
    ok = abs(fit.exponent - line.expected) <= 0.05 and abs(line.ratio - 1) <= ratio_tol
    line.status = (PASS if ok else FAIL) if mandatory else INFO
    line.detail = f"+-{fit.half_width:.3f} (95%), {fit.n_points} points"
    return line


def component_ratio_line(rows: List[ResultRow], cfg: SweepConfig) -> ReportLine:
    p = cfg.material
    a11 = _last(select_series(rows, "a", "1,1,1,1"))
    a22 = _last(select_series(rows, "a", "1,1,2,2"))
    line = ReportLine(quantity="a11^22 / a11^11", law="(lambda+2mu)/mu", expected=None)
    if a11 is None or a22 is None:
        line.status, line.detail = FAIL, "missing capacities"
        return line
    line.ratio = (a22 / a11) / (p.lam2mu / p.mu)
    line.status = PASS if abs(line.ratio - 1) <= 0.10 else FAIL
    return line


def blowup_lines(rows: List[ResultRow], cfg: SweepConfig) -> List[ReportLine]:
    """Cauchy decay of b_1^beta, beta = 1, 2; factors that vanish by symmetry pass."""
    series = {beta: select_series(rows, "b1", str(beta)) for beta in (1, 2)}
    scale = max([abs(v) for s in series.values() for _, v in s] + [0.0])
    lines = []
    for beta, s in series.items():
        line = ReportLine(quantity=f"|b1^{beta}(eps) - b1^{beta}(eps/2)|", law="b1 -> b1* like sqrt(eps)", expected=0.5)
        if len(s) < 3:
            line.status, line.detail = FAIL, "not enough sweep points"
        elif max(abs(v) for _, v in s) <= 1e-6 * max(scale, 1e-300):
            line.status, line.detail = PASS, "vanishes by symmetry"
        else:
            try:
                fit = fit_rate(cauchy_series(s), drop_outliers=False)
                line.fitted = fit.exponent
                line.status = PASS if fit.exponent >= 0.4 else FAIL
            except InvalidSeriesError as e:
                line.status, line.detail = FAIL, str(e)
        lines.append(line)
    return lines


def gradient_line(rows: List[ResultRow], cfg: SweepConfig) -> ReportLine:
    """Oracle gradient at the gap centre against the leading asymptotic gradient."""
    line = ReportLine(quantity="grad u(0), second column", law="sum (C1-C2) grad u_1^alpha")
    cols = {}
    for q in ("grad_center", "grad_center_asym"):
        for idx in ("1,2", "2,2"):
            for eps, v in select_series(rows, q, idx):
                cols.setdefault(eps, {})[(q, idx)] = v
    errs = []
    for eps in sorted(cols, reverse=True):
        if len(cols[eps]) < 4:
            continue
        num = np.array([cols[eps][("grad_center", i)] for i in ("1,2", "2,2")])
        ref = np.array([cols[eps][("grad_center_asym", i)] for i in ("1,2", "2,2")])
        norm = float(np.linalg.norm(ref))
        if norm > 0:
            errs.append(float(np.linalg.norm(num - ref)) / norm)
    if not errs:
        line.status, line.detail = FAIL, "no gradient comparison available"
        return line
    improving = sum(b < a for a, b in zip(errs, errs[1:]))
    need = min(2, len(errs) - 1)
    line.ratio = 1 + errs[-1]
    line.status = PASS if errs[-1] <= 0.2 and improving >= need else FAIL
    line.detail = "relative errors " + ", ".join(f"{e:.3f}" for e in errs)
    return line


def bounded_difference_line(rows: List[ResultRow], cfg: SweepConfig) -> ReportLine:
    diff = select_series(rows, "grad_diff_max")
    full = select_series(rows, "grad_v11_max")
    line = ReportLine(quantity="max|grad(v_1^1 - u_1^1)|", law="O(1) while grad v_1^1 blows up")
    if len(diff) < 2 or len(full) < 2:
        line.status, line.detail = FAIL, "not enough sweep points"
        return line
    g_diff = diff[-1][1] / diff[0][1]
    g_full = full[-1][1] / full[0][1]
    line.status = PASS if g_diff <= 2.0 and g_full >= 2.5 else FAIL
    line.detail = f"difference grows x{g_diff:.2f}, gradient grows x{g_full:.2f}"
    return line


def mesh_convergence_line(rows: List[ResultRow], tol: float = 0.01) -> ReportLine:
    """Change of a_11^{11} between the two finest mesh levels, worst over eps."""
    line = ReportLine(quantity="a11^11 mesh change", law=f"relative change <= {tol:g}")
    ok = [r for r in rows if r.status == "ok" and r.quantity == "a" and r.indices == "1,1,1,1"]
    levels = sorted({r.mesh_h for r in ok})
    if len(levels) < 2:
        line.detail = "single mesh level"
        return line
    fine = dict(select_series(rows, "a", "1,1,1,1", mesh_h=levels[0]))
    coarse = dict(select_series(rows, "a", "1,1,1,1", mesh_h=levels[1]))
    common = sorted(set(fine) & set(coarse), reverse=True)
    if not common:
        line.status, line.detail = FAIL, "no eps shared by the two finest levels"
        return line
    changes = [abs(fine[e] - coarse[e]) / abs(fine[e]) for e in common]
    worst = max(changes)
    line.ratio = 1 + worst
    line.status = PASS if worst <= tol else FAIL
    at = common[changes.index(worst)]
    line.detail = f"worst {worst:.2e} at eps={at:g}, h={levels[0]:g} vs {levels[1]:g}"
    return line


def monotone_line(rows: List[ResultRow]) -> ReportLine:
    """a_11^{11} must grow strictly as eps decreases."""
    series = select_series(rows, "a", "1,1,1,1")
    line = ReportLine(quantity="a11^11 monotone in eps", law="decreasing in eps")
    if len(series) < 2:
        line.status, line.detail = FAIL, "not enough sweep points"
        return line
    bad = [e2 for (_, v1), (e2, v2) in zip(series, series[1:]) if not v2 > v1]
    line.status = FAIL if bad else PASS
    if bad:
        line.detail = "no increase at eps=" + ", ".join(f"{e:g}" for e in bad)
    return line


def identity_line(rows: List[ResultRow], quantity: str, label: str, tol: float = 1e-8) -> ReportLine:
    vals = [r.value for r in rows if r.quantity == quantity and r.status == "ok"]
    line = ReportLine(quantity=label, law=f"agreement <= {tol:g}")
    if not vals:
        line.status, line.detail = FAIL, "no values"
        return line
    worst = max(vals)
    line.status = PASS if worst <= tol else FAIL
    line.detail = f"worst {worst:.2e}"
    return line


def cell_lines(rows: List[ResultRow], cfg: SweepConfig) -> List[ReportLine]:
    """Effective moduli of the period cell against the fibre-array law."""
    lines = []
    for q, mandatory in (("mu_star", True), ("e_star", False)):
        series = select_series(rows, q)
        asym = select_series(rows, f"{q}_asym")
        line = ReportLine(quantity=q, law="c (L2/L1) pi / sqrt(kappa eps)", expected=-0.5)
        if len(series) < 3 or not asym:
            line.status = FAIL if mandatory else INFO
            line.detail = "not enough sweep points"
        else:
            fit = fit_rate(series)
            line.fitted = fit.exponent
            line.ratio = series[-1][1] / asym[-1][1]
            ok = abs(fit.exponent + 0.5) <= 0.05 and abs(line.ratio - 1) <= 0.15
            line.status = (PASS if ok else FAIL) if mandatory else INFO
        lines.append(line)
    return lines


def formula_consistency(n_samples: int = 100, seed: int = 0) -> Tuple[float, float]:
    """
    3D gradient coefficients against 1 / a_11^{alpha alpha}.

    Returns:
        (largest relative mismatch of displayed * ratio vs composed over random
        parameter tuples, largest deviation of the isotropic reduction from its
        closed form over m = 4..8)
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        m = int(rng.integers(4, 9))
        p = LameParams(lam=float(rng.uniform(0.1, 5.0)), mu=float(rng.uniform(0.1, 5.0)), d=3)
        g = InclusionPairGeometry(
            d=3, m=m, kappa=float(rng.uniform(0.2, 3.0)), eps=float(rng.uniform(1e-4, 0.1)), R=0.5,
        )
        composed = composed_gradient_coefficients(p, g)
        shown = displayed_gradient_coefficients(p, g) * displayed_ratio(3, m)
        mask = composed != 0
        worst = max(worst, float(np.max(np.abs(shown[mask] - composed[mask]) / np.abs(composed[mask]))))
    iso = 0.0
    for m in range(4, 9):
        closed = m * math.pi * special.gamma(2.0 / m) / (2 * special.gamma(1.0 / m) ** 2)
        iso = max(iso, abs(anisotropy(m, 1.0, 1.0).isotropic_ratio - closed))
    return worst, iso


def formula_lines() -> List[ReportLine]:
    worst, iso = formula_consistency()
    return [
        ReportLine(
            quantity="d=3 gradient coefficients",
            law="formula-consistency",
            status=PASS if worst <= 1e-12 else FAIL,
            detail=f"worst relative mismatch {worst:.2e}",
        ),
        ReportLine(
            quantity="d=3 isotropic reduction",
            law="formula-consistency",
            status=PASS if iso <= 1e-8 else FAIL,
            detail=f"m pi / G_m off its closed form by {iso:.2e}",
        ),
    ]


def summarize(rows: List[ResultRow], cfg: SweepConfig) -> List[ReportLine]:
    """All report lines for a sweep."""
    if cfg.geometry.is_cell:
        return cell_lines(rows, cfg) + formula_lines()
    m = model_geometry(cfg, cfg.eps_list[-1]).m
    lines = [capacity_line(rows, cfg, 1), capacity_line(rows, cfg, 2)]
    if m >= 3:
        lines.append(capacity_line(rows, cfg, 3, mandatory=False))
    lines.append(component_ratio_line(rows, cfg))
    lines.append(mesh_convergence_line(rows))
    lines.append(monotone_line(rows))
    lines += blowup_lines(rows, cfg)
    lines.append(gradient_line(rows, cfg))
    lines.append(bounded_difference_line(rows, cfg))
    lines.append(identity_line(rows, "cross_path", "C from direct solve vs assembled system"))
    lines.append(identity_line(rows, "reconstruction", "u vs sum C v + v_0"))
    lines.append(identity_line(rows, "b1_path_diff", "b_1 along three paths"))
    return lines + formula_lines()


def render(lines: List[ReportLine], cfg: SweepConfig) -> str:
    geo = cfg.geometry
    out = [
        "# gapstress sweep report",
        "",
        f"- geometry: {geo.shape.value}, outer {geo.outer.kind.value}",
        f"- material: lambda={cfg.material.lam:g}, mu={cfg.material.mu:g}",
        f"- boundary data: {cfg.phi}",
        f"- eps: {', '.join(f'{e:g}' for e in cfg.eps_list)}",
        "",
        "| quantity | law | fitted exponent | expected exponent | prefactor ratio | status | detail |",
        "|---|---|---|---|---|---|---|",
    ]
    for ln in lines:
        out.append(
            f"| {ln.quantity} | {ln.law} | {_fmt(ln.fitted)} | {_fmt(ln.expected)} | "
            f"{_fmt(ln.ratio)} | {ln.status} | {ln.detail} |"
        )
    failed = sum(not ln.passed for ln in lines)
    out += ["", f"{len(lines) - failed} of {len(lines)} lines passed."]
    return "\n".join(out) + "\n"


def build_report(results_dir: Path) -> Tuple[str, List[ReportLine]]:
    rows, cfg = load_results(results_dir)
    lines = summarize(rows, cfg)
    return render(lines, cfg), lines


def write_report(results_dir: Path) -> Tuple[Path, List[ReportLine]]:
    """Write report.md into the results directory; rerunning gives identical bytes."""
    text, lines = build_report(results_dir)
    path = Path(results_dir) / REPORT_FILE
    path.write_text(text, encoding="utf-8")
    logger.info("Report written", path=str(path), lines=len(lines))
    return path, lines
