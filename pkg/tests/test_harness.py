"""
Tests for rate fitting, boundary-data presets, reports, acceptance checks and sweeps.
"""

import json
import math

import numpy as np
import pytest

from gapstress.config import settings
from gapstress.errors import ConfigError, InvalidSeriesError, ReportInputError
from gapstress.harness import (
    BoundaryDataFactory,
    acceptance_configs,
    build_report,
    cauchy_series,
    estimate_constants,
    fit_rate,
    get_boundary_data,
    quick_checks,
    read_results_csv,
    run_acceptance,
    run_sweep,
    select_series,
    write_report,
    write_results_csv,
)
from gapstress.harness.report import (
    FAIL,
    INFO,
    PASS,
    capacity_line,
    mesh_convergence_line,
    monotone_line,
    summarize,
)
from gapstress.harness.sweep import METADATA_FILE, RESULTS_FILE, sweep_metadata
from gapstress.models import MeshOptions, ResultRow, SweepConfig

LADDER = [0.08, 0.04, 0.02, 0.01]


class TestFitting:
    """Tests for log-log rate fits."""

    def test_inverse_square_root(self):
        """Test exponent -1/2 and prefactor pi."""
        fit = fit_rate([(e, math.pi / math.sqrt(e)) for e in LADDER])
        assert fit.exponent == pytest.approx(-0.5, abs=1e-10)
        assert fit.prefactor == pytest.approx(math.pi)
        assert fit.n_points == 4
        assert not fit.dropped

    def test_positive_power(self):
        """Test 3 eps^(3/4)."""
        fit = fit_rate([(e, 3 * e ** 0.75) for e in LADDER])
        assert fit.exponent == pytest.approx(0.75, abs=1e-10)
        assert fit.prefactor == pytest.approx(3.0)

    def test_logarithmic(self):
        """Test that 2 |log eps| has exponent 1 against |log eps|."""
        fit = fit_rate([(e, 2 * abs(math.log(e))) for e in LADDER], logarithmic=True)
        assert fit.exponent == pytest.approx(1.0, abs=1e-10)
        assert fit.prefactor == pytest.approx(2.0)

    def test_order_independent(self):
        """Test that the input order does not matter."""
        series = [(e, e ** -0.5) for e in LADDER]
        assert fit_rate(series[::-1]).exponent == pytest.approx(fit_rate(series).exponent)

    def test_coarsest_outlier_dropped(self):
        """Test that a polluted coarsest point is dropped."""
        eps = [0.1 * 2.0 ** -k for k in range(10)]
        series = [(e, e ** -0.5 * (2.0 if k == 0 else 1.0)) for k, e in enumerate(eps)]
        fit = fit_rate(series)
        assert fit.dropped == [0.1]
        assert fit.exponent == pytest.approx(-0.5, abs=1e-10)

    def test_noisy_interval(self):
        """Test that the confidence interval covers the true exponent under noise."""
        rng = np.random.default_rng(3)
        eps = [0.1 * 2.0 ** -k for k in range(8)]
        series = [(e, e ** -0.5 * math.exp(rng.normal(scale=0.01))) for e in eps]
        fit = fit_rate(series, drop_outliers=False)
        assert fit.half_width > 0
        assert abs(fit.exponent + 0.5) <= max(fit.half_width, 0.02)

    def test_invalid_series(self):
        """Test too few points and non-positive values."""
        with pytest.raises(InvalidSeriesError):
            fit_rate([(0.1, 1.0), (0.05, 2.0)])
        with pytest.raises(InvalidSeriesError):
            fit_rate([(0.1, 1.0), (0.05, -2.0), (0.02, 3.0)])
        with pytest.raises(InvalidSeriesError):
            fit_rate([(0.1, 1.0), (0.05, math.nan), (0.02, 3.0)])

    def test_cauchy_series(self):
        """Test successive differences attached to the larger eps."""
        diffs = cauchy_series([(0.02, 0.25), (0.08, 1.0), (0.04, 0.5)])
        assert diffs == [(0.08, 0.5), (0.04, 0.25)]

    def test_estimate_constant(self):
        """Test recovery of the additive constant of 5/sqrt(eps) + 7."""
        law = lambda e: 5 / math.sqrt(e)  # noqa: E731
        est = estimate_constants([(e, law(e) + 7) for e in LADDER], law)
        assert est.constant == pytest.approx(7.0)
        assert not est.trend_growing

    def test_estimate_with_correction(self):
        """Test a constant plus an eps correction."""
        law = lambda e: 5 / math.sqrt(e)  # noqa: E731
        est = estimate_constants([(e, law(e) + 7 + 2 * e) for e in LADDER], law, correction_powers=[1.0])
        assert est.constant == pytest.approx(7.0)
        assert est.correction_coefficients[0] == pytest.approx(2.0)

    def test_estimate_flags_growth(self):
        """Test that a misfit growing towards small eps is flagged."""
        law = lambda e: 0.0  # noqa: E731
        est = estimate_constants([(e, 1 / math.sqrt(e)) for e in LADDER], law)
        assert est.trend_growing


class TestPresets:
    """Tests for the boundary-data registry."""

    def test_shear(self):
        """Test phi = (x_2, 0)."""
        pts = np.array([[1.0, 2.0], [-3.0, 0.5]])
        np.testing.assert_allclose(get_boundary_data("shear")(pts), [[2.0, 0.0], [0.5, 0.0]])

    def test_rigid(self):
        """Test that rigid-3 is the planar rotation."""
        data = get_boundary_data("rigid-3")
        np.testing.assert_allclose(data(np.array([[1.0, 2.0]])), [[-2.0, 1.0]])
        assert data.describe().startswith("rigid-3")

    def test_available(self):
        """Test the registered names."""
        assert {"shear", "stretch", "zero", "rigid"} <= set(BoundaryDataFactory.available())
        assert get_boundary_data(" Zero ").trivial

    def test_unknown(self):
        """Test that unknown names and bad rigid indices are refused."""
        with pytest.raises(ConfigError):
            get_boundary_data("torsion")
        with pytest.raises(ConfigError):
            get_boundary_data("rigid-7")
        with pytest.raises(ConfigError):
            get_boundary_data("rigid-x")


def _rows(cfg: SweepConfig, a_scale: float = 1.0, mesh_h: float = 0.25):
    """Synthetic pair-mode rows that follow the disk laws exactly."""
    rows = []

    def add(q, v, eps, idx=""):
        rows.append(
            ResultRow(epsilon=eps, d=2, m=2, quantity=q, indices=idx, value=v, mesh_h=mesh_h, dofs=100)
        )

    for eps in cfg.eps_list:
        s = math.sqrt(eps)
        add("a", a_scale * math.pi / s, eps, "1,1,1,1")
        add("a", a_scale * 3 * math.pi / s, eps, "1,1,2,2")
        add("a11_asym", math.pi / s, eps, "1")
        add("a11_asym", 3 * math.pi / s, eps, "2")
        add("b1", 1.0 + s, eps, "1")
        add("b1", 0.0, eps, "2")
        add("grad_center_asym", 1 / s, eps, "1,2")
        add("grad_center_asym", 0.0, eps, "2,2")
        add("grad_center", (1 + s) / s, eps, "1,2")
        add("grad_center", 0.0, eps, "2,2")
        add("grad_diff_max", 1.0, eps)
        add("grad_v11_max", 1 / s, eps)
        for q in ("cross_path", "reconstruction", "b1_path_diff"):
            add(q, 1e-12, eps)
    return rows


def _write_dir(path, cfg, rows):
    path.mkdir(parents=True, exist_ok=True)
    write_results_csv(rows, path / RESULTS_FILE)
    (path / METADATA_FILE).write_text(json.dumps(sweep_metadata(cfg, len(rows), 0)))


class TestReport:
    """Tests for the sweep report."""

    def setup_method(self):
        self.cfg = SweepConfig(eps_list=LADDER)

    def test_select_series(self):
        """Test selection on the finest mesh level in decreasing eps."""
        series = select_series(_rows(self.cfg), "a", "1,1,1,1")
        assert [e for e, _ in series] == LADDER

    def test_all_lines_pass(self):
        """Test that data following the laws passes every line."""
        lines = summarize(_rows(self.cfg), self.cfg)
        assert all(ln.passed for ln in lines), [(ln.quantity, ln.detail) for ln in lines if not ln.passed]
        cap = capacity_line(_rows(self.cfg), self.cfg, 1)
        assert cap.status == PASS
        assert cap.fitted == pytest.approx(-0.5, abs=1e-8)
        assert cap.ratio == pytest.approx(1.0)

    def test_wrong_prefactor_fails(self):
        """Test that a doubled capacity fails the prefactor tolerance."""
        line = capacity_line(_rows(self.cfg, a_scale=2.0), self.cfg, 1)
        assert line.status == FAIL

    def test_symmetric_factor_passes(self):
        """Test that a blow-up factor vanishing by symmetry is accepted."""
        lines = {ln.quantity: ln for ln in summarize(_rows(self.cfg), self.cfg)}
        assert lines["|b1^2(eps) - b1^2(eps/2)|"].detail == "vanishes by symmetry"

    def test_single_level_mesh_change(self):
        """Test that one mesh level leaves the mesh-change line informational."""
        line = mesh_convergence_line(_rows(self.cfg))
        assert line.status == INFO
        assert line.detail == "single mesh level"

    def test_mesh_change_passes(self):
        """Test a 0.5% change between the two finest levels, ignoring a coarser third level."""
        rows = _rows(self.cfg) + _rows(self.cfg, a_scale=1.005, mesh_h=0.35)
        rows += _rows(self.cfg, a_scale=1.5, mesh_h=0.5)
        line = mesh_convergence_line(rows)
        assert line.status == PASS
        assert line.ratio == pytest.approx(1.005)
        lines = {ln.quantity: ln for ln in summarize(rows, self.cfg)}
        assert lines["a11^11 mesh change"].status == PASS

    def test_mesh_change_fails(self):
        """Test that a 2% change at one eps fails."""
        coarse = _rows(self.cfg, mesh_h=0.35)
        for r in coarse:
            if r.quantity == "a" and r.indices == "1,1,1,1" and r.epsilon == 0.02:
                r.value *= 1.02
        line = mesh_convergence_line(_rows(self.cfg) + coarse)
        assert line.status == FAIL
        assert "eps=0.02" in line.detail

    def test_monotone_passes(self):
        """Test that a_11^11 growing as eps shrinks passes."""
        assert monotone_line(_rows(self.cfg)).status == PASS

    def test_monotone_fails(self):
        """Test that a non-increasing step in a_11^11 fails."""
        rows = _rows(self.cfg)
        a = {r.epsilon: r for r in rows if r.quantity == "a" and r.indices == "1,1,1,1"}
        a[0.01].value = a[0.02].value
        line = monotone_line(rows)
        assert line.status == FAIL
        assert line.detail == "no increase at eps=0.01"

    def test_monotone_uses_finest_level(self):
        """Test that a disordered coarse level does not affect the verdict."""
        coarse = _rows(self.cfg, mesh_h=0.5)
        for r in coarse:
            if r.quantity == "a":
                r.value = 1.0
        assert monotone_line(_rows(self.cfg) + coarse).status == PASS

    def test_write_idempotent(self, tmp_path):
        """Test that rerunning the report gives identical bytes."""
        _write_dir(tmp_path, self.cfg, _rows(self.cfg))
        path, lines = write_report(tmp_path)
        first = path.read_bytes()
        write_report(tmp_path)
        assert path.read_bytes() == first
        text, _ = build_report(tmp_path)
        assert "| quantity | law | fitted exponent |" in text

    def test_csv_round_trip(self, tmp_path):
        """Test that written rows read back in sorted order."""
        rows = _rows(self.cfg)
        write_results_csv(rows, tmp_path / RESULTS_FILE)
        back = read_results_csv(tmp_path / RESULTS_FILE)
        assert len(back) == len(rows)
        assert back[0].epsilon == max(LADDER)

    def test_missing_results(self, tmp_path):
        """Test that a directory without results is refused."""
        with pytest.raises(ReportInputError):
            build_report(tmp_path / "nothing")


class TestAcceptance:
    """Tests for the acceptance suite."""

    def test_quick_checks_pass(self):
        """Test the closed-form, cancellation and 3D consistency checks."""
        results = quick_checks()
        assert [r.number for r in results] == [1, 2, 12]
        assert all(r.passed for r in results), [r.detail for r in results if not r.passed]

    def test_run_without_oracle(self):
        """Test that the quick suite runs without sweeps."""
        results = run_acceptance(full=False, progress=False)
        assert [r.number for r in results] == sorted(r.number for r in results)

    def test_configs(self, tmp_path):
        """Test the four acceptance sweep configurations."""
        cfgs = acceptance_configs(tmp_path, levels=[0.5, 0.35])
        assert set(cfgs) == {"disks", "disks-soft", "superellipse-m4", "cell"}
        assert cfgs["cell"].geometry.is_cell
        assert cfgs["disks-soft"].material.lam2mu / cfgs["disks-soft"].material.mu == pytest.approx(6.0)
        assert cfgs["disks"].mesh.levels == [0.5, 0.35]
        assert cfgs["disks"].output_dir == tmp_path / "disks"


@pytest.mark.slow
class TestSweep:
    """End-to-end sweeps on very coarse meshes."""

    def test_pair_sweep(self, tmp_path):
        """Test that a pair sweep writes its files with consistent identities."""
        cfg = SweepConfig(
            eps_list=[0.12, 0.1, 0.08],
            mesh=MeshOptions(levels=[0.8], n_layers=4, order=1),
            output_dir=tmp_path,
            n_probes=5,
        )
        result = run_sweep(cfg, progress=False)
        assert result.failed == 0
        assert (tmp_path / RESULTS_FILE).is_file()
        assert (tmp_path / METADATA_FILE).is_file()
        assert len(result.series("a", "1,1,1,1")) == 3
        assert len(select_series(result.rows, "b1_star", "1")) == 1
        assert all(v <= 1e-8 for _, v in result.series("cross_path"))

    def _config(self, out, **update):
        cfg = SweepConfig(
            eps_list=[0.12, 0.1, 0.08],
            mesh=MeshOptions(levels=[0.8], n_layers=4, order=1),
            output_dir=out,
            n_probes=5,
        )
        return cfg.model_copy(update=update)

    def test_rerun_identical_csv(self, tmp_path):
        """Test that rerunning a sweep into the same directory rewrites identical bytes."""
        cfg = self._config(tmp_path)
        first = run_sweep(cfg, progress=False).csv_path.read_bytes()
        second = run_sweep(cfg, progress=False).csv_path.read_bytes()
        assert first == second

    def test_parallel_matches_serial(self, tmp_path):
        """Test that two worker processes give the same CSV as one."""
        serial = run_sweep(self._config(tmp_path / "serial", jobs=1), progress=False)
        parallel = run_sweep(self._config(tmp_path / "parallel", jobs=2), progress=False)
        assert serial.failed == parallel.failed == 0
        assert serial.csv_path.read_bytes() == parallel.csv_path.read_bytes()

    def test_zero_data_gives_zero_blowup(self, tmp_path):
        """Test that zero boundary data makes every blow-up quantity vanish."""
        result = run_sweep(self._config(tmp_path, phi="zero"), progress=False)
        assert result.failed == 0
        for q in ("b1", "b1_star", "b_tilde", "C", "C_full", "c_diff", "grad_center", "grad_center_asym"):
            values = [r.value for r in result.rows if r.quantity == q]
            assert values, q
            assert all(v == 0.0 for v in values), q

    def test_residual_above_tolerance(self, tmp_path, monkeypatch):
        """Test that solves missing the residual tolerance surface as error rows."""
        monkeypatch.setattr(settings, "solver_rtol", 0.0)
        result = run_sweep(self._config(tmp_path), progress=False)
        errors = [r for r in result.rows if r.status == "error"]
        assert result.failed == 4
        assert {r.indices for r in errors} >= {"limit", "v_family", "full"}
        assert all("above rtol" in r.message for r in errors)
        back = read_results_csv(result.csv_path)
        assert sum(r.status == "error" for r in back) == len(errors)

    def test_cell_sweep(self, tmp_path):
        """Test that a cell sweep records oracle and asymptotic moduli."""
        cfg = acceptance_configs(tmp_path, levels=[0.6])["cell"]
        cfg = cfg.model_copy(
            update={"eps_list": [0.12, 0.1, 0.08], "mesh": MeshOptions(levels=[0.6], n_layers=4, order=1)}
        )
        result = run_sweep(cfg, progress=False)
        assert result.failed == 0
        assert len(result.series("mu_star")) == 3
        assert len(result.series("mu_star_asym")) == 3
