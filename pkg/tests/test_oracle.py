"""
Tests for the finite-element oracle.

Meshes are deliberately coarse; convergence in eps is covered by the
acceptance sweeps.
"""

import numpy as np
import pytest

from gapstress.config import settings
from gapstress.elasticity import rigid_basis
from gapstress.errors import GeometryError, PointOutsideMeshError, SolverError
from gapstress.geometry import build_mesh, cell_geometry, disks_to_model, geometry_domain
from gapstress.harness.acceptance import check_rigid_exactness
from gapstress.harness.presets import ShearData, StretchData
from gapstress.models import LameParams
from gapstress.oracle import (
    DofLayout,
    GradientProbe,
    OracleProblem,
    SolveStatus,
    boundary_pairing,
    cell_energies,
    compute_b,
    compute_capacity,
    functional_records,
    limit_pairing,
    moduli_from_energies,
    read_functionals_json,
    recovery_operator,
    solve_cell,
    touching_eps,
    write_functionals_json,
    write_solution_csv,
)


class TestAssembly:
    """Tests for the stiffness matrix."""

    @classmethod
    def setup_class(cls):
        mesh = build_mesh(disks_to_model(1.0, 1.0, 0.1, 4.0), h_target=0.8, n_layers=4)
        cls.problem = OracleProblem(mesh, LameParams(lam=1.0, mu=1.0), order=2)

    def test_symmetric(self):
        """Test K = K^T."""
        K = self.problem.K
        assert abs(K - K.T).max() <= 1e-12 * abs(K).max()

    def test_rigid_kernel(self):
        """Test that rigid motions carry no energy."""
        pts = self.problem.layout.points
        for psi in rigid_basis(2):
            u = psi(pts).ravel()
            assert np.max(np.abs(self.problem.K @ u)) <= 1e-10 * abs(self.problem.K).max()

    def test_three_dimensional_parameters(self):
        """Test that the oracle refuses d = 3."""
        with pytest.raises(GeometryError):
            OracleProblem(self.problem.mesh, LameParams(lam=1.0, mu=1.0, d=3))


class TestPairSolves:
    """Tests for the v-family, capacities and functionals."""

    @classmethod
    def setup_class(cls):
        cls.p = LameParams(lam=1.0, mu=1.0)
        mesh = build_mesh(disks_to_model(1.0, 1.0, 0.1, 4.0), h_target=0.8, n_layers=4)
        cls.problem = OracleProblem(mesh, cls.p, order=2)
        cls.phi = StretchData()
        cls.fam = cls.problem.v_family(cls.phi)
        cls.a = compute_capacity(cls.fam)
        cls.full = cls.problem.full(cls.phi)
        cls.res = compute_b(cls.fam, cls.a, full=cls.full)

    def test_rigid_exactness(self):
        """Test that rigid boundary data give zero strain and unit constants."""
        result = check_rigid_exactness(h_target=0.8, eps=0.1)
        assert result.passed, result.detail

    def test_capacity_positive_definite(self):
        """Test that the capacity matrix is symmetric positive definite."""
        np.testing.assert_allclose(self.a, self.a.T)
        assert np.min(np.linalg.eigvalsh(self.a)) > 0

    def test_capacity_mirror_symmetry(self):
        """Test a_11 = a_22 on the diagonal for two equal disks."""
        d1 = np.diag(self.res.a_block(1, 1))
        d2 = np.diag(self.res.a_block(2, 2))
        np.testing.assert_allclose(d1, d2, rtol=1e-6)

    def test_normal_stiffer_than_shear(self):
        """Test a_11^{22} > a_11^{11} in the narrow gap."""
        assert self.a[1, 1] > self.a[0, 0]

    def test_cross_path(self):
        """Test that the capacity system reproduces the rigid constants of the direct solve."""
        direct = np.concatenate([self.full.C1, self.full.C2])
        scale = np.max(np.abs(direct))
        assert np.max(np.abs(self.res.C - direct)) <= 1e-8 * scale

    def test_reconstruction(self):
        """Test u = v_0 + sum C_i^alpha v_i^alpha."""
        recon = self.fam.v0 + sum(
            self.res.C[3 * (i - 1) + k] * self.fam.v[(i, k + 1)] for i in (1, 2) for k in range(3)
        )
        assert np.max(np.abs(self.full.u - recon)) <= 1e-8 * max(1.0, np.max(np.abs(self.full.u)))

    def test_b1_paths_agree(self):
        """Test that the three formulas for b_1 agree."""
        scale = np.max(np.abs(self.res.b1))
        assert scale > 0
        for path in self.res.b1_paths.values():
            assert np.max(np.abs(path - self.res.b1)) <= 1e-8 * scale

    def test_force_balance(self):
        """Test that the free inclusions carry zero net force and torque."""
        K = self.problem.K
        scale = np.max(np.abs(self.res.b1))
        for i in (1, 2):
            for beta in (1, 2, 3):
                pairing = boundary_pairing(self.problem.layout, K, self.full.u, i, beta)
                assert abs(pairing) <= 1e-8 * scale

    def test_flux_needs_parameters(self):
        """Test that the flux pairing requires Lamé parameters."""
        with pytest.raises(SolverError):
            boundary_pairing(self.problem.layout, self.problem.K, self.full.u, 1, 1, method="flux")

    def test_limit_shares_constants(self):
        """Test that the touching-limit solve uses one rigid motion."""
        lim = self.problem.limit(ShearData())
        assert lim.shared
        np.testing.assert_array_equal(lim.C1, lim.C2)
        assert limit_pairing(lim, self.problem.K).shape == (3,)

    def test_solve_status(self):
        """Test that every solve carries its residual and the tolerance it met."""
        for sol in (self.fam, self.full, self.fam.solution(1, 2)):
            assert sol.status is not None
            assert sol.status.residual == sol.residual
            assert sol.status.rtol == settings.solver_rtol
            assert sol.converged

    def test_status_above_tolerance(self):
        """Test that a residual above the tolerance is not converged and says so."""
        status = SolveStatus(residual=3e-8, rtol=1e-10)
        assert not status.converged
        assert status.describe() == "residual 3.000e-08 above rtol 1.0e-10"
        assert SolveStatus(residual=1e-10, rtol=1e-10).converged

    def test_touching_eps(self):
        """Test eps_0 as a fraction of the inclusion diameter."""
        dom = geometry_domain(disks_to_model(1.0, 1.0, 0.1, 4.0))
        assert touching_eps(dom) == pytest.approx(2.0e-4)


class TestGradientProbe:
    """Tests for point location and gradient recovery."""

    @classmethod
    def setup_class(cls):
        cls.mesh = build_mesh(disks_to_model(1.0, 1.0, 0.1, 4.0), h_target=0.8, n_layers=4)
        cls.layout = OracleProblem(cls.mesh, LameParams(lam=1.0, mu=1.0), order=2).layout
        cls.probe = GradientProbe(cls.layout)

    def test_linear_field(self):
        """Test that affine fields are reproduced exactly by both gradient modes."""
        A = np.array([[0.3, -1.2], [2.0, 0.5]])
        u = (self.layout.points @ A.T).ravel()
        pts = np.array([[0.0, 0.0], [0.2, 0.01], [2.5, 0.3]])
        for recovered in (True, False):
            grads = self.probe(u, pts, recovered=recovered)
            np.testing.assert_allclose(grads, np.broadcast_to(A, (3, 2, 2)), atol=1e-9)

    def test_quadratic_field(self):
        """Test that a quadratic field is reproduced exactly on P2 elements, raw and recovered."""
        x, y = self.layout.points[:, 0], self.layout.points[:, 1]
        u = np.column_stack([0.3 * x**2 - x * y + 0.2 * y**2, x * y + 0.5 * x - y**2]).ravel()
        pts = np.array([[0.0, 0.0], [0.2, 0.01], [2.5, 0.3], [-1.7, -0.4]])
        px, py = pts[:, 0], pts[:, 1]
        exact = np.stack(
            [np.column_stack([0.6 * px - py, -px + 0.4 * py]), np.column_stack([py + 0.5, px - 2 * py])],
            axis=1,
        )
        for recovered in (True, False):
            np.testing.assert_allclose(self.probe(u, pts, recovered=recovered), exact, atol=1e-8)

    def test_recovery_reproduces_constants(self):
        """Test that every node of the recovery operator has unit total weight."""
        R = recovery_operator(self.layout)
        assert R.shape[0] == self.layout.n_nodes
        np.testing.assert_allclose(R @ np.ones(R.shape[1]), 1.0, atol=1e-8)

    def test_linear_elements(self):
        """Test exact affine gradients on P1 elements."""
        layout = DofLayout.from_mesh(self.mesh, order=1)
        A = np.array([[1.0, 0.4], [-0.7, 2.0]])
        u = (layout.points @ A.T).ravel()
        pts = np.array([[0.0, 0.0], [1.5, -0.2]])
        grads = GradientProbe(layout)(u, pts)
        np.testing.assert_allclose(grads, np.broadcast_to(A, (2, 2, 2)), atol=1e-9)

    def test_point_inside_inclusion(self):
        """Test that points inside an inclusion are refused."""
        with pytest.raises(PointOutsideMeshError):
            self.probe.locate(np.array([[0.0, 1.0]]))


class TestCell:
    """Tests for the period-cell problem."""

    @classmethod
    def setup_class(cls):
        cls.p = LameParams(lam=1.0, mu=1.0)
        cls.mesh = build_mesh(cell_geometry(1.5, 1.0, 0.1), h_target=0.6, n_layers=4)

    def test_energies_positive(self):
        """Test positive shear and extension energies with extension the stiffer."""
        energies = cell_energies(self.mesh, self.p)
        assert energies[1] > 0 and energies[2] > 0
        assert energies[2] > energies[1]

    def test_moduli_from_energies(self):
        """Test mu* = (L2/L1) E^1 and E* = E/(lambda+2mu) (L2/L1) E^2."""
        em = moduli_from_energies(self.p, 1.5, 1.0, 0.1, {1: 3.0, 2: 6.0})
        assert em.mu_star == pytest.approx(2.0)
        assert em.e_star == pytest.approx(self.p.young / 3.0 * 4.0)
        assert em.source == "oracle"

    def test_alpha_range(self):
        """Test that only planar rigid motions load the cell."""
        with pytest.raises(ValueError):
            solve_cell(self.mesh, self.p, alpha=4)

    def test_pair_mesh_refused(self):
        """Test that a pair mesh is not accepted as a cell."""
        mesh = build_mesh(disks_to_model(1.0, 1.0, 0.1, 4.0), h_target=0.8, n_layers=4)
        with pytest.raises(GeometryError):
            cell_energies(mesh, self.p)


class TestIO:
    """Tests for solution and functional export."""

    @classmethod
    def setup_class(cls):
        mesh = build_mesh(disks_to_model(1.0, 1.0, 0.1, 4.0), h_target=0.8, n_layers=4)
        problem = OracleProblem(mesh, LameParams(lam=1.0, mu=1.0), order=1)
        cls.fam = problem.v_family(ShearData())
        cls.res = compute_b(cls.fam)
        cls.sol = problem.full(ShearData())
        cls.dofs = problem.layout.n_dofs

    def test_functionals_json(self, tmp_path):
        """Test that the JSON export keeps 1-based indices and values."""
        records = functional_records(self.res, 0.1, 0.8, self.dofs)
        path = tmp_path / "functionals.json"
        write_functionals_json(records, path)
        back = read_functionals_json(path)
        assert len(back) == len(records)
        a11 = next(r for r in back if r.quantity == "a" and r.indices == [1, 1, 1, 1])
        assert a11.value == pytest.approx(self.res.a[0, 0])
        assert not any(r.quantity == "b1_star" for r in back)

    def test_solution_csv(self, tmp_path):
        """Test one CSV row per node plus the header."""
        path = tmp_path / "u.csv"
        write_solution_csv(self.sol, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "node,x,y,u1,u2"
        assert len(lines) == self.sol.layout.n_nodes + 1
