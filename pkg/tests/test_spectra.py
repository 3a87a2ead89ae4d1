import math

import numpy as np
import pytest
import scipy.sparse as sp

import femcond as fc
from femcond.assembly import DensityFunction, SparseSymmetric
from femcond.spectra import extreme_eigenvalues, generalized_min_eigenvalue
from conftest import random_mesh, random_spd_field
from oracles import toeplitz_kappa_1d


def _sparse(dense) -> SparseSymmetric:
    return SparseSymmetric(sp.csr_matrix(np.asarray(dense, dtype=float)))


class TestExtremeEigenvalues:
    def test_identity_order_5(self):
        r = extreme_eigenvalues(_sparse(np.eye(5)))
        assert r.lambda_min == pytest.approx(1.0, abs=1e-14)
        assert r.lambda_max == pytest.approx(1.0, abs=1e-14)
        assert r.kappa == pytest.approx(1.0, abs=1e-14)
        assert r.method == "dense"

    def test_tridiagonal_closed_form(self):
        m = fc.generate_uniform(1, 4)
        a = fc.assemble_stiffness(m, fc.DiffusionField.identity(1))
        r = extreme_eigenvalues(a)
        assert r.lambda_min == pytest.approx(4 * (2 - math.sqrt(2)), rel=1e-13)
        assert r.lambda_max == pytest.approx(4 * (2 + math.sqrt(2)), rel=1e-13)
        assert r.kappa == pytest.approx((2 + math.sqrt(2)) / (2 - math.sqrt(2)), rel=1e-13)

    @pytest.mark.parametrize("n", [64, 1024])
    def test_uniform_1d_kappa_closed_form(self, n):
        m = fc.generate_uniform(1, n)
        a = fc.assemble_stiffness(m, fc.DiffusionField.identity(1))
        r = extreme_eigenvalues(a, tol=1e-8)
        assert r.kappa == pytest.approx(toeplitz_kappa_1d(n), rel=1e-8)

    def test_iterative_path_matches_dense(self, rng):
        # overlap regime: same matrices solved by both paths
        for _ in range(20):
            n_elems = int(rng.integers(500, 1200))
            widths = rng.uniform(0.2, 3.0, n_elems)
            nodes = np.concatenate([[0.0], np.cumsum(widths)])
            nodes /= nodes[-1]
            mesh = fc.SimplicialMesh(
                1, nodes, np.stack([np.arange(n_elems), np.arange(1, n_elems + 1)], axis=1)
            )
            a = fc.jacobi_scale(
                fc.assemble_stiffness(mesh, fc.DiffusionField.identity(1))
            )
            tol = 1e-8
            dense = extreme_eigenvalues(a, tol)
            iterative = extreme_eigenvalues(a, tol, dense_cutoff=10)
            assert iterative.method == "lanczos_shift_invert"
            assert iterative.converged
            assert iterative.lambda_min == pytest.approx(dense.lambda_min, rel=10 * tol)
            assert iterative.lambda_max == pytest.approx(dense.lambda_max, rel=10 * tol)

    def test_rayleigh_certificates(self, rng):
        mesh = random_mesh(rng, dim=2)
        a = fc.assemble_stiffness(mesh, random_spd_field(rng, 2))
        tol = 1e-8
        r = extreme_eigenvalues(a, tol)
        rq_min = (r.v_min @ (a.matrix @ r.v_min)) / (r.v_min @ r.v_min)
        rq_max = (r.v_max @ (a.matrix @ r.v_max)) / (r.v_max @ r.v_max)
        assert r.lambda_min <= rq_min <= r.lambda_min * (1 + tol)
        assert r.lambda_max * (1 - tol) <= rq_max <= r.lambda_max * (1 + 1e-15)

    def test_nonconvergence_is_flagged(self):
        m = fc.generate_uniform(1, 700)
        a = fc.assemble_stiffness(m, fc.DiffusionField.identity(1))
        r = extreme_eigenvalues(a, tol=1e-8, dense_cutoff=10, maxiter=3)
        assert not r.converged

    def test_non_spd_rejected(self):
        with pytest.raises(fc.spectra.EigenSolveError):
            extreme_eigenvalues(_sparse(np.diag([1.0, -2.0])))

    def test_tol_validated(self):
        with pytest.raises(ValueError):
            extreme_eigenvalues(_sparse(np.eye(3)), tol=1e-2)


class TestGeneralizedMinEigenvalue:
    def test_equal_matrices(self):
        m = fc.generate_uniform(1, 8)
        a = fc.assemble_stiffness(m, fc.DiffusionField.identity(1))
        assert generalized_min_eigenvalue(a, a) == pytest.approx(1.0, rel=1e-12)

    def test_identity_b_reduces_to_lambda_min(self):
        m = fc.generate_uniform(1, 16)
        a = fc.assemble_stiffness(m, fc.DiffusionField.identity(1))
        b = _sparse(np.eye(a.order))
        assert generalized_min_eigenvalue(a, b) == pytest.approx(
            extreme_eigenvalues(a).lambda_min, rel=1e-12
        )

    def test_dirichlet_laplace_eigenvalue(self):
        m = fc.generate_uniform(1, 64)
        a = fc.assemble_stiffness(m, fc.DiffusionField.identity(1))
        b = fc.assemble_mass_weighted(m, DensityFunction(np.ones(64)))
        lam = generalized_min_eigenvalue(a, b)
        assert lam == pytest.approx(math.pi**2, rel=0.01)

    def test_iterative_matches_dense(self):
        m = fc.generate_uniform(1, 300)
        a = fc.assemble_stiffness(m, fc.DiffusionField.identity(1))
        b = fc.assemble_mass_weighted(m, DensityFunction(np.ones(300)))
        dense = generalized_min_eigenvalue(a, b)
        iterative = generalized_min_eigenvalue(a, b, dense_cutoff=10)
        assert iterative == pytest.approx(dense, rel=1e-7)


class TestConditionReport:
    def test_1d_uniform_n4(self):
        m = fc.generate_uniform(1, 4)
        res_a, res_sas = fc.condition_report(m, fc.DiffusionField.identity(1))
        expected = (2 + math.sqrt(2)) / (2 - math.sqrt(2))
        assert res_a.kappa == pytest.approx(expected, rel=1e-12)
        # constant diagonal: scaling is a constant multiple, kappa unchanged
        assert res_sas.kappa == pytest.approx(res_a.kappa, rel=1e-10)

    def test_power2_kappa_doubles_per_step(self):
        kappas = []
        for n in (15, 16):
            m = fc.generate_power2_1d(n)
            res_a, _ = fc.condition_report(m, fc.DiffusionField.identity(1))
            kappas.append(res_a.kappa)
        assert 1.8 <= kappas[1] / kappas[0] <= 2.2

    def test_scaled_lambda_max_within_dimensional_cap(self, rng):
        for dim in (1, 2, 3):
            mesh = random_mesh(rng, dim=dim)
            if mesh.n_interior == 0:
                continue
            field = random_spd_field(rng, dim)
            _, res_sas = fc.condition_report(mesh, field)
            assert 1.0 - 1e-12 <= res_sas.lambda_max <= dim + 1 + 1e-12

    def test_lambda_max_sandwich(self, rng):
        for _ in range(8):
            mesh = random_mesh(rng)
            if mesh.n_interior == 0:
                continue
            field = random_spd_field(rng, mesh.dim)
            a = fc.assemble_stiffness(mesh, field)
            res = extreme_eigenvalues(a)
            lo, hi = fc.bound_lambda_max(a, mesh.dim)
            assert lo <= res.lambda_max * (1 + 1e-13)
            assert res.lambda_max <= hi * (1 + 1e-13)
