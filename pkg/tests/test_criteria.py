"""Weight sequences and the criterion functions that order functions outward."""

import math

import numpy as np
import pytest

from fdepth.core import Grid, GridFunction
from fdepth.covkernel import EigenSystem
from fdepth.criteria import (
    Criterion,
    DivergentWeightsWarning,
    WeightSequence,
    evaluate_criterion,
    mahalanobis_norm_sq,
    modified_norm_sq,
    rkhs_norm_sq,
)
from fdepth.rng import substream
from fdepth.simgen import brownian_bridge_system
from helpers import grid_fn


class TestWeightSequence:
    def test_value_formulas(self):
        p = np.arange(1, 7, dtype=float)
        np.testing.assert_array_equal(WeightSequence.constant_one().values(6), 1.0)
        np.testing.assert_allclose(WeightSequence.inverse_p().values(6), 1.0 / p)
        np.testing.assert_allclose(
            WeightSequence.inverse_sqrt_log().values(6),
            1.0 / (np.sqrt(p) * np.log(p + 1.0)),
        )
        np.testing.assert_allclose(
            WeightSequence.power(1.0).values(6), p**-1.5
        )

    def test_square_summable_flags(self):
        assert not WeightSequence.constant_one().square_summable
        assert WeightSequence.inverse_p().square_summable
        assert WeightSequence.inverse_sqrt_log().square_summable
        assert WeightSequence.power(0.25).square_summable

    def test_power_requires_positive_s(self):
        with pytest.raises(ValueError):
            WeightSequence.power(0.0)
        with pytest.raises(ValueError):
            WeightSequence.power(-1.0)

    def test_non_power_kinds_take_no_parameter(self):
        with pytest.raises(ValueError):
            WeightSequence("inverse-p", 0.5)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            WeightSequence("geometric")

    def test_diagnostic_sequence(self):
        d = WeightSequence.power(1.0).diagnostic()
        assert d.kind == "power" and d.s == 0.5
        d2 = WeightSequence.inverse_p().diagnostic()
        assert d2.kind == "power" and d2.s == 0.25
        with pytest.raises(ValueError):
            WeightSequence.constant_one().diagnostic()

    def test_names(self):
        assert WeightSequence.inverse_p().name == "inverse-p"
        assert WeightSequence.power(0.5).name == "power(0.5)"


def _diag_system(eigenvalues, grid=None):
    lam = np.asarray(eigenvalues, dtype=float)
    grid = grid if grid is not None else Grid(0, 1, 11)
    phi = np.zeros((lam.size, grid.m))
    phi[:, 0] = 1.0
    return EigenSystem(grid, lam, phi, delta=0.0, raw_count=lam.size)


class TestModifiedNorm:
    def test_zero_coefficients(self):
        system = _diag_system([1.0, 0.5])
        assert modified_norm_sq(np.zeros(2), system, WeightSequence.inverse_p()) == 0.0

    def test_single_term(self):
        system = _diag_system([2.0, 0.5])
        c = np.array([math.sqrt(2.0), 0.0])
        val = modified_norm_sq(c, system, WeightSequence.inverse_p())
        assert val == pytest.approx(1.0, rel=1e-12)

    def test_matrix_rows_vectorized(self):
        system = _diag_system([1.0, 0.25])
        rows = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        w = WeightSequence.inverse_p()
        vals = modified_norm_sq(rows, system, w)
        assert vals.shape == (3,)
        assert vals[0] == pytest.approx(1.0)
        assert vals[1] == pytest.approx(1.0)  # (1/0.25) * (1/2)^2
        assert vals[2] == pytest.approx(2.0)

    def test_bridge_proportional_to_l2(self):
        # with eigenvalues 1/(p pi)^2 and weights 1/p the weighted norm
        # collapses to pi^2 times the squared coefficient length
        system = brownian_bridge_system(30)
        rng = substream(42, 0)
        w = WeightSequence.inverse_p()
        for _ in range(100):
            c = rng.standard_normal(30) * np.sqrt(system.eigenvalues)
            ratio = modified_norm_sq(c, system, w) / (c @ c)
            assert ratio == pytest.approx(np.pi**2, rel=1e-3)

    def test_expected_norm_is_weight_sum(self):
        # E sum_p (c_p^2 / lambda_p) a_p^2 = sum_p a_p^2 when Var c_p = lambda_p
        C = 50
        system = _diag_system(1.0 / (np.arange(1, C + 1) * np.pi) ** 2)
        scale = np.sqrt(system.eigenvalues / 2.0)
        rows = np.empty((5000, C))
        for i in range(5000):
            u = substream(77, i).uniform(-0.5, 0.5, size=C)
            rows[i] = -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))
        mean_norm = modified_norm_sq(rows, system, WeightSequence.inverse_p()).mean()
        target = np.sum(1.0 / np.arange(1, C + 1) ** 2)
        assert mean_norm == pytest.approx(target, rel=0.05)

    def test_rejects_wrong_length(self):
        system = _diag_system([1.0, 0.5])
        with pytest.raises(ValueError):
            modified_norm_sq(np.zeros(3), system, WeightSequence.inverse_p())

    def test_rejects_zero_eigenvalue(self):
        system = _diag_system([1.0, 0.0])
        with pytest.raises(ValueError):
            modified_norm_sq(np.ones(2), system, WeightSequence.inverse_p())


class TestRkhsNorm:
    def test_zero(self):
        assert rkhs_norm_sq(np.zeros(2), _diag_system([1.0, 0.5])) == 0.0

    def test_unit_terms(self):
        system = _diag_system([0.7, 0.02])
        c = np.sqrt(system.eigenvalues)
        assert rkhs_norm_sq(c, system) == pytest.approx(2.0, rel=1e-12)

    def test_derivative_energy_identity(self):
        # in the bridge basis the kernel norm equals the Dirichlet energy
        from fdepth.core import derivative, lp_norm

        grid = Grid(0, 1, 2001)
        system = brownian_bridge_system(50, grid)
        f = grid_fn(grid, lambda t: math.sqrt(2.0) * np.sin(3.0 * np.pi * t))
        c = np.zeros(50)
        c[2] = 1.0
        val = rkhs_norm_sq(c, system)
        energy = lp_norm(derivative(f, 1), 2) ** 2
        assert val == pytest.approx(9.0 * np.pi**2, rel=1e-12)
        assert val == pytest.approx(energy, rel=0.02)


class TestMahalanobis:
    def test_zero_at_mean(self):
        assert mahalanobis_norm_sq([1.0, 2.0], [1.0, 2.0], np.eye(2)) == 0.0

    def test_identity_covariance(self):
        assert mahalanobis_norm_sq([3.0, 4.0], [0.0, 0.0], np.eye(2)) == pytest.approx(25.0)

    def test_correlated_covariance_by_hand(self):
        cov = np.array([[1.0, 1.0 / 3.0], [1.0 / 3.0, 0.25]])
        val = mahalanobis_norm_sq([1.0, 0.0], [0.0, 0.0], cov)
        assert val == pytest.approx(9.0 / 5.0, rel=1e-10)

    def test_rejects_singular(self):
        with pytest.raises(ValueError):
            mahalanobis_norm_sq([1.0, 0.0], [0.0, 0.0], np.ones((2, 2)))

    def test_rejects_ill_conditioned(self):
        cov = np.diag([1.0, 1e-14])
        with pytest.raises(ValueError):
            mahalanobis_norm_sq([1.0, 0.0], [0.0, 0.0], cov)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mahalanobis_norm_sq([1.0, 0.0, 0.0], [0.0, 0.0], np.eye(2))


class TestCriterionConstruction:
    def test_tags(self):
        assert Criterion.lp(2).tag == "lp(2)"
        assert Criterion.derivative_lp(1, 2).tag == "derivative-lp(1,2)"
        assert Criterion.modified_rkhs().tag == "modified-rkhs(inverse-p)"
        assert Criterion.rkhs().tag == "rkhs"
        assert Criterion.warp_l2().tag == "warp-l2"
        assert Criterion.warp_fisher_rao().tag == "warp-fisher-rao"
        assert Criterion.mahalanobis(np.eye(2)).tag == "mahalanobis"

    def test_default_weights_inverse_p(self):
        assert Criterion.modified_rkhs().weights.kind == "inverse-p"

    def test_constant_one_warns(self):
        with pytest.warns(DivergentWeightsWarning):
            Criterion.modified_rkhs(weights=WeightSequence.constant_one())

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            Criterion.lp(0.5)
        with pytest.raises(ValueError):
            Criterion.derivative_lp(3, 2)
        with pytest.raises(ValueError):
            Criterion("not-a-kind")

    def test_with_context(self):
        system = _diag_system([1.0])
        crit = Criterion.modified_rkhs().with_context(system=system)
        assert crit.system is system


class TestEvaluateCriterion:
    def setup_method(self):
        self.grid = Grid(0, 1, 201)
        self.f_c = GridFunction(self.grid, np.zeros(201))

    def test_zero_at_center_for_all_norm_kinds(self):
        f = grid_fn(self.grid, lambda t: np.sin(t) + 0.3)
        system = brownian_bridge_system(10, self.grid)
        criteria = [
            Criterion.lp(2),
            Criterion.derivative_lp(1, 2),
            Criterion.modified_rkhs(system=system),
            Criterion.rkhs(system=system),
            Criterion.mahalanobis(np.eye(201), mean=f.values),
        ]
        for crit in criteria:
            assert evaluate_criterion(crit, f, f) == pytest.approx(0.0, abs=1e-9)

    def test_unit_fourier_mode_lp(self):
        f = grid_fn(self.grid, lambda t: math.sqrt(2.0) * np.sin(np.pi * t))
        assert evaluate_criterion(Criterion.lp(2), f, self.f_c) == pytest.approx(
            1.0, abs=1e-4
        )

    def test_derivative_kills_constants(self):
        f = GridFunction(self.grid, np.full(201, 5.0))
        val = evaluate_criterion(Criterion.derivative_lp(1, 2), f, self.f_c)
        assert val == pytest.approx(0.0, abs=1e-10)

    def test_modified_rkhs_needs_system(self):
        f = grid_fn(self.grid, lambda t: t)
        with pytest.raises(ValueError):
            evaluate_criterion(Criterion.modified_rkhs(), f, self.f_c)

    def test_mahalanobis_vector_input(self):
        crit = Criterion.mahalanobis(np.eye(2), mean=np.zeros(2))
        assert evaluate_criterion(crit, np.array([3.0, 4.0]), None) == pytest.approx(5.0)

    def test_mahalanobis_needs_center(self):
        crit = Criterion.mahalanobis(np.eye(2))
        with pytest.raises(ValueError):
            evaluate_criterion(crit, np.array([1.0, 0.0]), None)

    def test_scale_equivariance(self):
        # zeta(a f + h, a f_c + h) = |a| zeta(f, f_c) for every norm kind
        rng = np.random.default_rng(3)
        system = brownian_bridge_system(10, self.grid)
        f = GridFunction(self.grid, rng.standard_normal(201))
        f_c = GridFunction(self.grid, rng.standard_normal(201))
        h = grid_fn(self.grid, lambda t: np.cos(3 * t) - 0.4)
        criteria = [
            Criterion.lp(2),
            Criterion.lp(1),
            Criterion.derivative_lp(1, 2),
            Criterion.derivative_lp(2, 2),
            Criterion.modified_rkhs(system=system),
            Criterion.rkhs(system=system),
        ]
        for a in (-2.0, 0.5, 3.0):
            for crit in criteria:
                base = evaluate_criterion(crit, f, f_c)
                scaled = evaluate_criterion(crit, a * f + h, a * f_c + h)
                assert scaled == pytest.approx(abs(a) * base, rel=1e-10)

    def test_mahalanobis_scale_equivariance(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal(2)
        mu = rng.standard_normal(2)
        cov = np.array([[1.0, 0.3], [0.3, 0.5]])
        crit = Criterion.mahalanobis(cov)
        h = np.array([0.7, -1.1])
        for a in (-2.0, 0.5, 3.0):
            base = evaluate_criterion(crit.with_context(cov=a * a * cov), a * x + h, a * mu + h)
            assert base == pytest.approx(
                evaluate_criterion(crit, x, mu), rel=1e-10
            )
