import numpy as np
import pytest

from leanreg import (
    Dataset,
    DegenerateDof,
    Dgp,
    classical_avar,
    fit_ols,
    k_check,
    sample,
    sandwich_avar,
)


@pytest.fixture
def tiny_fit():
    return fit_ols(Dataset(x=[[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]], y=[0.0, 1.0, 4.0]))


def perfect_fit():
    x = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 3.0]])
    return fit_ols(Dataset(x=x, y=x @ np.array([1.0, 2.0])))


class TestKCheck:
    def test_zero_for_perfect_fit(self):
        np.testing.assert_allclose(k_check(perfect_fit()), 0.0, atol=1e-20)

    def test_rank_one_sum_oracle(self, tiny_fit):
        # oracle: hand sum of the three rank-one terms x_i x_i' e_i^2
        e2 = np.array([1.0 / 9.0, 4.0 / 9.0, 1.0 / 9.0])
        expected = sum(
            np.outer(tiny_fit.data.x[i], tiny_fit.data.x[i]) * e2[i] for i in range(3)
        ) / 3.0
        np.testing.assert_allclose(
            expected, [[2.0 / 9.0, 2.0 / 9.0], [2.0 / 9.0, 8.0 / 27.0]], atol=1e-15
        )
        np.testing.assert_allclose(k_check(tiny_fit), expected, atol=1e-14)

    def test_single_observation(self):
        fit = fit_ols(Dataset(x=[[2.0]], y=[3.0]))
        np.testing.assert_allclose(k_check(fit), 0.0, atol=1e-25)

    def test_matches_score_crossproduct(self):
        # dual route: k_check must equal scores_hat' scores_hat / n to 1e-12 relative
        dgp = Dgp("heteroscedastic_iid")
        for seed in range(5):
            fit = fit_ols(sample(dgp, 150, np.random.default_rng(seed)))
            via_scores = fit.scores_hat.T @ fit.scores_hat / fit.n
            np.testing.assert_allclose(k_check(fit), via_scores, rtol=1e-12)


class TestSandwichAvar:
    def test_zero_for_perfect_fit(self):
        est = sandwich_avar(perfect_fit())
        np.testing.assert_allclose(est.avar, 0.0, atol=1e-18)
        np.testing.assert_allclose(est.se, 0.0, atol=1e-12)

    def test_hc0_matrix_algebra_oracle(self, tiny_fit):
        # oracle: plain numpy inverse, independent of the cholesky solve path
        inv = np.linalg.inv(tiny_fit.sigma_hat)
        expected = inv @ k_check(tiny_fit) @ inv
        est = sandwich_avar(tiny_fit)
        np.testing.assert_allclose(est.avar, expected, atol=1e-12)
        np.testing.assert_allclose(est.se, np.sqrt(np.diag(expected) / 3.0), atol=1e-12)
        assert est.method == "sandwich_hc0"
        assert est.is_sandwich()

    def test_hc1_is_hc0_times_dof_ratio(self, tiny_fit):
        hc0 = sandwich_avar(tiny_fit)
        hc1 = sandwich_avar(tiny_fit, dof_correct=True)
        np.testing.assert_allclose(hc1.avar, hc0.avar * 3.0, rtol=1e-14)
        assert hc1.method == "sandwich_hc1"

    def test_hc1_degenerate_dof(self):
        fit = fit_ols(Dataset(x=[[1.0, 0.0], [0.0, 1.0]], y=[1.0, 2.0]))
        with pytest.raises(DegenerateDof):
            sandwich_avar(fit, dof_correct=True)

    def test_avar_symmetric_psd(self, tiny_fit):
        avar = sandwich_avar(tiny_fit).avar
        np.testing.assert_array_equal(avar, avar.T)
        assert np.linalg.eigvalsh(avar)[0] >= -1e-12

    def test_invariant_under_reordering(self):
        dgp = Dgp("quadratic_mean_iid")
        data = sample(dgp, 80, np.random.default_rng(10))
        perm = np.random.default_rng(11).permutation(80)
        est = sandwich_avar(fit_ols(data))
        est_perm = sandwich_avar(fit_ols(Dataset(x=data.x[perm], y=data.y[perm])))
        np.testing.assert_allclose(est.avar, est_perm.avar, rtol=1e-10)


class TestClassicalAvar:
    def test_zero_for_perfect_fit(self):
        np.testing.assert_allclose(classical_avar(perfect_fit()).avar, 0.0, atol=1e-18)

    def test_hand_arithmetic_oracle(self, tiny_fit):
        # sigma2 = (1/9 + 4/9 + 1/9) / (3 - 2) = 2/3
        sigma2 = 2.0 / 3.0
        expected = sigma2 * np.linalg.inv(tiny_fit.sigma_hat)
        est = classical_avar(tiny_fit)
        np.testing.assert_allclose(est.avar, expected, atol=1e-12)
        assert est.method == "classical"
        assert not est.is_sandwich()

    def test_degenerate_dof(self):
        fit = fit_ols(Dataset(x=[[1.0, 0.0], [0.0, 1.0]], y=[1.0, 2.0]))
        with pytest.raises(DegenerateDof):
            classical_avar(fit)

    def test_agrees_with_sandwich_under_homoscedasticity(self):
        # Monte Carlo oracle: correctly specified homoscedastic model at n=5000
        dgp = Dgp("linear_homoscedastic")
        fit = fit_ols(sample(dgp, 5000, np.random.default_rng(123)))
        classical = classical_avar(fit).avar
        sandwich = sandwich_avar(fit).avar
        np.testing.assert_allclose(sandwich, classical, rtol=0.10)
