"""Estimators for the covariance of sqrt(n) * (beta_hat - beta_n).

Two families are provided. The classical homoscedastic estimator
sigma2 * sigma_hat^-1 is the conventional software default and is only valid
under a correctly specified homoscedastic linear model; it is included as the
comparator. The sandwich estimator sigma_hat^-1 @ meat @ sigma_hat^-1 uses
the conservative meat matrix

    k_check = (1/n) sum x_i x_i' e_i^2.

Under iid sampling the sandwich is consistent. Under independent but
non-identically distributed observations no consistent estimator of the true
score covariance exists at all (the per-observation score means are not
identifiable), so only this conservative version is exposed: it converges to
an upper bound of the target in the PSD order, never below it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import DegenerateDof, NotPositiveDefinite, SingularDesign
from .ols import OlsFit

#: method tags carried by VarianceEstimate
CLASSICAL = "classical"
SANDWICH_HC0 = "sandwich_hc0"
SANDWICH_HC1 = "sandwich_hc1"


@dataclass(frozen=True)
class VarianceEstimate:
    """An estimate of the covariance of sqrt(n) * (beta_hat - beta_n).

    ``avar`` is on the sqrt(n) scale; ``se[j] = sqrt(avar[j, j] / n)`` is the
    plain standard error of beta_hat[j]. ``meat`` is the inner matrix:
    k_check for sandwich methods, sigma2 * sigma_hat for the classical one.
    """

    method: str
    avar: np.ndarray
    se: np.ndarray
    meat: np.ndarray
    n: int

    def is_sandwich(self) -> bool:
        return self.method in (SANDWICH_HC0, SANDWICH_HC1)


def k_check(fit: OlsFit) -> np.ndarray:
    """Conservative meat matrix (1/n) sum x_i x_i' e_i^2.

    Computed from the definition (a weighted sum of rank-one terms); equal to
    scores_hat.T @ scores_hat / n.
    """
    x = fit.data.x
    k = np.einsum("ij,ik,i->jk", x, x, fit.residuals**2) / fit.n
    return (k + k.T) / 2.0


def _sandwich(sigma_hat: np.ndarray, meat: np.ndarray) -> np.ndarray:
    try:
        inner = linalg.solve_spd(sigma_hat, meat)
        avar = linalg.solve_spd(sigma_hat, inner.T).T
    except NotPositiveDefinite as exc:
        raise SingularDesign("design second-moment matrix is not positive definite") from exc
    return (avar + avar.T) / 2.0


def sandwich_avar(fit: OlsFit, dof_correct: bool = False) -> VarianceEstimate:
    """Sandwich estimate sigma_hat^-1 @ k_check @ sigma_hat^-1.

    With ``dof_correct`` the whole matrix is inflated by n / (n - p) (the HC1
    convention); the plain 1/n average (HC0) is the default. Leverage-based
    corrections (HC2/HC3) are deliberately not offered.
    """
    if dof_correct and fit.n <= fit.p:
        raise DegenerateDof(f"HC1 needs n > p, got n={fit.n}, p={fit.p}")
    meat = k_check(fit)
    avar = _sandwich(fit.sigma_hat, meat)
    if dof_correct:
        avar = avar * (fit.n / (fit.n - fit.p))
    return VarianceEstimate(
        method=SANDWICH_HC1 if dof_correct else SANDWICH_HC0,
        avar=avar,
        se=np.sqrt(np.diag(avar) / fit.n),
        meat=meat,
        n=fit.n,
    )


def classical_avar(fit: OlsFit) -> VarianceEstimate:
    """Homoscedastic estimate sigma2 * sigma_hat^-1 with sigma2 = RSS/(n-p).

    This is what conventional regression output reports; it is wrong whenever
    the error variance depends on the covariates or the mean is nonlinear.
    """
    if fit.n <= fit.p:
        raise DegenerateDof(f"classical variance needs n > p, got n={fit.n}, p={fit.p}")
    sigma2 = float(fit.residuals @ fit.residuals) / (fit.n - fit.p)
    try:
        inv = linalg.solve_spd(fit.sigma_hat, np.eye(fit.p))
    except NotPositiveDefinite as exc:
        raise SingularDesign("design second-moment matrix is not positive definite") from exc
    avar = sigma2 * (inv + inv.T) / 2.0
    return VarianceEstimate(
        method=CLASSICAL,
        avar=avar,
        se=np.sqrt(np.diag(avar) / fit.n),
        meat=sigma2 * fit.sigma_hat,
        n=fit.n,
    )
