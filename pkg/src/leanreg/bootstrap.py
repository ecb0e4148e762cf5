"""Multiplier and m-of-n resampling bootstraps on estimated scores.

Both schemes resample the estimated score rows s_i = x_i * e_i rather than
the observations themselves, so no bootstrap replicate ever has to solve a
(possibly singular) resampled linear system. The multiplier statistic is

    t_star = n^{-1/2} sum_i w_i s_i,   E[w]=0, E[w^2]=1,

and the resampling statistic draws m score rows uniformly with replacement
with m^{-1/2} scaling. Conditional on the data, gaussian multiplier draws
are exactly normal with covariance k_check, which is what makes them the
default weight choice; rademacher weights are offered for heavier-tailed
experiments.

Replicate b uses the generator seeded by the pair (seed, b), so results are
bit-identical no matter how replicates are scheduled across threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import DimensionMismatch, ZeroVariance
from .ols import OlsFit
from .variance import VarianceEstimate, k_check

WEIGHT_DISTS = ("gaussian", "rademacher")
METHODS = ("multiplier", "resample_m_of_n")


def subseed(seed, *path) -> np.random.SeedSequence:
    """Seed sequence for a child stream, keyed by (seed, *path).

    ``seed`` may itself be a tuple from an outer derivation; paths flatten,
    so nested derivations stay collision-free and order-independent.
    """
    entropy = tuple(seed) if isinstance(seed, (tuple, list)) else (int(seed),)
    return np.random.SeedSequence(entropy + tuple(int(i) for i in path))


def gen_weights(dist: str, n: int, rng_state) -> np.ndarray:
    """Draw n iid multiplier weights; deterministic given the seed.

    ``rng_state`` may be an int seed, a SeedSequence, or a Generator.
    """
    if dist not in WEIGHT_DISTS:
        raise ValueError(f"unknown weight distribution {dist!r}; choose from {WEIGHT_DISTS}")
    if n < 1:
        raise ValueError("need n >= 1 weights")
    rng = np.random.default_rng(rng_state)
    if dist == "gaussian":
        return rng.standard_normal(n)
    return rng.integers(0, 2, size=n) * 2.0 - 1.0


def multiplier_draw(fit: OlsFit, weights) -> np.ndarray:
    """One multiplier statistic n^{-1/2} sum_i w_i s_i."""
    weights = np.asarray(weights, dtype=float).ravel()
    if weights.shape[0] != fit.n:
        raise DimensionMismatch(f"got {weights.shape[0]} weights for n={fit.n}")
    return fit.scores_hat.T @ weights / math.sqrt(fit.n)


def resample_draw(fit: OlsFit, m: int, rng_state) -> np.ndarray:
    """One m-of-n statistic m^{-1/2} sum of m score rows drawn with replacement."""
    if m < 1:
        raise ValueError("resample size m must be >= 1")
    rng = np.random.default_rng(rng_state)
    idx = rng.integers(0, fit.n, size=m)
    return fit.scores_hat[idx].sum(axis=0) / math.sqrt(m)


@dataclass(frozen=True)
class BootstrapDraws:
    """B bootstrap replicates of the score statistic.

    ``draws_t`` holds the raw statistics (rows t_star_b); ``draws_u`` holds
    sigma_hat^-1 @ t_star_b, the same draws moved to the coefficient scale,
    which is what confidence regions for the target are built from.
    """

    method: str
    b: int
    m: int | None
    dist: str
    draws_t: np.ndarray
    draws_u: np.ndarray
    seed: object


def run_bootstrap(
    fit: OlsFit,
    method: str = "multiplier",
    b: int = 1000,
    m: int | None = None,
    dist: str = "gaussian",
    seed=0,
    threads: int = 1,
) -> BootstrapDraws:
    """Generate B independent bootstrap replicates.

    Replicate i is computed from the generator seeded by (seed, i), so the
    output is identical for any ``threads`` value and any execution order.
    The resample size ``m`` defaults to n; smaller m weakens the normal
    approximation and must be opted into explicitly.
    """
    if method not in METHODS:
        raise ValueError(f"unknown bootstrap method {method!r}; choose from {METHODS}")
    if dist not in WEIGHT_DISTS:
        raise ValueError(f"unknown weight distribution {dist!r}; choose from {WEIGHT_DISTS}")
    if b < 1:
        raise ValueError("need at least one replicate")
    if method == "resample_m_of_n":
        m = fit.n if m is None else int(m)
        if m < 1:
            raise ValueError("resample size m must be >= 1")
    else:
        m = None

    draws_t = np.empty((b, fit.p))

    def fill(i: int) -> None:
        rng = np.random.default_rng(subseed(seed, i))
        if method == "multiplier":
            draws_t[i] = multiplier_draw(fit, gen_weights(dist, fit.n, rng))
        else:
            draws_t[i] = resample_draw(fit, m, rng)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, range(b)))
    else:
        for i in range(b):
            fill(i)

    draws_u = linalg.solve_spd(fit.sigma_hat, draws_t.T).T
    return BootstrapDraws(
        method=method, b=b, m=m, dist=dist, draws_t=draws_t, draws_u=draws_u, seed=seed
    )


def _order_stat_quantile(values: np.ndarray, alpha: float) -> float:
    """Empirical (1-alpha) quantile as the ceil((1-alpha)(B+1)) order statistic.

    The index is clamped to B, so alpha near zero returns the largest draw.
    This leans conservative relative to interpolation-based quantiles.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    b = values.shape[0]
    k = min(math.ceil((1.0 - alpha) * (b + 1)), b)
    return float(np.sort(values)[k - 1])


@dataclass(frozen=True)
class ConfidenceRegion:
    """A rectangle or ellipsoid confidence region for the target coefficients.

    Rectangles are products of per-coordinate intervals
    center[j] +/- half_widths[j]. Ellipsoids are
    {beta : n * (center - beta)' quad_form (center - beta) <= radius}.
    """

    shape: str
    level: float
    center: np.ndarray
    n: int
    half_widths: np.ndarray | None = None
    quad_form: np.ndarray | None = None
    radius: float | None = None

    def contains(self, beta) -> bool:
        beta = np.asarray(beta, dtype=float).ravel()
        if beta.shape != self.center.shape:
            raise DimensionMismatch(f"beta has shape {beta.shape}, expected {self.center.shape}")
        delta = self.center - beta
        if self.shape == "rectangle":
            return bool(np.all(np.abs(delta) <= self.half_widths))
        return bool(self.n * delta @ self.quad_form @ delta <= self.radius)


def region_rectangle(
    fit: OlsFit, draws: BootstrapDraws, var: VarianceEstimate, alpha: float
) -> ConfidenceRegion:
    """Simultaneous studentized rectangle from max-|t| bootstrap quantiles.

    The critical value is the (1-alpha) order-statistic quantile of
    max_j |u_star_b[j]| / sqrt(avar[j, j]) over replicates, and the interval
    half width for coordinate j is that critical value times se[j].
    """
    if not var.is_sandwich():
        raise ValueError("rectangle regions studentize with a sandwich variance estimate")
    d = np.sqrt(np.diag(var.avar))
    if np.any(d == 0.0):
        raise ZeroVariance("a coordinate has zero estimated variance")
    max_t = np.abs(draws.draws_u / d).max(axis=1)
    crit = _order_stat_quantile(max_t, alpha)
    if crit == 0.0:
        raise ZeroVariance("all bootstrap draws are zero; the region is degenerate")
    return ConfidenceRegion(
        shape="rectangle",
        level=1.0 - alpha,
        center=fit.beta_hat,
        n=fit.n,
        half_widths=crit * d / math.sqrt(fit.n),
    )


def region_ellipsoid(fit: OlsFit, draws: BootstrapDraws, alpha: float) -> ConfidenceRegion:
    """Ellipsoid region from bootstrap quantiles of t_star' k_check^-1 t_star.

    The quadratic form on coefficients is sigma_hat @ k_check^-1 @ sigma_hat,
    so membership of beta is equivalent to the score statistic
    sqrt(n) sigma_hat (beta_hat - beta) falling inside the corresponding
    k_check ellipsoid.
    """
    kmat = k_check(fit)
    solved = linalg.solve_spd(kmat, draws.draws_t.T)  # raises if k_check is singular
    qvals = np.einsum("bi,ib->b", draws.draws_t, solved)
    radius = _order_stat_quantile(qvals, alpha)
    inner = linalg.solve_spd(kmat, fit.sigma_hat)
    quad_form = fit.sigma_hat @ inner
    return ConfidenceRegion(
        shape="ellipsoid",
        level=1.0 - alpha,
        center=fit.beta_hat,
        n=fit.n,
        quad_form=(quad_form + quad_form.T) / 2.0,
        radius=radius,
    )
