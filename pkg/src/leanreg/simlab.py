"""Simulation laboratory: data-generating processes with exact population
targets, and a Monte Carlo engine for coverage, type-I error and rate studies.

Every shipped DGP has computable population quantities: the target
coefficients beta_n, the moment matrices sigma_n and gamma_n, the true score
covariance k_n, its estimable upper bound k_n_star, and the corresponding
coefficient-scale variances av_n and av_n_star. Random-covariate kinds keep
all covariates supported on [0, 1], so every moment needed anywhere (sixth
moments included) is finite by construction; moments without a convenient
closed form are computed by adaptive quadrature to absolute tolerance 1e-10.

Canonical parameterizations (fixed so the acceptance numbers are stable):

- linear_homoscedastic: x = (1, u_1, ..., u_{p-1}) iid uniform,
  y = x' beta + noise_scale * eps. The one correctly specified kind.
- quadratic_mean_iid: x = (1, u), y = u^2 + noise_scale * eps
  (noise_scale 0.1); the mean is curved so the linear target is a genuine
  projection, beta_n = (-1/6, 1).
- heteroscedastic_iid: x = (1, u), y = 1 + u + noise_scale
  * (0.2 + |u - 1/2|) * eps; linear mean, covariate-dependent noise.
- fixed_x_heteroscedastic: design u_i = i/n, mean 1 + u_i (linear),
  sd_i = noise_scale * (0.1 + u_i).
- fixed_x_nonidentical_mean: same design and sd, mean u_i^2; the
  per-observation score means are nonzero (averaging to zero) and
  k_n is strictly below k_n_star.

Replication r of any Monte Carlo run draws from the generator seeded by
(seed, r), so reports are identical at any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats

from . import linalg
from .bootstrap import WEIGHT_DISTS, region_ellipsoid, region_rectangle, run_bootstrap, subseed
from .exceptions import IntegrationFailure, SingularDesign
from .inference import max_t_test
from .ols import Dataset, fit_ols
from .variance import classical_avar, sandwich_avar

DGP_KINDS = (
    "linear_homoscedastic",
    "quadratic_mean_iid",
    "heteroscedastic_iid",
    "fixed_x_heteroscedastic",
    "fixed_x_nonidentical_mean",
)

COVERAGE_METHODS = (
    "classical_normal",
    "sandwich_normal",
    "bootstrap_rectangle",
    "bootstrap_ellipsoid",
    "max_t_bootstrap",
)

_DEFAULT_NOISE = {
    "linear_homoscedastic": 1.0,
    "quadratic_mean_iid": 0.1,
    "heteroscedastic_iid": 1.0,
    "fixed_x_heteroscedastic": 1.0,
    "fixed_x_nonidentical_mean": 1.0,
}


@dataclass(frozen=True)
class Dgp:
    """A simulation scenario. Only linear_homoscedastic supports p > 2."""

    kind: str
    p: int = 2
    noise_scale: float | None = None
    beta: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in DGP_KINDS:
            raise ValueError(f"unknown DGP kind {self.kind!r}; choose from {DGP_KINDS}")
        if self.p < 2:
            raise ValueError("DGPs need p >= 2 (ones column plus at least one covariate)")
        if self.p > 2 and self.kind != "linear_homoscedastic":
            raise ValueError(f"{self.kind} is a canonical p=2 scenario")
        if self.noise_scale is None:
            object.__setattr__(self, "noise_scale", _DEFAULT_NOISE[self.kind])
        if self.noise_scale <= 0.0:
            raise ValueError("noise_scale must be positive")
        if self.kind == "linear_homoscedastic":
            beta = tuple(float(c) for c in (self.beta or np.ones(self.p)))
            if len(beta) != self.p:
                raise ValueError(f"beta must have length p={self.p}")
            object.__setattr__(self, "beta", beta)
        elif self.beta is not None:
            raise ValueError(f"{self.kind} has a fixed canonical mean; beta is not a parameter")

    @property
    def is_fixed_design(self) -> bool:
        return self.kind.startswith("fixed_x")


@dataclass(frozen=True)
class PopulationTargets:
    """Exact population quantities for one (dgp, n) scenario."""

    beta_n: np.ndarray
    sigma_n: np.ndarray
    gamma_n: np.ndarray
    k_n: np.ndarray
    k_n_star: np.ndarray
    av_n: np.ndarray
    av_n_star: np.ndarray
    score_means: np.ndarray


def _quad01(f, points=None) -> float:
    """Integrate f over [0, 1] to absolute tolerance 1e-10 or raise."""
    value, abserr = integrate.quad(
        f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200, points=points
    )
    if abserr > 1e-10:
        raise IntegrationFailure(f"quadrature error estimate {abserr:.2e} exceeds 1e-10")
    return value


def _mean_sd_profiles(dgp: Dgp):
    """Conditional mean and sd of y given the scalar covariate u, p=2 kinds."""
    s = dgp.noise_scale
    if dgp.kind == "quadratic_mean_iid":
        return (lambda u: u**2), (lambda u: s + 0.0 * u), None
    if dgp.kind == "heteroscedastic_iid":
        return (lambda u: 1.0 + u), (lambda u: s * (0.2 + np.abs(u - 0.5))), [0.5]
    raise AssertionError(dgp.kind)


def _fixed_design(dgp: Dgp, n: int):
    u = np.arange(1, n + 1) / n
    x = np.column_stack([np.ones(n), u])
    mu = 1.0 + u if dgp.kind == "fixed_x_heteroscedastic" else u**2
    sd = dgp.noise_scale * (0.1 + u)
    return x, mu, sd


def _sandwich_pop(sigma: np.ndarray, meat: np.ndarray) -> np.ndarray:
    inner = linalg.solve_spd(sigma, meat)
    av = linalg.solve_spd(sigma, inner.T).T
    return (av + av.T) / 2.0


def population_targets(dgp: Dgp, n: int) -> PopulationTargets:
    """Exact moments, targets and score covariances for the scenario.

    Closed forms are used where the integrands are polynomial in u; the
    heteroscedastic noise profile has a kink at u = 1/2 and is integrated by
    adaptive quadrature split at the kink. Fixed designs are finite sums.
    """
    if dgp.is_fixed_design:
        x, mu, sd = _fixed_design(dgp, n)
        sigma = x.T @ x / n
        sigma = (sigma + sigma.T) / 2.0
        gamma = x.T @ mu / n
        beta = linalg.solve_spd(sigma, gamma)
        resid = mu - x @ beta
        k_n = np.einsum("ij,ik,i->jk", x, x, sd**2) / n
        k_star = k_n + np.einsum("ij,ik,i->jk", x, x, resid**2) / n
        k_n = (k_n + k_n.T) / 2.0
        k_star = (k_star + k_star.T) / 2.0
        score_means = x * resid[:, None]
    elif dgp.kind == "linear_homoscedastic":
        p = dgp.p
        # E[u_j] = 1/2, E[u_j^2] = 1/3, E[u_j u_k] = 1/4 for j != k
        sigma = np.full((p, p), 0.25)
        sigma[0, :] = sigma[:, 0] = 0.5
        sigma[0, 0] = 1.0
        np.fill_diagonal(sigma[1:, 1:], 1.0 / 3.0)
        beta = np.asarray(dgp.beta, dtype=float)
        gamma = sigma @ beta
        k_n = dgp.noise_scale**2 * sigma
        k_star = k_n.copy()
        score_means = np.zeros((n, p))
    else:
        mu, sd, kink = _mean_sd_profiles(dgp)
        sigma = np.array([[1.0, 0.5], [0.5, 1.0 / 3.0]])
        gamma = np.array([_quad01(mu), _quad01(lambda u: u * mu(u))])
        beta = linalg.solve_spd(sigma, gamma)

        def second_moment(u):
            return (mu(u) - beta[0] - beta[1] * u) ** 2 + sd(u) ** 2

        k_n = np.empty((2, 2))
        k_n[0, 0] = _quad01(second_moment, kink)
        k_n[0, 1] = k_n[1, 0] = _quad01(lambda u: u * second_moment(u), kink)
        k_n[1, 1] = _quad01(lambda u: u**2 * second_moment(u), kink)
        k_star = k_n.copy()
        score_means = np.zeros((n, 2))

    return PopulationTargets(
        beta_n=beta,
        sigma_n=sigma,
        gamma_n=gamma,
        k_n=k_n,
        k_n_star=k_star,
        av_n=_sandwich_pop(sigma, k_n),
        av_n_star=_sandwich_pop(sigma, k_star),
        score_means=score_means,
    )


def population_score_means(dgp: Dgp, n: int, beta) -> np.ndarray:
    """Per-observation score expectations E[x_i (y_i - x_i' beta)] at any beta.

    At the target these are the rows returned in PopulationTargets (zero for
    iid kinds); elsewhere they pick up the projection misfit, which is what a
    negative-control check of the linear representation needs.
    """
    beta = np.asarray(beta, dtype=float).ravel()
    if dgp.is_fixed_design:
        x, mu, _ = _fixed_design(dgp, n)
        return x * (mu - x @ beta)[:, None]
    pop = population_targets(dgp, n)
    row = pop.gamma_n - pop.sigma_n @ beta
    return np.tile(row, (n, 1))


def sample(dgp: Dgp, n: int, rng_state) -> Dataset:
    """Draw one dataset of size n; deterministic given the seed.

    Fixed-design kinds reuse the deterministic design exactly and redraw only
    the responses. Covariates are drawn before noise, so the covariate stream
    of a random-x kind is reproducible on its own.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    rng = np.random.default_rng(rng_state)
    if dgp.is_fixed_design:
        x, mu, sd = _fixed_design(dgp, n)
        y = mu + sd * rng.standard_normal(n)
        return Dataset(x=x, y=y)
    if dgp.kind == "linear_homoscedastic":
        u = rng.random((n, dgp.p - 1))
        x = np.column_stack([np.ones(n), u])
        y = x @ np.asarray(dgp.beta) + dgp.noise_scale * rng.standard_normal(n)
        return Dataset(x=x, y=y)
    u = rng.random(n)
    x = np.column_stack([np.ones(n), u])
    mu, sd, _ = _mean_sd_profiles(dgp)
    y = mu(u) + sd(u) * rng.standard_normal(n)
    return Dataset(x=x, y=y)


@dataclass(frozen=True)
class CoverageReport:
    """Aggregated Monte Carlo results for one scenario.

    ``coverage`` maps a method to per-coordinate coverage proportions for the
    per-coordinate interval methods, or to a single joint proportion for the
    region methods. Monte Carlo standard errors are sqrt(c (1-c) / R).
    """

    scenario: str
    n: int | None
    replications: int
    alpha: float | None
    seed: int
    methods: tuple[str, ...]
    coverage: dict = field(default_factory=dict)
    coverage_se: dict = field(default_factory=dict)
    mean_width: dict = field(default_factory=dict)
    rejection_rate: dict = field(default_factory=dict)
    rejection_se: dict = field(default_factory=dict)
    excluded: int = 0
    consistency: dict | None = None


def _mc_se(prop: np.ndarray, r: int) -> np.ndarray:
    return np.sqrt(prop * (1.0 - prop) / r)


def run_coverage(
    dgp: Dgp,
    n: int,
    replications: int,
    methods,
    alpha: float,
    seed: int,
    b: int = 1000,
    weight_dist: str = "gaussian",
    threads: int = 1,
) -> CoverageReport:
    """Measure empirical coverage (and null rejection rates) of the target.

    Per replication r: draw data with the (seed, r) substream, fit, build the
    requested intervals/regions, and record whether beta_n is covered. The
    max_t_bootstrap method instead tests the true null beta = beta_n and
    records rejections. Replications whose design is singular are excluded
    and counted. Output is independent of the thread count.
    """
    methods = tuple(methods)
    for m in methods:
        if m not in COVERAGE_METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {COVERAGE_METHODS}")
    if weight_dist not in WEIGHT_DISTS:
        raise ValueError(f"unknown weight distribution {weight_dist!r}")
    if replications < 1:
        raise ValueError("need at least one replication")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")

    pop = population_targets(dgp, n)
    beta_n = pop.beta_n
    z = float(stats.norm.ppf(1.0 - alpha / 2.0))
    needs_boot = any(m.startswith("bootstrap") or m == "max_t_bootstrap" for m in methods)
    needs_sandwich = needs_boot or "sandwich_normal" in methods

    def one(r: int):
        rng = np.random.default_rng(subseed(seed, r))
        data = sample(dgp, n, rng)
        try:
            fit = fit_ols(data)
        except SingularDesign:
            return None
        var_s = sandwich_avar(fit) if needs_sandwich else None
        draws = (
            run_bootstrap(fit, "multiplier", b=b, dist=weight_dist, seed=(seed, r, 1))
            if needs_boot
            else None
        )
        rec = {}
        for m in methods:
            if m in ("classical_normal", "sandwich_normal"):
                var = classical_avar(fit) if m == "classical_normal" else var_s
                covered = np.abs(fit.beta_hat - beta_n) <= z * var.se
                rec[m] = (covered.astype(float), 2.0 * z * var.se)
            elif m == "bootstrap_rectangle":
                reg = region_rectangle(fit, draws, var_s, alpha)
                rec[m] = (
                    np.array([float(reg.contains(beta_n))]),
                    2.0 * reg.half_widths,
                )
            elif m == "bootstrap_ellipsoid":
                reg = region_ellipsoid(fit, draws, alpha)
                rec[m] = (np.array([float(reg.contains(beta_n))]), None)
            else:  # max_t_bootstrap
                res = max_t_test(fit, var_s, beta_n, reference="bootstrap", draws=draws)
                rec[m] = (None, None, float(res.p_value <= alpha))
        return rec

    records: list = [None] * replications
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for r, rec in zip(range(replications), pool.map(one, range(replications))):
                records[r] = rec
    else:
        for r in range(replications):
            records[r] = one(r)

    kept = [rec for rec in records if rec is not None]
    excluded = replications - len(kept)
    if not kept:
        raise SingularDesign("every replication produced a singular design")
    r_eff = len(kept)

    coverage, coverage_se, mean_width, rejection, rejection_se = {}, {}, {}, {}, {}
    for m in methods:
        if m == "max_t_bootstrap":
            rate = float(np.mean([rec[m][2] for rec in kept]))
            rejection[m] = rate
            rejection_se[m] = float(_mc_se(np.array(rate), r_eff))
            continue
        cov = np.mean(np.stack([rec[m][0] for rec in kept]), axis=0)
        coverage[m] = [float(c) for c in cov]
        coverage_se[m] = [float(s) for s in _mc_se(cov, r_eff)]
        widths = [rec[m][1] for rec in kept]
        if widths[0] is not None:
            mean_width[m] = [float(w) for w in np.mean(np.stack(widths), axis=0)]

    return CoverageReport(
        scenario=dgp.kind,
        n=n,
        replications=replications,
        alpha=alpha,
        seed=seed,
        methods=methods,
        coverage=coverage,
        coverage_se=coverage_se,
        mean_width=mean_width,
        rejection_rate=rejection,
        rejection_se=rejection_se,
        excluded=excluded,
    )


def run_consistency(dgp: Dgp, n_grid, replications: int, seed: int) -> CoverageReport:
    """Median estimation error per sample size, plus the fitted log-log slope.

    The replication substream is keyed by (seed, grid-index, r) so adding a
    grid point never perturbs the others.
    """
    n_grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])) or len(n_grid) < 1:
        raise ValueError("n_grid must be strictly increasing and non-empty")
    medians = []
    for i, n in enumerate(n_grid):
        beta_n = population_targets(dgp, n).beta_n
        errs = np.empty(replications)
        for r in range(replications):
            data = sample(dgp, n, np.random.default_rng(subseed(seed, i, r)))
            errs[r] = np.linalg.norm(fit_ols(data).beta_hat - beta_n)
        medians.append(float(np.median(errs)))
    if len(n_grid) >= 2 and all(m > 0 for m in medians):
        slope = float(np.polyfit(np.log(n_grid), np.log(medians), 1)[0])
    else:
        slope = float("nan")
    return CoverageReport(
        scenario=dgp.kind,
        n=None,
        replications=replications,
        alpha=None,
        seed=seed,
        methods=(),
        consistency={"n_grid": n_grid, "median_error": medians, "loglog_slope": slope},
    )
