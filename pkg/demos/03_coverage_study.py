"""A small Monte Carlo coverage study, reproducing the headline comparison.

Under covariate-dependent noise the classical intervals under-cover the
slope while the sandwich intervals stay near nominal; under non-identically
distributed fixed-design responses the bootstrap regions are conservative
(coverage at or above nominal). Replication counts here are kept small so
the demo runs in seconds; the acceptance suite runs the full-size versions.
"""

from leanreg import Dgp, run_coverage

R = 400

print("heteroscedastic iid data, n = 500, 95% per-coordinate intervals")
rep = run_coverage(
    Dgp("heteroscedastic_iid"),
    n=500,
    replications=R,
    methods=("classical_normal", "sandwich_normal"),
    alpha=0.05,
    seed=11,
)
for method in rep.methods:
    cov = ", ".join(f"{c:.3f}" for c in rep.coverage[method])
    se = rep.coverage_se[method][1]
    print(f"  {method:18s} coverage per coordinate: {cov}   (MC se ~ {se:.3f})")
print()

print("fixed design, non-identical means, n = 500, 95% joint regions")
rep2 = run_coverage(
    Dgp("fixed_x_nonidentical_mean"),
    n=500,
    replications=R,
    methods=("bootstrap_rectangle", "bootstrap_ellipsoid", "max_t_bootstrap"),
    alpha=0.05,
    seed=12,
    b=600,
)
for method in ("bootstrap_rectangle", "bootstrap_ellipsoid"):
    print(f"  {method:18s} joint coverage: {rep2.coverage[method][0]:.3f}")
print(f"  max-|t| type-I error under the true null: "
      f"{rep2.rejection_rate['max_t_bootstrap']:.3f} (nominal 0.05)")
