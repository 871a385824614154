"""
Sparsity priors and the thresholds they imply
=============================================
"""

import math

import numpy as np

from sgmap.priors import (
    binomial_lambda_sq,
    binomial_prior,
    check_assumption_p,
    truncated_geometric_prior,
    universal_xi,
)

n = 100
for gamma in (1.0, 9.0, 25.0):
    xi = universal_xi(n, gamma)
    lam2 = binomial_lambda_sq(xi, gamma)
    # a binomial prior gives a linear penalty, i.e. hard thresholding at sqrt(2) sigma lambda
    print(f"gamma={gamma:4g}  xi={xi:.5f}  threshold={math.sqrt(2 * lam2):.4f}")
print("universal threshold sqrt(2 ln n) =", round(math.sqrt(2 * math.log(n)), 4))

# a geometric prior puts most of its mass on small counts
geo = truncated_geometric_prior(n, 0.7)
print("geometric masses at 1..5:", np.round(geo.masses[:5], 4))
print("total mass:", geo.masses.sum())

# the tail condition used for adaptivity is strict for moderate gamma
for prior in (binomial_prior(n, 1e-4), geo):
    rep = check_assumption_p(prior, gamma=0.1, n=n)
    print(prior, "satisfied" if rep.satisfied else f"{len(rep.violations)} violations")
