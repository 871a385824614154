"""
Empirical risk against the minimax rate
=======================================
"""

from sgmap.rates import RateSpec, rate_lookup, rate_sweep

# single-vector rates over l0 and lp balls
for spec in (RateSpec("l0", 0, 0.05, 256), RateSpec("strong-lp", 1.0, 0.05, 256), RateSpec("l0", 0, 0.8, 256)):
    print(spec.ball, spec.p, spec.regime, round(rate_lookup(spec), 2))

# the ratio risk / bound should stay roughly flat as the design grows
configs = [(m, n, m0, n**-0.5) for n in (64, 256) for m in (16, 64) for m0 in (1, m // 2)]
for row in rate_sweep(configs, reps=20):
    print(f"m={row.m:3d} n={row.n:4d} m0={row.m0:3d} risk={row.risk:9.2f} bound={row.bound:9.2f} ratio={row.ratio:.3f}")
