"""
Checking the fast estimator against brute force
===============================================

On small problems every indicator matrix can be scored, so the greedy
two-stage search can be compared with the true minimizer.
"""

import numpy as np

from sgmap import ObservationSet, PenaltyConfig, estimate
from sgmap.oracles import exhaustive_map, posterior_argmax

rng = np.random.default_rng(0)
agree = 0
for _ in range(200):
    cfg = PenaltyConfig.geometric(3, 4, gamma=1.0, q0=0.5, q=0.5)
    data = ObservationSet(rng.normal(size=(3, 4)) * 3, 1.0)
    fit = estimate(data, cfg)
    best, obj = exhaustive_map(data, cfg)
    agree += fit.indicator == best and abs(fit.objective - obj) < 1e-9
    assert posterior_argmax(data, cfg) == best
print(f"{agree}/200 instances match the exhaustive minimizer")
