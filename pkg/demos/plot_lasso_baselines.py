"""
Sparse group lasso baselines
============================

The closed form shrinks each entry, then each group. Oracle tuning picks
the pair of penalties with the smallest Monte Carlo risk.
"""

import numpy as np

from sgmap import GridSpec, LassoParams, ObservationSet, SimScenario, oracle_tune, sparse_group_lasso
from sgmap.oracles import numeric_sgl

data = ObservationSet([[3.0, 1.0, -0.2], [0.4, -0.3, 0.1]], 1.0)
p = LassoParams(lambda1=2.0, lambda2=1.0)
print(sparse_group_lasso(data, p).values)

# an iterative solver lands on the same point
print(np.abs(sparse_group_lasso(data, p).values - numeric_sgl(data, p).values).max())

# oracle tuning on a reduced grid and 200 replications
scenario = SimScenario.reference_design(tau=3.0, replications=200, seed=0)
res = oracle_tune(scenario, "full", GridSpec((0, 12, 0.5), (0, 3, 0.25)))
print("best", res.best_params, "mse %.2f (se %.2f)" % res.best_mse)
res = oracle_tune(scenario, "semi", GridSpec((0, 12, 0.5)))
print("semi-oracle", res.best_params, "mse %.2f (se %.2f)" % res.best_mse)
