"""
Monte Carlo comparison of the four estimators
=============================================

Reduced replication count so this runs in a few seconds. The command line
``sgmap table3`` runs the full version.
"""

from sgmap.lasso import GridSpec
from sgmap.simulation import reproduce_table3, table3_csv

reports = reproduce_table3(reps=200, seed=0, grid=GridSpec((0, 20, 0.5), (0, 3, 0.25)))
for r in reports:
    print(f"gamma={r.gamma:4g}  {r.estimator.kind:14s} mse={r.mse:8.2f}  se={r.standard_error:.2f}")

print()
print(table3_csv(reports))
