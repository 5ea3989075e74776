"""
Zeros of Z and the extremum between each pair
=============================================

Scan the critical line up to T = 300, look at the first few gaps, and
check the count against the smooth counting formula.
"""
# %%
import numpy as np

from zetamoments.evaluator import Z, Z_values
from zetamoments.zerofinder import build_cache, count_audit, initial_critical_points

cache = build_cache(300.0)
zeros = cache.zeros_up_to(300.0)
print(f"{len(zeros)} zeros up to 300")
print("first five:", [round(z.gamma, 10) for z in zeros[:5]])

# %%
# Every gap holds exactly one critical point lambda, and |Z(lambda)| is the
# largest value of |Z| in the gap.
for g in cache.gaps[:6]:
    print(f"({g.gamma:9.5f}, {g.gamma_plus:9.5f})  lambda = {g.lambda_:9.5f}  Z = {g.z_lambda:+.6f}")

# %%
# Below the first zero Z has two more critical points; they are kept apart
# from the gap statistics.
for t, z in initial_critical_points(zeros[0].gamma):
    print(f"t = {t:.8f}  Z = {z:+.6f}")

# %%
# The census should stay within 2 log T of the smooth count.
audit = count_audit(300.0, len(zeros))
print(audit)

# %%
# A point evaluation carries its own error estimate.
ev = Z(250.0)
print(ev)
t = np.linspace(0, 60, 7)
print(np.round(Z_values(t), 6))
