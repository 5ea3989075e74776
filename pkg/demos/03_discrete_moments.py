"""
Discrete moments of the extrema
===============================

M_k(T) is the mean of Z(lambda)^(2k) over gaps above zeros up to T. For
k = 1 its growth constant is known: M_1(T) ~ (e^2 - 5)/2 log T.
"""
# %%
import math

from zetamoments.moments import CONREY_BAND, CONREY_GHOSH, discrete_moment, trend_fit
from zetamoments.zerofinder import build_cache

cache = build_cache(10000.0)   # about ten seconds

# %%
for T in (1000.0, 2500.0, 5000.0, 10000.0):
    m = discrete_moment(1, T, cache)
    print(f"T={T:7.0f}  M_1={m.value:.5f}  M_1/log T={m.normalized:.5f}  offset={m.value - CONREY_GHOSH * math.log(T):+.3f}")

# %%
# For k = 2 only boundedness of M_2/(log T)^4 is checkable at these heights.
fit = trend_fit("discrete", 2, [1250, 2500, 5000, 10000], cache)
print("r_2:", fit.ratios.round(5), "spread", round(fit.spread, 3))
print("asymptotic band", [round(x, 5) for x in CONREY_BAND])
print("k=1 slope vs log T:", trend_fit("discrete", 1, [1250, 2500, 5000, 10000], cache).slope_vs_logT)
