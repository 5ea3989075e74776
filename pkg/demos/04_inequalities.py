"""
Hoelder chains, Cauchy's formula and the windowed moment
========================================================

These are true inequalities, so computed slacks below 1 could only come
from quadrature error.
"""
# %%
from zetamoments.moments import cauchy_lemma_check, convexity_ratio, holder_suite
from zetamoments.zerofinder import build_cache

cache = build_cache(500.0)
for k in (2, 3):
    rep = holder_suite(k, 500.0, cache=cache, xi=20)
    for c in rep["checks"]:
        print(f"k={k} {c.name:26s} slack {c.slack:.6f}")

# %%
c = cauchy_lemma_check(1, 1, 0.1, 200.0)
print(c.name, f"lhs {c.lhs:.4g} rhs {c.rhs:.4g}")

# %%
# Gaussian-windowed moment on and off the line (diagnostic only)
for T in (250.0, 500.0):
    print(convexity_ratio(1, 0.75, T))
