"""
Divisor functions and Dirichlet polynomials
===========================================

d_k by exact convolution, the growth of sum d_k(n)^2/n, and the mean value
of a short Dirichlet polynomial.
"""
# %%
import math

import numpy as np

from zetamoments.arithmetic import (
    DirichletPoly,
    compute_dk_tilde,
    fit_Ck,
    mv_meanvalue_check,
    predicted_Ck,
    sieve_dk,
)

t = compute_dk_tilde(sieve_dk(3, 30))
print("d_3(1..12):", t.dk[1:13])
print("d~_3(12) =", t.dk_tilde[12], "<=", t.dk[12] * math.log(12))

# %%
# Leading constant of sum_{n<=xi} d_k(n)^2/n ~ C_k (log xi)^(k^2)
for k, top in ((1, 1e6), (2, 1e7)):
    f = fit_Ck(k, np.geomspace(100, top, 8).astype(int))
    print(f"k={k}: C_k fit {f.C_k:.5f}  Euler product {predicted_Ck(k):.5f}  exponent {f.exponent:.3f} (target {k * k})")

# %%
poly = DirichletPoly.build(2, 50)
for T in (5000.0, 10000.0):
    r = mv_meanvalue_check(poly, T)
    print(f"T={T:.0f}: integral {r.integral:.6g}  diagonal {r.main_term:.6g}  rel dev {r.rel_deviation:.3%}")
