import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetamoments.arithmetic import (
    DirichletPoly,
    compute_dk_tilde,
    eval_A,
    fit_Ck,
    mean_square_exact,
    mv_meanvalue_check,
    partial_sum_dk2,
    partial_sum_dk2_over_n,
    predicted_Ck,
    sieve_dk,
    write_table_csv,
)


def brute_dk(n, k):
    """Ordered k-tuples of positive integers with product n."""
    if k == 1:
        return 1
    return sum(brute_dk(n // d, k - 1) for d in range(1, n + 1) if n % d == 0)


def test_small_values():
    assert sieve_dk(2, 12).dk[12] == 6
    assert sieve_dk(3, 6).dk[6] == 9
    for k in range(1, 7):
        assert sieve_dk(k, 5).dk[1] == 1


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_sieve_against_brute_force(k):
    dk = sieve_dk(k, 300).dk
    assert all(dk[n] == brute_dk(n, k) for n in range(1, 301))


def test_prime_powers():
    dk = sieve_dk(4, 1024).dk
    for a in range(11):
        assert dk[2**a] == math.comb(a + 3, a)


@settings(max_examples=50, deadline=None)
@given(m=st.integers(1, 300), n=st.integers(1, 300), k=st.integers(2, 5))
def test_multiplicative(m, n, k):
    if math.gcd(m, n) != 1:
        return
    dk = sieve_dk(k, m * n).dk
    assert dk[m * n] == dk[m] * dk[n]


def test_convolution_identity():
    x = 10_000
    d3 = sieve_dk(3, x).dk
    d2 = sieve_dk(2, x).dk
    rhs = sum(int(d2[a]) * (x // a) for a in range(1, x + 1))
    assert int(d3[1:].sum()) == rhs


def test_bad_arguments():
    with pytest.raises(ValueError):
        sieve_dk(7, 10)
    with pytest.raises(ValueError):
        sieve_dk(2, 0)


def test_tilde_examples():
    t1 = compute_dk_tilde(sieve_dk(1, 10))
    assert t1.dk_tilde[10] == pytest.approx(math.log(10), rel=1e-15)
    t2 = compute_dk_tilde(sieve_dk(2, 10))
    assert t2.dk_tilde[6] == pytest.approx(math.log(6) + math.log(3) + math.log(2), rel=1e-14)
    for k in range(1, 5):
        assert compute_dk_tilde(sieve_dk(k, 5)).dk_tilde[1] == 0.0


@pytest.mark.parametrize("k", [2, 3])
def test_tilde_by_divisor_enumeration(k):
    t = compute_dk_tilde(sieve_dk(k, 400))
    prev = sieve_dk(k - 1, 400).dk
    for n in range(1, 401):
        ref = math.fsum(prev[d] * math.log(n / d) for d in range(1, n + 1) if n % d == 0)
        assert t.dk_tilde[n] == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_tilde_bound():
    n = np.arange(1, 100_001, dtype=float)
    for k in (2, 3, 4):
        t = compute_dk_tilde(sieve_dk(k, 100_000))
        assert np.all(t.dk_tilde[1:] <= t.dk[1:] * np.log(n) * (1 + 1e-12))


def test_harmonic_sum():
    xi = 100_000
    assert abs(partial_sum_dk2_over_n(1, xi) - math.log(xi) - 0.5772156649015329) <= 1 / xi
    for k in (1, 2, 5):
        assert partial_sum_dk2_over_n(k, 1) == 1.0


def test_partial_sum_over_n_against_naive():
    xi = 10_000
    tau = [0] * (xi + 1)
    for d in range(1, xi + 1):
        for m in range(d, xi + 1, d):
            tau[m] += 1
    ref = math.fsum(tau[n] ** 2 / n for n in range(1, xi + 1))
    assert partial_sum_dk2_over_n(2, xi) == pytest.approx(ref, rel=1e-12)


def test_partial_sum_dk2():
    assert partial_sum_dk2(3, 1).value == 1
    assert partial_sum_dk2(1, 777).value == 777
    a = partial_sum_dk2(2, 100_000).normalized
    b = partial_sum_dk2(2, 200_000).normalized
    assert max(a, b) / min(a, b) <= 1.5


def test_fit_k1():
    f = fit_Ck(1, np.geomspace(10, 1e6, 8).astype(int))
    assert abs(f.C_k - 1) < 0.05
    assert 0.8 < f.exponent < 1.2
    assert np.all(np.diff(f.sums) > 0) and np.all(np.isfinite(f.residuals))


def test_fit_k2():
    f = fit_Ck(2, np.geomspace(100, 1e6, 8).astype(int))
    assert f.exponent > 0
    assert f.C_k == pytest.approx(1 / (4 * math.pi**2), rel=0.2)


def test_fit_degenerate_grid():
    with pytest.raises(ValueError):
        fit_Ck(1, [10, 100, 1000])


def test_predicted_Ck_k2():
    assert predicted_Ck(2) == pytest.approx(1 / (4 * math.pi**2), rel=1e-5)


def test_eval_A_basics():
    p = DirichletPoly.build(3, 40)
    assert eval_A(0.0, p) == pytest.approx(float(np.sum(p.dk / np.sqrt(np.arange(1, 41)))), rel=1e-14)
    one = DirichletPoly.build(2, 1)
    assert eval_A(np.array([0.0, 3.0, 100.0]), one) == pytest.approx(np.ones(3))


def test_eval_A_naive_loop():
    p = DirichletPoly.build(2, 10)
    d = sieve_dk(2, 10).dk
    ref = sum(int(d[n]) * n ** (-0.5 - 3.7j) for n in range(1, 11))
    assert abs(eval_A(3.7, p) - ref) < 1e-14


@settings(max_examples=25, deadline=None)
@given(t=st.floats(-1e4, 1e4))
def test_eval_A_bounded(t):
    p = DirichletPoly.build(2, 30)
    assert abs(eval_A(t, p)) <= np.sum(p.coefficients) + 1e-12


def test_for_height_uses_quarter_power():
    assert DirichletPoly.for_height(2, 10_000).xi == 10


def test_mean_value_xi_one():
    r = mv_meanvalue_check(DirichletPoly.build(2, 1), 100.0)
    assert r.integral == pytest.approx(100.0, rel=1e-13)


def test_mean_value_matches_closed_form_and_scales():
    p = DirichletPoly.build(2, 50)
    r1 = mv_meanvalue_check(p, 5000.0)
    assert r1.integral == pytest.approx(mean_square_exact(p, 5000.0), rel=1e-11)
    assert r1.rel_deviation <= 0.02
    r2 = mv_meanvalue_check(p, 10000.0)
    assert r2.rel_deviation < r1.rel_deviation


def test_mean_value_requires_long_range():
    with pytest.raises(ValueError):
        mv_meanvalue_check(DirichletPoly.build(2, 50), 100.0)


def test_table_csv(tmp_path):
    t = compute_dk_tilde(sieve_dk(2, 6))
    p = tmp_path / "t.csv"
    write_table_csv(t, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "n,dk,dk_tilde"
    n, dk, tilde = lines[6].split(",")
    assert (n, dk) == ("6", "4") and float(tilde) == pytest.approx(t.dk_tilde[6], rel=1e-16)
