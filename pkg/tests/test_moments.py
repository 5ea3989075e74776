import json
import math

import mpmath
import numpy as np
import pytest

from zetamoments.config import CoverageError, DomainError, PrecisionConfig
from zetamoments.moments import (
    CONREY_GHOSH,
    InequalityCheck,
    MomentSpec,
    cauchy_lemma_check,
    continuous_moment,
    discrete_moment,
    disk_samples,
    extrema_sum_vs_integral,
    fit_series,
    gap_integral,
    gap_integrals,
    gaussian_window,
    holder_chains,
    holder_suite,
    line_integrals,
    results_csv,
    results_json,
    trend_fit,
    windowed_moment,
)
from zetamoments.zerofinder import ZeroCache, ZeroGap

mpmath.mp.dps = 20


def test_gap_identity_first_gap_against_mpmath(cache_1000):
    g = cache_1000.gaps[0]
    zl = float(mpmath.siegelz(g.lambda_))
    for k in (1, 2, 3):
        c = gap_integral(g, k)
        assert k * c.integral == pytest.approx(zl ** (2 * k), rel=1e-8)
        assert c.ok


def test_gap_identity_many(cache_1000):
    rows = gap_integrals(cache_1000.gaps[:300], (1, 2, 3))
    assert max(c.residual for r in rows for c in r) < 1e-6


def test_gap_integrals_parallel_map_same(cache_1000):
    gaps = cache_1000.gaps[:130]
    a = gap_integrals(gaps, (2,))
    b = gap_integrals(gaps, (2,), pmap=map)
    assert [r[0].integral for r in a] == [r[0].integral for r in b]


def test_gap_rejects_degenerate():
    with pytest.raises(ValueError):
        gap_integral(ZeroGap(10.0, 10.0, 10.0, 0.0), 1)
    with pytest.raises(ValueError):
        gap_integral(ZeroGap(14.1, 21.0), 1)


def test_mixed_abs_over_gap_equals_gap_integral(cache_1000):
    g = cache_1000.gaps[3]
    spec = MomentSpec(2, "mixed_abs", g.gamma_plus, t_min=g.gamma)
    res = continuous_moment(spec, cache=cache_1000)
    assert res.value == pytest.approx(gap_integral(g, 2).integral, rel=1e-10)


def test_continuous_Z_against_mpmath_quadrature(cache_1000):
    res = continuous_moment(MomentSpec(1, "continuous_Z", 30.0), cache=cache_1000)
    pts = [1.0, 14.134725141734693, 17.88, 21.022039638771555, 25.010857580145688, 30.0]
    ref = float(mpmath.quad(lambda t: mpmath.siegelz(t) ** 2, pts))
    assert res.value == pytest.approx(ref, rel=1e-9)
    assert res.p == 1


def test_zeta_deriv_kind_against_mpmath():
    res = continuous_moment(MomentSpec(1, "continuous_zeta_deriv", 12.0, ell=1))
    ref = float(mpmath.quad(lambda t: abs(mpmath.zeta(0.5 + 1j * t, derivative=1)) ** 2,
                            mpmath.linspace(1, 12, 12)))
    assert res.value == pytest.approx(ref, rel=1e-8)


def test_zderiv_kind_second_derivative(cache_1000):
    res = continuous_moment(MomentSpec(1, "continuous_Zderiv", 20.0, ell=2), cache=cache_1000)
    ref = float(mpmath.quad(lambda t: mpmath.siegelz(t, derivative=2) ** 2, mpmath.linspace(1, 20, 20)))
    assert res.value == pytest.approx(ref, rel=1e-8)
    assert res.p == 1 * (1 + 4)


def test_additivity_and_monotonicity(cache_1000):
    comps = [("continuous_Z", 2, 0), ("mixed_square", 2, 0), ("mixed_abs", 1, 0)]
    vals, errs = line_integrals(comps, 1.0, 400.0, cache=cache_1000, splits=[150.0, 260.0])
    whole, werr = line_integrals(comps, 1.0, 400.0, cache=cache_1000)
    assert np.all(np.abs(vals.sum(axis=1) - whole[:, 0]) <= 10 * (errs.sum(axis=1) + werr[:, 0]) + 1e-9)
    assert np.all(vals > 0)


def test_positivity_abs_dominates_signed(cache_1000):
    from zetamoments.evaluator import z_line
    from zetamoments.quadrature import integrate

    a = continuous_moment(MomentSpec(1, "mixed_abs", 200.0), cache=cache_1000).value
    signed, _ = integrate(lambda t: (lambda z: z[0] * z[1])(z_line(t)), 1.0, 200.0, panel_width=1.0)
    assert a >= abs(signed[0])


def test_quadrature_convergence(cache_1000):
    spec = MomentSpec(2, "mixed_square", 300.0)
    loose = continuous_moment(spec, cache=cache_1000)
    tight = continuous_moment(spec, PrecisionConfig(rel_tol=1e-12, abs_floor=1e-13), cache_1000)
    assert abs(loose.value - tight.value) <= 10 * loose.error + 1e-10 * loose.value
    assert loose.error < 1e-9 * loose.value


def test_mixed_abs_needs_cache():
    with pytest.raises(CoverageError):
        continuous_moment(MomentSpec(1, "mixed_abs", 100.0))


def test_discrete_moment(cache_1000):
    m = discrete_moment(1, 1000.0, cache_1000)
    assert m.extra["count"] == 649
    assert len(m.extra["initial_extrema"]) == 2
    assert 0.9 < m.normalized / CONREY_GHOSH < 1.1
    with pytest.raises(CoverageError):
        discrete_moment(1, 5000.0, cache_1000)


def test_discrete_single_gap():
    g = ZeroGap(14.134725141734693, 21.022039638771555, 17.882582076936, 2.340551029908813, 1)
    zeros = [type("Z", (), {"gamma": 14.134725141734693, "index": 1})(),
             type("Z", (), {"gamma": 21.022039638771555, "index": 2})()]
    c = ZeroCache(21.022039638771555, zeros, [g])
    m = discrete_moment(3, 20.0, c)
    assert m.value == pytest.approx(2.340551029908813**6, rel=1e-15)


def test_extrema_sum_vs_integral(cache_1000):
    for k in (1, 2):
        r = extrema_sum_vs_integral(k, 1000.0, cache_1000)
        assert r["relative"] < 0.05


def test_gaussian_window_against_mpmath(rng):
    for _ in range(20):
        T = float(rng.uniform(2, 800))
        k = int(rng.integers(1, 5))
        t = float(rng.uniform(T - 4, 2 * T + 4))
        lo, hi = max(T, t - 12), min(2 * T, t + 12)
        ref = 0.0 if lo >= hi else float(mpmath.quad(
            lambda x: mpmath.exp(-2 * k * (t - x) ** 2), [lo, min(max(t, lo), hi), hi]))
        assert gaussian_window(t, k, T) == pytest.approx(ref, abs=1e-12)


def test_gaussian_window_bounds():
    t = np.linspace(-50, 300, 2001)
    for k in (1, 2, 5):
        w = gaussian_window(t, k, 100.0)
        assert np.all(w >= 0) and np.all(w <= math.sqrt(math.pi / (2 * k)) + 1e-15)
    assert gaussian_window(150.0, 1, 100.0) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-12)


def test_windowed_moment_domain():
    with pytest.raises(DomainError):
        windowed_moment(1, 0.8, 100.0)
    with pytest.raises(DomainError):
        MomentSpec(1, "windowed", 10.0, sigma=0.4)


def test_windowed_moment_half_line_vs_off_line():
    a = windowed_moment(1, 0.5, 60.0)
    b = windowed_moment(1, 0.5 + 1e-9, 60.0)
    assert a.value == pytest.approx(b.value, rel=1e-6)


def test_holder_constant_functions_equality():
    c, d, L, k = 1.7, 0.6, 3.0, 2
    I = {"Z2k": c ** (2 * k) * L, "Zp2k": d ** (2 * k) * L, "abs": d * c ** (2 * k - 1) * L,
         "sq": d**2 * c ** (2 * k - 2) * L, "fourth": d**4 * c ** (2 * k - 4) * L}
    for chk in holder_chains(I, k):
        assert chk.slack == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("k", [2, 3])
def test_holder_suite(cache_1000, k):
    rep = holder_suite(k, 300.0, cache=cache_1000, xi=20)
    assert len(rep["checks"]) == 6
    assert all(c.passed for c in rep["checks"])


def test_holder_rejects_k1(cache_1000):
    with pytest.raises(ValueError):
        holder_suite(1, 100.0, cache=cache_1000)


def test_disk_samples():
    a = disk_samples(0.2)
    assert a.size == 25 and a[0] == 0
    assert np.allclose(np.abs(a[1:17]), 0.2) and np.allclose(np.abs(a[17:]), 0.1)


def test_cauchy_lemma_cases():
    c = cauchy_lemma_check(1, 1, 0.1, 60.0)
    assert c.passed
    c0 = cauchy_lemma_check(1, 0, 0.1, 60.0)
    assert c0.rhs >= c0.lhs
    c3 = cauchy_lemma_check(1, 1, 0.3, 60.0)
    assert c3.passed
    with pytest.raises(DomainError):
        cauchy_lemma_check(1, 1, 0.6, 10.0)


def test_inequality_check_tolerance():
    assert InequalityCheck("x", 1.0, 1.0 - 5e-7).passed
    assert not InequalityCheck("x", 1.0, 1.0 - 5e-6).passed


def test_fit_series_constant_slope_zero():
    f = fit_series([100, 200, 400, 800], [3.0] * 4, 1, True)
    assert f.exponent == pytest.approx(0.0, abs=1e-12)
    assert f.slope_vs_logT == pytest.approx(0.0, abs=1e-12)


def test_fit_series_needs_grid():
    with pytest.raises(ValueError):
        fit_series([100, 200], [1.0, 2.0], 1, True)


def test_trend_fit_discrete_k1(cache_1000):
    f = trend_fit("discrete", 1, [125, 250, 500, 1000], cache_1000)
    assert f.bounded
    assert abs(f.slope_vs_logT / CONREY_GHOSH - 1) < 0.5


def test_trend_fit_continuous(cache_1000):
    f = trend_fit("mixed_abs", 1, [250, 500, 1000], cache_1000)
    assert f.p == 2 and f.bounded
    direct = continuous_moment(MomentSpec(1, "mixed_abs", 500.0), cache=cache_1000).value
    assert f.values[1] == pytest.approx(direct, rel=1e-9)


def test_output_formats(cache_1000):
    r = [discrete_moment(1, 500.0, cache_1000),
         continuous_moment(MomentSpec(1, "continuous_Z", 50.0), cache=cache_1000)]
    text = results_csv(r)
    lines = text.split("\n")
    assert lines[0] == "kind,k,ell,sigma,t_min,t_max,value,err,normalized,p"
    assert text.endswith("\n") and '"' not in text
    assert float(lines[1].split(",")[6]) == r[0].value
    doc = json.loads(results_json(r, [{"a": 1.0}], [InequalityCheck("x", 1.0, 2.0)]))
    assert doc["inequality_slacks"][0]["slack"] == 2.0
    assert results_json(r) == results_json(r)
