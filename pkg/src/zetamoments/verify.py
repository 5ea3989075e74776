"""The verification suite: identities, inequalities and oracle agreements.

Each check returns a :class:`Check` whose status is ``pass``, ``fail`` or
``report`` (diagnostics that are never asserted). Sampled checks draw from
a seeded generator so the report is reproducible.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate as sp_integrate

from . import arithmetic as ar
from . import moments as mo
from .config import DEFAULT, PrecisionConfig
from .evaluator import (
    Z1,
    chi,
    chi_logderiv,
    chi_magnitude_check,
    functional_equation_residual,
    z_line,
)
from .zerofinder import ZeroCache, build_cache, count_audit, extend_cache

# zero counts of the census oracle (dense sign-change scan, cross-checked)
REFERENCE_COUNTS = {100: 29, 1000: 649}


@dataclass
class Check:
    name: str
    status: str
    value: float
    detail: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def failed(self) -> bool:
        return self.status == "fail"

    def as_dict(self, timings: bool = False) -> dict:
        d = {"name": self.name, "status": self.status, "value": self.value, "detail": self.detail}
        if timings:
            d["runtime"] = self.runtime
        return d


@dataclass
class VerifyReport:
    checks: list[Check]
    seed: int
    t_max: float

    @property
    def passed(self) -> bool:
        return not any(c.failed for c in self.checks)

    def to_json(self, timings: bool = False) -> str:
        doc = {"seed": self.seed, "t_max": self.t_max, "passed": self.passed,
               "checks": [c.as_dict(timings) for c in self.checks]}
        return json.dumps(mo._jsonable(doc), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        lines = ["name,status,value"]
        lines += [f"{c.name},{c.status},{format(float(c.value), '.17g')}" for c in self.checks]
        return "\n".join(lines) + "\n"


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# ------------------------------------------------------------- checks --

def check_gap_identity(cache: ZeroCache, cfg: PrecisionConfig, n_gaps: int = 200, pmap=None) -> Check:
    gaps = cache.gaps[:n_gaps]
    rows = mo.gap_integrals(gaps, (1, 2, 3), cfg, pmap=pmap)
    worst = max(c.residual for row in rows for c in row)
    return Check("gap_identity", _status(worst <= mo.IDENTITY_TOL), worst,
                 {"gaps": len(gaps), "k": [1, 2, 3], "tol": mo.IDENTITY_TOL})


def check_derivative_identity(cfg: PrecisionConfig, rng: np.random.Generator, n: int = 1000) -> Check:
    t = np.sort(rng.uniform(10.0, 1000.0, n))
    _, zp, _, _ = z_line(t, cfg)
    z1 = np.abs(Z1(0.5 + 1j * t, cfg))
    scaled = np.abs(np.abs(zp) - z1) / (1 + np.abs(zp))
    worst = float(scaled.max())
    return Check("derivative_identity", _status(worst <= 1e-8), worst, {"points": n, "tol": 1e-8})


def check_zero_census(cache: ZeroCache, t_max: float, cfg: PrecisionConfig) -> Check:
    detail = {}
    ok = True
    for T, expected in REFERENCE_COUNTS.items():
        if T <= t_max:
            got = len(cache.zeros_up_to(T))
            detail[f"count_{T}"] = got
            ok &= got == expected
    g = cache.gammas
    worst = 0.0
    for T in np.linspace(10.0, t_max, 200):
        a = count_audit(float(T), int(np.searchsorted(g, T, side="right")))
        worst = max(worst, abs(a.drift) / a.bound)
        ok &= a.ok
    detail["max_drift_over_bound"] = worst
    return Check("zero_census", _status(ok), worst, detail)


def check_conrey_ghosh(cache: ZeroCache, t_max: float) -> Check:
    heights = [t_max / 4, t_max / 2, t_max]
    diffs = []
    for T in heights:
        m = mo.discrete_moment(1, T, cache)
        diffs.append(m.value - mo.CONREY_GHOSH * math.log(T))
    ratio = mo.discrete_moment(1, t_max, cache).normalized
    rel = abs(ratio / mo.CONREY_GHOSH - 1)
    ok = max(abs(d) for d in diffs) <= 3 and rel <= 0.2
    return Check("conrey_ghosh", _status(ok), rel,
                 {"heights": heights, "offsets": diffs, "ratio": ratio})


def check_holder(cache: ZeroCache, T: float, cfg: PrecisionConfig) -> list[Check]:
    out = []
    for k in (2, 3):
        rep = mo.holder_suite(k, T, cfg, cache, xi=20)
        worst = min(c.slack for c in rep["checks"])
        ok = all(c.passed for c in rep["checks"])
        out.append(Check(f"holder_suite_k{k}", _status(ok), worst,
                         {c.name: c.slack for c in rep["checks"]}))
    return out


def check_mean_value(cfg: PrecisionConfig) -> Check:
    poly = ar.DirichletPoly.build(2, 50)
    r1 = ar.mv_meanvalue_check(poly, 5000, cfg)
    r2 = ar.mv_meanvalue_check(poly, 10000, cfg)
    ok = r1.rel_deviation <= 0.02 and r2.rel_deviation < r1.rel_deviation
    return Check("mean_value", _status(ok), r1.rel_deviation,
                 {"dev_5000": r1.rel_deviation, "dev_10000": r2.rel_deviation,
                  "measured_C": r1.measured_C})


@lru_cache(maxsize=None)
def _ordered_factorizations(n: int, k: int) -> int:
    if k == 1:
        return 1
    return sum(_ordered_factorizations(n // d, k - 1) for d in range(1, n + 1) if n % d == 0)


def check_sieve() -> Check:
    bad = 0
    for k in range(1, 5):
        dk = ar.sieve_dk(k, 500).dk
        bad += sum(int(dk[n]) != _ordered_factorizations(n, k) for n in range(1, 501))
    worst = 0.0
    for k in range(1, 5):
        t = ar.compute_dk_tilde(ar.sieve_dk(k, 100_000))
        n = np.arange(1, 100_001, dtype=float)
        excess = t.dk_tilde[1:] - t.dk[1:] * np.log(n)
        worst = max(worst, float(excess.max()))
    ok = bad == 0 and worst <= 1e-9
    return Check("divisor_sieve", _status(ok), float(bad), {"mismatches": bad, "tilde_excess": worst})


def check_c1() -> Check:
    xi = 100_000
    dev = abs(ar.partial_sum_dk2_over_n(1, xi) - math.log(xi) - 0.5772156649015329)
    return Check("harmonic_constant", _status(dev <= 1 / xi), dev, {"xi": xi})


def check_cauchy_lemma(cfg: PrecisionConfig) -> Check:
    c = mo.cauchy_lemma_check(1, 1, 0.1, 200.0, cfg)
    return Check("cauchy_lemma", _status(c.passed), c.slack, {"lhs": c.lhs, "rhs": c.rhs})


def check_moment_trend(cache: ZeroCache, t_max: float) -> Check:
    heights = [t_max / 4, t_max / 2, t_max]
    fit = mo.trend_fit("discrete", 2, heights, cache)
    return Check("second_moment_trend", _status(fit.bounded), fit.spread,
                 {"heights": heights, "r2": fit.ratios, "band": list(mo.CONREY_BAND)})


def check_chi(rng: np.random.Generator) -> list[Check]:
    t = rng.uniform(1.0, 1e5, 100)
    mag = float(np.max(np.abs(np.abs(chi(0.5 + 1j * t)) - 1)))
    est = {}
    ok_est = True
    for tt in (20.0, 100.0, 1000.0):
        d = abs(chi_logderiv(complex(0.5, tt)) + math.log(tt / (2 * math.pi)))
        est[str(int(tt))] = d * tt
        ok_est &= d <= 5 / tt
    strip = {}
    ok_strip = True
    for sigma in (0.25, 0.75):
        d = chi_magnitude_check(sigma, 500.0)
        strip[str(sigma)] = d
        ok_strip &= d <= 2 / 500.0
    fe = float(np.max(functional_equation_residual(
        rng.uniform(-0.5, 1.5, 20) + 1j * rng.uniform(5.0, 500.0, 20))))
    return [
        Check("chi_unit_modulus", _status(mag <= 1e-10), mag),
        Check("chi_logderiv_estimate", _status(ok_est), max(est.values()) / 5, {"t_times_dev": est}),
        Check("chi_strip_magnitude", _status(ok_strip), max(strip.values()) * 250, strip),
        Check("functional_equation", _status(fe <= 1e-8), fe),
    ]


def check_cross_validation(cfg: PrecisionConfig, rng: np.random.Generator) -> list[Check]:
    t = np.sort(rng.uniform(100.0, 1e4, 100))
    zr = z_line(t, cfg, derivative=False, method="rs")[0]
    ze = z_line(t, cfg, derivative=False, method="em")[0]
    diff = float(np.max(np.abs(zr - ze)))
    ts = rng.uniform(20.0, 2000.0, 20)
    orders = []
    _, zp, _, _ = z_line(ts, cfg)
    errs = []
    for h in (0.02, 0.01):
        zph = (z_line(ts + h, cfg, False)[0] - z_line(ts - h, cfg, False)[0]) / (2 * h)
        errs.append(np.abs(zph - zp))
    orders = np.log2(errs[0] / errs[1])
    order = float(np.median(orders))
    return [
        Check("rs_vs_em", _status(diff <= 1e-6), diff, {"points": 100}),
        Check("derivative_fd_order", _status(order >= 1.9), order),
    ]


def check_window(rng: np.random.Generator, cfg: PrecisionConfig, ratio_heights=(250, 500, 1000)) -> list[Check]:
    worst = 0.0
    for _ in range(20):
        T = float(rng.uniform(2.0, 1000.0))
        k = int(rng.integers(1, 5))
        t = float(rng.uniform(T - 3, 2 * T + 3))
        # mass farther than 10 from t is below exp(-200)
        lo, hi = max(T, t - 10), min(2 * T, t + 10)
        direct = 0.0
        if lo < hi:
            direct, _ = sp_integrate.quad(lambda tau: math.exp(-2 * k * (t - tau) ** 2), lo, hi,
                                          points=[min(max(t, lo), hi)], epsabs=1e-14,
                                          epsrel=1e-13, limit=200)
        worst = max(worst, abs(mo.gaussian_window(t, k, T) - direct))
    out = [Check("window_closed_form", _status(worst <= 1e-10), worst)]
    ratios = {str(T): mo.convexity_ratio(1, 0.75, float(T), cfg)["ratio"] for T in ratio_heights}
    vals = list(ratios.values())
    out.append(Check("convexity_ratio", "report", max(vals) / min(vals), ratios))
    return out


# -------------------------------------------------------------- driver --

def _timed(fn: Callable, *args) -> list[Check]:
    t0 = time.perf_counter()
    res = fn(*args)
    res = res if isinstance(res, list) else [res]
    dt = (time.perf_counter() - t0) / len(res)
    for c in res:
        c.runtime = dt
    return res


def run_verify(t_max: float = 500.0, cfg: PrecisionConfig = DEFAULT, seed: int = 0,
               cache: ZeroCache | None = None, pmap=None, workers: int = 1) -> VerifyReport:
    """Run every check; the zero cache is built or extended to cover t_max."""
    if t_max < 200:
        raise ValueError("the suite needs t_max >= 200")
    rng = np.random.default_rng(seed)
    if cache is None:
        cache = build_cache(t_max, cfg, workers=workers, pmap=pmap)
    elif not cache.covers(t_max):
        cache = extend_cache(cache, t_max, cfg, workers=workers, pmap=pmap)
    checks: list[Check] = []
    checks += _timed(check_gap_identity, cache, cfg, 200, pmap)
    checks += _timed(check_derivative_identity, cfg, rng)
    checks += _timed(check_zero_census, cache, t_max, cfg)
    checks += _timed(check_conrey_ghosh, cache, t_max)
    checks += _timed(check_holder, cache, min(t_max, 500.0), cfg)
    checks += _timed(check_mean_value, cfg)
    checks += _timed(check_sieve)
    checks += _timed(check_c1)
    checks += _timed(check_cauchy_lemma, cfg)
    checks += _timed(check_moment_trend, cache, t_max)
    checks += _timed(check_chi, rng)
    checks += _timed(check_cross_validation, cfg, rng)
    checks += _timed(check_window, rng, cfg)
    return VerifyReport(checks, seed, t_max)
