"""Discrete and continuous moments of Z, the gap identity, and inequality checks.

Continuous integrals run on panels whose edges are the zeros and the
extrema from a :class:`~zetamoments.zerofinder.ZeroCache`, so that
integrands with |.| are smooth on every panel. Panel edges are also placed
where the Riemann-Siegel sum gains a term (t = 2 pi N^2) and where the
evaluator switches method, since Z as computed has a jump of the size of
its truncation error there.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .arithmetic import DirichletPoly, eval_A
from .config import DEFAULT, CoverageError, DomainError, PrecisionConfig
from .evaluator import RS_THRESHOLD, Z_higher_deriv, Z1, z_line, zeta, zeta_deriv
from .quadrature import integrate_intervals
from .zerofinder import ZeroCache, ZeroGap, initial_critical_points

KINDS = ("discrete_max", "continuous_Z", "continuous_Zderiv", "continuous_zeta_deriv",
         "mixed_square", "mixed_abs", "windowed")
CONTINUOUS_KINDS = KINDS[1:6]
T_MIN = 1.0
IDENTITY_TOL = 1e-6
HOLDER_SLACK = 1e-6
CAUCHY_SAFETY = 1e-3
CONREY_BAND = (math.sqrt(21) / (45 * math.pi), 1 / (math.pi * math.sqrt(15)))
CONREY_GHOSH = (math.e**2 - 5) / 2
_GAP_CHUNK = 64


@dataclass(frozen=True)
class MomentSpec:
    k: int
    kind: str
    t_max: float
    ell: int = 0
    t_min: float = T_MIN
    sigma: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.ell < 0:
            raise ValueError("ell must be >= 0")
        if not self.t_min < self.t_max:
            raise ValueError("need t_min < t_max")
        if self.kind == "windowed" and not 0.5 <= self.sigma <= 0.75:
            raise DomainError("sigma must lie in [1/2, 3/4]")

    @property
    def exponent(self) -> int:
        """Predicted power of log T used for normalization."""
        k, l = self.k, self.ell
        return {
            "discrete_max": k * k,
            "continuous_Z": k * k,
            "continuous_Zderiv": k * (k + 2 * l),
            "continuous_zeta_deriv": k * (k + 2 * l),
            "mixed_square": k * k + 2,
            "mixed_abs": k * k + 1,
            "windowed": k * k,
        }[self.kind]


@dataclass
class MomentResult:
    """``normalized`` is value/(log T)^p for the discrete kind (already an
    average) and value/(T (log T)^p) for integrals."""

    spec: MomentSpec
    value: float
    error: float
    normalized: float
    p: int
    extra: dict = field(default_factory=dict)

    def row(self) -> dict:
        s = self.spec
        return {"kind": s.kind, "k": s.k, "ell": s.ell, "sigma": s.sigma, "t_min": s.t_min,
                "t_max": s.t_max, "value": self.value, "err": self.error,
                "normalized": self.normalized, "p": self.p}


@dataclass(frozen=True)
class GapContribution:
    gap: ZeroGap
    k: int
    integral: float
    error: float
    residual: float

    @property
    def ok(self) -> bool:
        return self.residual <= IDENTITY_TOL


@dataclass(frozen=True)
class InequalityCheck:
    """lhs <= rhs is asserted up to ``tol``; slack = rhs / lhs."""

    name: str
    lhs: float
    rhs: float
    tol: float = HOLDER_SLACK

    @property
    def slack(self) -> float:
        if self.lhs == 0:
            return math.inf
        return self.rhs / self.lhs

    @property
    def passed(self) -> bool:
        return self.slack >= 1 - self.tol

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack, "passed": self.passed}


# ---------------------------------------------------------- integrands --

def _normalize(value: float, T: float, p: int, discrete: bool = False) -> float:
    L = math.log(T)
    return value / L**p if discrete else value / (T * L**p)


def _rs_jumps(a: float, b: float) -> np.ndarray:
    """Heights in (a, b) where the Riemann-Siegel sum changes length, plus the switch."""
    n = np.arange(max(1, math.isqrt(int(a / (2 * math.pi)))), math.isqrt(int(b / (2 * math.pi))) + 2)
    pts = np.concatenate([2 * math.pi * n.astype(float) ** 2, [RS_THRESHOLD]])
    return pts[(pts > a) & (pts < b)]


def _edges(a: float, b: float, cache: ZeroCache | None, max_width: float = 1.0) -> np.ndarray:
    """Panel edges: zeros, extrema, method seams, and a width cap."""
    pts = [np.array([a, b]), _rs_jumps(a, b)]
    if cache is not None:
        g = cache.gammas
        lam = np.array([x.lambda_ for x in cache.gaps]) if cache.gaps else np.empty(0)
        pts += [g, lam]
        sub = [t for t, _ in initial_critical_points(float(g[0]))] if g.size else []
        pts.append(np.array(sub, dtype=float))
    e = np.unique(np.concatenate(pts))
    e = e[(e >= a) & (e <= b)]
    out = [e[:1]]
    for lo, hi in zip(e[:-1], e[1:]):
        n = max(1, int(math.ceil((hi - lo) / max_width)))
        out.append(np.linspace(lo, hi, n + 1)[1:])
    return np.concatenate(out)


def _require_cover(cache: ZeroCache | None, T: float):
    if cache is None or not cache.covers(T):
        have = "none" if cache is None else f"{cache.t_max:g}"
        raise CoverageError(f"zero cache does not cover T = {T:g} (cache t_max: {have})")


def _component(kind: str, k: int, ell: int) -> Callable:
    """Map a moment kind onto a function of the lazily evaluated fields at t."""
    if kind == "continuous_Z" or (kind == "continuous_Zderiv" and ell == 0):
        return lambda F: F("z") ** (2 * k)
    if kind == "continuous_Zderiv":
        return lambda F: F(("zd", ell)) ** (2 * k)
    if kind == "continuous_zeta_deriv":
        return lambda F: np.abs(F(("zeta", ell))) ** (2 * k)
    if kind == "mixed_square":
        return lambda F: F("zp") ** 2 * F("z") ** (2 * k - 2)
    if kind == "mixed_abs":
        return lambda F: np.abs(F("zp") * F("z") ** (2 * k - 1))
    if kind == "mixed_fourth":
        return lambda F: F("zp") ** 4 * F("z") ** (2 * k - 4)
    raise ValueError(f"kind {kind!r} is not a line integrand")


class _Fields:
    """Per-call memo of Z, Z', higher derivatives and zeta^(l) on the line."""

    def __init__(self, t: np.ndarray, cfg: PrecisionConfig):
        self.t = t
        self.cfg = cfg
        self.memo: dict = {}

    def __call__(self, key):
        if key not in self.memo:
            if key in ("z", "zp"):
                z, zp, _, _ = z_line(self.t, self.cfg, derivative=True)
                self.memo["z"], self.memo["zp"] = z, zp
            elif key[0] == "zd":
                l = key[1]
                self.memo[key] = self("zp") if l == 1 else Z_higher_deriv(self.t, l, self.cfg)
            elif key[0] == "zeta":
                s = 0.5 + 1j * self.t
                self.memo[key] = zeta(s, self.cfg) if key[1] == 0 else zeta_deriv(s, key[1], self.cfg)
        return self.memo[key]


def line_integrals(components: Sequence[tuple[str, int, int]], t_min: float, t_max: float,
                   cfg: PrecisionConfig = DEFAULT, cache: ZeroCache | None = None,
                   extra: Callable | None = None, splits: Sequence[float] = ()):
    """Integrate several line integrands over [t_min, t_max] on shared panels.

    ``components`` are (kind, k, ell) triples; ``extra(t)`` may add further
    real rows. With ``splits`` the integral is also reported over each
    sub-range [t_min, s1], [s1, s2], ... ; the return value is then
    (values, errors) with one column per sub-range.
    """
    funcs = [_component(kind, k, l) for kind, k, l in components]

    def f(t):
        F = _Fields(t, cfg)
        rows = [fn(F) for fn in funcs]
        if extra is not None:
            rows += list(extra(t))
        return np.vstack(rows)

    cuts = np.array(sorted(set([t_min, *splits, t_max])))
    edges = np.unique(np.concatenate([_edges(t_min, t_max, cache), cuts]))
    res = integrate_intervals(f, edges[:-1], edges[1:], rel_tol=cfg.rel_tol,
                              abs_tol=cfg.abs_floor)
    bucket = np.searchsorted(cuts, edges[:-1], side="right") - 1
    m = res.values.shape[0]
    vals = np.zeros((m, cuts.size - 1))
    errs = np.zeros_like(vals)
    for c in range(m):
        np.add.at(vals[c], bucket, res.values[c])
        np.add.at(errs[c], bucket, res.errors[c])
    return vals, errs


# --------------------------------------------------------- gap identity --

def gap_integrals(gaps: Sequence[ZeroGap], ks: Sequence[int] = (1, 2, 3),
                  cfg: PrecisionConfig = DEFAULT, pmap=None) -> list[list[GapContribution]]:
    """Gap identity for many gaps at once; result[i][j] is gap i with ks[j].

    Each gap is integrated on [gamma, lambda] and [lambda, gamma+], where the
    integrand |Z' Z^(2k-1)| is smooth.
    """
    ks = list(ks)
    for g in gaps:
        if not g.completed:
            raise ValueError("gap has no extremum yet")
        if not g.gamma < g.lambda_ < g.gamma_plus:
            raise ValueError("degenerate gap: need gamma < lambda < gamma_plus")
    # fixed chunking keeps results bit-identical whatever the map
    chunks = [list(gaps[i:i + _GAP_CHUNK]) for i in range(0, len(gaps), _GAP_CHUNK)]
    parts = (pmap or map)(_gap_chunk, [(c, ks, cfg) for c in chunks])
    return [row for part in parts for row in part]


def _gap_chunk(args):
    gaps, ks, cfg = args
    if not gaps:
        return []
    g0 = np.array([g.gamma for g in gaps])
    lam = np.array([g.lambda_ for g in gaps])
    g1 = np.array([g.gamma_plus for g in gaps])
    a = np.concatenate([g0, lam])
    b = np.concatenate([lam, g1])
    # method seams inside a gap become extra panel edges
    lo, hi, owner = [], [], []
    for i, (x, y) in enumerate(zip(a, b)):
        e = np.concatenate([[x], _rs_jumps(x, y), [y]])
        lo += list(e[:-1])
        hi += list(e[1:])
        owner += [i % len(gaps)] * (e.size - 1)

    def f(t):
        z, zp, _, _ = z_line(t, cfg, derivative=True)
        return np.vstack([np.abs(zp * z ** (2 * k - 1)) for k in ks])

    res = integrate_intervals(f, np.array(lo), np.array(hi), rel_tol=min(cfg.rel_tol, 1e-10),
                              abs_tol=0.0)
    owner = np.array(owner)
    vals = np.zeros((len(ks), len(gaps)))
    errs = np.zeros_like(vals)
    for j in range(len(ks)):
        np.add.at(vals[j], owner, res.values[j])
        np.add.at(errs[j], owner, res.errors[j])
    out = []
    for i, g in enumerate(gaps):
        row = []
        for j, k in enumerate(ks):
            target = g.z_lambda ** (2 * k)
            resid = abs(k * vals[j, i] - target) / target
            row.append(GapContribution(g, k, float(vals[j, i]), float(errs[j, i]), float(resid)))
        out.append(row)
    return out


def gap_integral(gap: ZeroGap, k: int, cfg: PrecisionConfig = DEFAULT) -> GapContribution:
    """Integral of |Z' Z^(2k-1)| over one gap, with the identity residual."""
    return gap_integrals([gap], [k], cfg)[0][0]


# ------------------------------------------------------ discrete moment --

def discrete_moment(k: int, T: float, cache: ZeroCache) -> MomentResult:
    """Mean of Z(lambda)^(2k) over the gaps above the zeros in (0, T].

    The critical points below the first zero are not part of the mean and
    are returned in ``extra["initial_extrema"]``.
    """
    _require_cover(cache, T)
    gaps = cache.gaps_from_zeros_up_to(T)
    if not gaps:
        raise CoverageError(f"no zeros up to T = {T:g}")
    powers = np.array([g.z_lambda for g in gaps]) ** (2 * k)
    value = float(np.sum(powers) / len(gaps))
    spec = MomentSpec(k, "discrete_max", T, t_min=0.0)
    first = initial_critical_points(cache.zeros[0].gamma)
    extra = {
        "count": len(gaps),
        "sum": float(np.sum(powers)),
        "initial_extrema": [{"t": t, "z": z, "z_pow": z ** (2 * k)} for t, z in first],
    }
    if k == 2:
        extra["conrey_band"] = list(CONREY_BAND)
    if k == 1:
        extra["conrey_ghosh"] = CONREY_GHOSH
    p = spec.exponent
    return MomentResult(spec, value, 0.0, _normalize(value, T, p, discrete=True), p, extra)


def extrema_sum_vs_integral(k: int, T: float, cache: ZeroCache, cfg: PrecisionConfig = DEFAULT) -> dict:
    """Sum of Z(lambda)^(2k) over gaps up to T against k times the mixed_abs integral."""
    _require_cover(cache, T)
    gaps = cache.gaps_from_zeros_up_to(T)
    total = float(np.sum(np.array([g.z_lambda for g in gaps]) ** (2 * k)))
    res = continuous_moment(MomentSpec(k, "mixed_abs", T), cfg, cache)
    discrepancy = k * res.value - total
    return {"k": k, "T": T, "extrema_sum": total, "k_integral": k * res.value,
            "discrepancy": discrepancy, "relative": abs(discrepancy) / total,
            "quad_error": k * res.error}


# ---------------------------------------------------- continuous moment --

def continuous_moment(spec: MomentSpec, cfg: PrecisionConfig = DEFAULT,
                      cache: ZeroCache | None = None) -> MomentResult:
    """Integral over [t_min, t_max] of the integrand named by ``spec.kind``."""
    if spec.kind not in CONTINUOUS_KINDS:
        raise ValueError(f"{spec.kind!r} is not a continuous kind")
    if spec.kind in ("continuous_Zderiv", "continuous_zeta_deriv") and spec.ell > 4:
        raise ValueError("ell must be <= 4")
    if spec.kind == "mixed_abs" or cache is not None:
        _require_cover(cache, spec.t_max)
    vals, errs = line_integrals([(spec.kind, spec.k, spec.ell)], spec.t_min, spec.t_max, cfg, cache)
    value, error = float(vals[0].sum()), float(errs[0].sum())
    p = spec.exponent
    return MomentResult(spec, value, error, _normalize(value, spec.t_max, p), p)


# ------------------------------------------------------ windowed moment --

def gaussian_window(t, k: float, T: float):
    """w_k(t) = integral over [T, 2T] of exp(-2k (t - tau)^2) dtau, in erf form.

    The difference of error functions is taken as a difference of erfc
    values on the side where both arguments share a sign, which keeps
    relative accuracy in the tails.
    """
    t = np.asarray(t, dtype=float)
    r = math.sqrt(2 * k)
    a = r * (T - t)
    b = r * (2 * T - t)
    diff = np.where(
        a > 0, special.erfc(a) - special.erfc(b),
        np.where(b < 0, special.erfc(-b) - special.erfc(-a), special.erf(b) - special.erf(a)),
    )
    out = math.sqrt(math.pi / (8 * k)) * diff
    return out if out.ndim else float(out)


def _window_range(k: int, T: float) -> tuple[float, float]:
    h = 6 / math.sqrt(2 * k)
    return T - h, 2 * T + h


def windowed_moment(k: int, sigma: float, T: float, cfg: PrecisionConfig = DEFAULT) -> MomentResult:
    """J_k(sigma): integral of |zeta(sigma+it)|^(2k) w_k(t) over the window support."""
    if not 0.5 <= sigma <= 0.75:
        raise DomainError("sigma must lie in [1/2, 3/4]")
    if T < 2:
        raise DomainError("T must be >= 2")
    a, b = _window_range(k, T)

    def f(t):
        if sigma == 0.5:
            mag = np.abs(z_line(np.abs(t), cfg, derivative=False)[0])
        else:
            mag = np.abs(zeta(sigma + 1j * t, cfg))
        return mag ** (2 * k) * gaussian_window(t, k, T)

    lo = max(a, 0.0) if sigma == 0.5 else a
    edges = _edges(lo, b, None, max_width=0.5)
    if sigma == 0.5 and a < 0:
        edges = np.concatenate([_edges(a, 0.0, None, 0.5)[:-1], edges])
    res = integrate_intervals(f, edges[:-1], edges[1:], rel_tol=cfg.rel_tol, abs_tol=cfg.abs_floor)
    value, error = (float(x[0]) for x in res.total())
    spec = MomentSpec(k, "windowed", 2 * T, t_min=T, sigma=sigma)
    return MomentResult(spec, value, error, _normalize(value, T, spec.exponent), spec.exponent)


def convexity_ratio(k: int, sigma: float, T: float, cfg: PrecisionConfig = DEFAULT) -> dict:
    """J_k(sigma) / (T^(sigma-1/2) J_k(1/2)^(3/2-sigma)); report only."""
    j_half = windowed_moment(k, 0.5, T, cfg).value
    j_sig = windowed_moment(k, sigma, T, cfg).value
    ratio = j_sig / (T ** (sigma - 0.5) * j_half ** (1.5 - sigma))
    return {"k": k, "sigma": sigma, "T": T, "J_half": j_half, "J_sigma": j_sig, "ratio": ratio}


# ------------------------------------------------------ inequality suites --

def holder_chains(I: dict, k: int) -> list[InequalityCheck]:
    """The Hoelder chains as inequalities between component integrals.

    Keys of ``I``: ``Z2k`` (Z^2k), ``Zp2k`` (Z'^2k), ``abs`` (|Z' Z^(2k-1)|),
    ``sq`` (Z'^2 Z^(2k-2)), ``fourth`` (Z'^4 Z^(2k-4)).
    """
    if k < 2:
        raise ValueError("the chains need k >= 2")
    Z2k, Zp2k, A, S, F = I["Z2k"], I["Zp2k"], I["abs"], I["sq"], I["fourth"]
    return [
        InequalityCheck("holder_abs", A, Z2k ** ((2 * k - 1) / (2 * k)) * Zp2k ** (1 / (2 * k))),
        InequalityCheck("holder_square_step", S, F ** (1 / 3) * A ** (2 / 3)),
        InequalityCheck("holder_fourth", F, Zp2k ** (2 / k) * Z2k ** ((k - 2) / k)),
        InequalityCheck("holder_square_chain",
                        S, Zp2k ** (2 / (3 * k)) * Z2k ** ((k - 2) / (3 * k)) * A ** (2 / 3)),
        InequalityCheck("holder_square_alt",
                        S, Zp2k ** (3 / (4 * k)) * Z2k ** ((2 * k - 3) / (4 * k)) * A ** 0.5),
    ]


def holder_suite(k: int, T: float, cfg: PrecisionConfig = DEFAULT, cache: ZeroCache | None = None,
                 xi: int = 20) -> dict:
    """All Hoelder chains plus the Cauchy-Schwarz bound with a Dirichlet polynomial.

    Every integral runs over [1, T] on the same panels. The Cauchy-Schwarz
    check is |int Z1 zeta^(k-1) conj(A)|^2 <= int Z'^2 Z^(2k-2) * int |A|^2
    with A built from d_k and length ``xi``.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    _require_cover(cache, T)
    poly = DirichletPoly.build(k, xi)

    def extra(t):
        s = 0.5 + 1j * t
        A = eval_A(t, poly)
        w = Z1(s, cfg) * zeta(s, cfg) ** (k - 1) * np.conj(A)
        return [w.real, w.imag, np.abs(A) ** 2]

    comps = [("continuous_Z", k, 0), ("continuous_Zderiv", k, 1), ("mixed_abs", k, 0),
             ("mixed_square", k, 0), ("mixed_fourth", k, 0)]
    vals, errs = line_integrals(comps, T_MIN, T, cfg, cache, extra=extra)
    v = vals[:, 0]
    I = dict(zip(["Z2k", "Zp2k", "abs", "sq", "fourth"], v[:5]))
    checks = holder_chains(I, k)
    cross = complex(v[5], v[6])
    checks.append(InequalityCheck("cauchy_schwarz_dirichlet", abs(cross) ** 2, v[3] * v[7]))
    return {"k": k, "T": T, "xi": xi, "integrals": {**I, "A2": float(v[7])},
            "errors": [float(e) for e in errs[:, 0]], "checks": checks}


def disk_samples(R: float) -> np.ndarray:
    """Centre, 16 points on |alpha| = R and 8 staggered points on |alpha| = R/2."""
    outer = R * np.exp(2j * np.pi * np.arange(16) / 16)
    inner = 0.5 * R * np.exp(2j * np.pi * (np.arange(8) + 0.5) / 8)
    return np.concatenate([[0j], outer, inner])


def cauchy_lemma_check(k: int, ell: int, R: float, T: float, cfg: PrecisionConfig = DEFAULT) -> InequalityCheck:
    """Integral of |zeta^(l)|^2k on the line against the shifted-line bound.

    The maximum over the disk |alpha| <= R is taken over :func:`disk_samples`.
    """
    if not 0 < R < 0.5:
        raise DomainError("R must lie in (0, 1/2)")
    if k < 1 or ell < 0:
        raise ValueError("need k >= 1 and ell >= 0")
    alphas = disk_samples(R)

    def f(t):
        rows = [np.abs(zeta(0.5 + a + 1j * t, cfg)) ** (2 * k) for a in alphas]
        if ell > 0:
            rows.append(np.abs(zeta_deriv(0.5 + 1j * t, ell, cfg)) ** (2 * k))
        return np.vstack(rows)

    edges = np.linspace(0.0, T, int(math.ceil(T)) + 1)
    res = integrate_intervals(f, edges[:-1], edges[1:], rel_tol=cfg.rel_tol, abs_tol=cfg.abs_floor)
    vals, _ = res.total()
    lhs = float(vals[-1] if ell > 0 else vals[0])
    rhs = (math.factorial(ell) / R**ell) ** (2 * k) * float(vals[: alphas.size].max())
    return InequalityCheck(f"cauchy_lemma_k{k}_l{ell}", lhs, rhs, tol=CAUCHY_SAFETY)


# ------------------------------------------------------------ trends --

@dataclass
class TrendFit:
    kind: str
    k: int
    ell: int
    T_grid: np.ndarray
    values: np.ndarray
    ratios: np.ndarray
    p: int
    exponent: float
    slope_vs_logT: float

    @property
    def spread(self) -> float:
        return float(self.ratios.max() / self.ratios.min())

    @property
    def bounded(self) -> bool:
        return self.spread <= 4.0

    def within_epsilon(self, eps: float) -> bool:
        return abs(self.exponent - self.p) <= eps


def fit_series(T_grid, values, p: int, discrete: bool, kind: str = "", k: int = 0,
               ell: int = 0) -> TrendFit:
    """Ratio table and fitted exponents for a series of moments.

    ``exponent`` is the least-squares slope of log(value) (log(value/T) for
    integrals) against log log T; ``slope_vs_logT`` is the slope of the
    value itself against log T.
    """
    T = np.asarray(T_grid, dtype=float)
    v = np.asarray(values, dtype=float)
    if T.size < 3 or np.any(np.diff(T) <= 0):
        raise ValueError("need at least 3 increasing heights")
    L = np.log(T)
    ratios = np.array([_normalize(x, t, p, discrete) for x, t in zip(v, T)])
    y = np.log(v) if discrete else np.log(v / T)
    exponent = float(np.polyfit(np.log(L), y, 1)[0])
    slope = float(np.polyfit(L, v, 1)[0])
    return TrendFit(kind, k, ell, T, v, ratios, p, exponent, slope)


def trend_fit(kind: str, k: int, T_grid: Sequence[float], cache: ZeroCache,
              cfg: PrecisionConfig = DEFAULT, ell: int = 0) -> TrendFit:
    """Moments on a grid of heights; integrals are accumulated piecewise."""
    T = np.array(sorted(T_grid), dtype=float)
    _require_cover(cache, float(T[-1]))
    if kind in ("discrete", "discrete_max"):
        vals = [discrete_moment(k, t, cache).value for t in T]
        p = MomentSpec(k, "discrete_max", float(T[-1])).exponent
        return fit_series(T, vals, p, True, "discrete_max", k, ell)
    spec = MomentSpec(k, kind, float(T[-1]), ell=ell)
    cols, _ = line_integrals([(kind, k, ell)], T_MIN, float(T[-1]), cfg, cache, splits=T[:-1])
    vals = np.cumsum(cols[0])
    return fit_series(T, vals, spec.exponent, False, kind, k, ell)


# ------------------------------------------------------------ output --

CSV_FIELDS = ("kind", "k", "ell", "sigma", "t_min", "t_max", "value", "err", "normalized", "p")


def _num(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def results_csv(results: Sequence[MomentResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in results:
        row = r.row()
        w.writerow([row["kind"]] + [_num(row[f]) for f in CSV_FIELDS[1:]])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x):
            return float(format(x, ".17g"))
        return str(x)
    if isinstance(x, InequalityCheck):
        return _jsonable(x.as_dict())
    if hasattr(x, "__dataclass_fields__"):
        return _jsonable(asdict(x))
    return x


def results_json(results: Sequence[MomentResult], identities=(), inequalities=()) -> str:
    """JSON report: moment rows, identity residuals and inequality slacks."""
    doc = {
        "moments": [dict(r.row(), extra=r.extra) for r in results],
        "identity_residuals": list(identities),
        "inequality_slacks": list(inequalities),
    }
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
