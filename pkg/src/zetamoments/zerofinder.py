"""Critical-line zeros, the gaps between them, and the extremum in each gap.

Zeros are sign changes of Z on a grid whose step is an eighth of the local
mean spacing 2 pi / log(t / 2 pi). Close pairs that slip between two grid
points show up as a dip of |Z| without a sign change; such dips are
resolved by locating the critical point inside them. The census is
checked against the smooth zero-counting formula and rescanned on a finer
grid if it drifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import (
    DEFAULT,
    CacheFormatError,
    DomainError,
    MultipleCriticalPointError,
    PrecisionConfig,
    ZeroCountError,
)
from .evaluator import z_line

CACHE_VERSION = "v1"
AUDIT_POINTS = 64
MAX_SCAN_HEIGHT = 1.0e6


@dataclass(frozen=True)
class CriticalZero:
    index: int
    gamma: float
    refinement_residual: float


@dataclass(frozen=True)
class ZeroGap:
    """Consecutive ordinates gamma < gamma_plus and the extremum between them.

    ``lambda_`` and ``z_lambda`` are NaN until :func:`locate_extremum` fills
    them in.
    """

    gamma: float
    gamma_plus: float
    lambda_: float = math.nan
    z_lambda: float = math.nan
    sign: int = 0

    @property
    def completed(self) -> bool:
        return not math.isnan(self.lambda_)


@dataclass(frozen=True)
class CountAudit:
    T: float
    expected: int
    observed: int | None
    drift: int | None
    bound: float

    @property
    def ok(self) -> bool:
        return self.drift is None or abs(self.drift) <= self.bound


@dataclass
class ZeroCache:
    """Zeros in (0, t_max] with completed gaps between consecutive ones."""

    t_max: float
    zeros: list[CriticalZero]
    gaps: list[ZeroGap]
    tol: float = DEFAULT.abs_floor
    meta: dict = field(default_factory=dict)

    @property
    def gammas(self) -> np.ndarray:
        return np.array([z.gamma for z in self.zeros])

    def zeros_up_to(self, T: float) -> list[CriticalZero]:
        return [z for z in self.zeros if z.gamma <= T]

    def gaps_from_zeros_up_to(self, T: float) -> list[ZeroGap]:
        """Gaps whose lower ordinate is <= T (their upper one may exceed T)."""
        return [g for g in self.gaps if g.gamma <= T]

    def covers(self, T: float) -> bool:
        """True if every zero up to T has a completed gap above it."""
        n = len(self.zeros_up_to(T))
        return self.t_max >= T and len(self.gaps) >= n


# ------------------------------------------------------------ helpers --

def mean_spacing(t):
    """Average distance between consecutive ordinates near height t."""
    t = np.maximum(np.asarray(t, dtype=float), 10.0)
    return 2 * np.pi / np.log(t / (2 * np.pi))


def scan_grid(t0: float, t1: float, divisor: float = 8.0) -> np.ndarray:
    """Grid on [t0, t1] with step mean_spacing(t)/divisor."""
    pts = [t0]
    t = t0
    while t < t1:
        t = t + float(mean_spacing(t)) / divisor
        pts.append(min(t, t1))
    return np.unique(np.array(pts))


def refine_brackets(f: Callable, a, b, fa=None, fb=None, xtol: float = 1e-10,
                    maxiter: int = 200):
    """Vectorized Illinois regula falsi on sign-change brackets.

    Every bracket [a_i, b_i] must satisfy f(a_i) f(b_i) <= 0. Iterates until
    each bracket is narrower than ``xtol`` (bisecting whenever the false
    position step stalls) and returns the secant estimate inside the final
    bracket.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    fa = f(a) if fa is None else np.array(fa, dtype=float)
    fb = f(b) if fb is None else np.array(fb, dtype=float)
    if np.any(fa * fb > 0):
        raise ValueError("refine_brackets needs a sign change on every bracket")
    side = np.zeros(a.shape, dtype=int)
    width0 = b - a
    active = (b - a > xtol) & (fa != 0) & (fb != 0)
    for it in range(maxiter):
        if not np.any(active):
            break
        ia = np.flatnonzero(active)
        A, B, FA, FB = a[ia], b[ia], fa[ia], fb[ia]
        c = (A * FB - B * FA) / (FB - FA)
        stalled = (b[ia] - a[ia]) > 0.5 * width0[ia]
        bisect = ~np.isfinite(c) | (c <= A) | (c >= B) | ((it % 4 == 3) & stalled)
        c = np.where(bisect, 0.5 * (A + B), c)
        if it % 4 == 3:
            width0[ia] = b[ia] - a[ia]
        fc = f(c)
        same_b = np.sign(fc) == np.sign(FB)
        # c replaces b
        j = ia[same_b]
        a_fac = np.where(side[j] == -1, 0.5, 1.0)
        fa[j] *= a_fac
        b[j], fb[j], side[j] = c[same_b], fc[same_b], -1
        # c replaces a
        k = ia[~same_b]
        b_fac = np.where(side[k] == 1, 0.5, 1.0)
        fb[k] *= b_fac
        a[k], fa[k], side[k] = c[~same_b], fc[~same_b], 1
        hit = fc == 0
        a[ia[hit]] = b[ia[hit]] = c[hit]
        active[ia] = (b[ia] - a[ia] > xtol) & ~hit
    # secant point from unscaled end values
    fa_true, fb_true = f(a), f(b)
    denom = fb_true - fa_true
    with np.errstate(invalid="ignore", divide="ignore"):
        root = np.where(denom != 0, (a * fb_true - b * fa_true) / denom, 0.5 * (a + b))
    root = np.where((root >= a) & (root <= b), root, 0.5 * (a + b))
    return root


def _z(cfg):
    return lambda t: z_line(t, cfg, derivative=False)[0]


def _zp(cfg):
    return lambda t: z_line(t, cfg, derivative=True)[1]


def _close_pair_brackets(t, z, cfg):
    """Brackets for zero pairs hidden between grid points of one sign."""
    az = np.abs(z)
    i = np.flatnonzero(
        (np.sign(z[:-2]) == np.sign(z[1:-1]))
        & (np.sign(z[1:-1]) == np.sign(z[2:]))
        & (az[1:-1] < az[:-2])
        & (az[1:-1] < az[2:])
    ) + 1
    if i.size == 0:
        return []
    lo, hi = t[i - 1], t[i + 1]
    zp = _zp(cfg)
    dlo, dhi = zp(lo), zp(hi)
    out = []
    sc = dlo * dhi < 0
    if np.any(sc):
        crit = refine_brackets(zp, lo[sc], hi[sc], dlo[sc], dhi[sc], xtol=1e-12)
        zc = _z(cfg)(crit)
        flips = np.sign(zc) != np.sign(z[i][sc])
        for l, c, h in zip(lo[sc][flips], crit[flips], hi[sc][flips]):
            out.extend([(l, c), (c, h)])
    for l, h in zip(lo[~sc], hi[~sc]):
        # no single critical point: sample densely and take sign changes
        tt = np.linspace(l, h, 257)
        zz = _z(cfg)(tt)
        k = np.flatnonzero(zz[:-1] * zz[1:] < 0)
        out.extend(zip(tt[k], tt[k + 1]))
    return out


def _scan_window(args):
    t0, t1, divisor, cfg = args
    t = scan_grid(t0, t1, divisor)
    z = _z(cfg)(t)
    exact = np.flatnonzero(z[1:] == 0) + 1
    k = np.flatnonzero(z[:-1] * z[1:] < 0)
    brackets = list(zip(t[k], t[k + 1]))
    brackets += _close_pair_brackets(t, z, cfg)
    roots = list(t[exact])
    if brackets:
        lo = np.array([b[0] for b in brackets])
        hi = np.array([b[1] for b in brackets])
        roots += list(refine_brackets(_z(cfg), lo, hi, xtol=1e-12))
    # a zero sitting on t0 belongs to the window below
    return sorted(r for r in roots if t0 + 1e-9 < r <= t1)


# --------------------------------------------------------- operations --

def count_audit(T: float, observed: int | None = None) -> CountAudit:
    """Smooth zero count round(T/2pi log(T/2pi) - T/2pi + 7/8) and drift."""
    if T < 10:
        raise DomainError("count_audit needs T >= 10")
    x = T / (2 * math.pi)
    expected = int(round(x * math.log(x) - x + 7.0 / 8.0))
    drift = None if observed is None else observed - expected
    return CountAudit(T, expected, observed, drift, 2 * math.log(T))


def _window_audit(t0: float, t1: float, count: int) -> bool:
    if t1 < 10:
        return True
    expected = count_audit(t1).expected - (count_audit(t0).expected if t0 >= 10 else 0)
    bound = 2 * math.log(t1) + (2 * math.log(t0) if t0 >= 10 else 0.0)
    return abs(count - expected) <= bound


def _split_windows(t0: float, t1: float, pieces: int) -> list[tuple[float, float]]:
    if pieces <= 1:
        return [(t0, t1)]
    # equal expected zero counts per window
    grid = np.linspace(t0, t1, 4097)
    dens = 1.0 / mean_spacing(grid)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))])
    cuts = np.interp(np.linspace(0, cum[-1], pieces + 1), cum, grid)
    cuts[0], cuts[-1] = t0, t1
    return list(zip(cuts[:-1], cuts[1:]))


def scan_zeros(t0: float, t1: float, cfg: PrecisionConfig = DEFAULT, *,
               divisor: float = 8.0, workers: int = 1, pmap=None,
               index_offset: int | None = None) -> list[CriticalZero]:
    """All sign changes of Z in (t0, t1], refined to brackets below 1e-10.

    ``pmap`` is an optional map-like callable used to scan disjoint height
    windows in parallel (``workers`` windows). The merged census is audited
    against :func:`count_audit`; on disagreement the scan is repeated with a
    four times finer grid before :class:`ZeroCountError` is raised.
    """
    if not (0 <= t0 < t1 <= MAX_SCAN_HEIGHT):
        raise DomainError("need 0 <= t0 < t1 <= 1e6")
    mapper = pmap or map
    for attempt, div in enumerate((divisor, 4 * divisor)):
        windows = _split_windows(t0, t1, max(1, workers))
        parts = list(mapper(_scan_window, [(a, b, div, cfg) for a, b in windows]))
        roots = np.array(sorted(r for part in parts for r in part))
        if roots.size > 1:
            keep = np.concatenate([[True], np.diff(roots) > 1e-9])
            roots = roots[keep]
        if _window_audit(t0, t1, roots.size):
            break
    else:
        raise ZeroCountError(
            f"{roots.size} zeros in ({t0}, {t1}] disagrees with the N(T) audit"
        )
    resid = np.abs(_z(cfg)(roots)) if roots.size else np.array([])
    if index_offset is None:
        index_offset = _count_below(t0, cfg) if t0 > 0 else 0
    first = index_offset
    return [CriticalZero(first + i + 1, float(g), float(r))
            for i, (g, r) in enumerate(zip(roots, resid))]


def _count_below(t0: float, cfg: PrecisionConfig) -> int:
    """Number of zeros in (0, t0], by scanning."""
    return len(_scan_window((0.0, t0, 8.0, cfg)))


def enumerate_gaps(zeros: Sequence[CriticalZero], cfg: PrecisionConfig = DEFAULT) -> list[ZeroGap]:
    """Pair consecutive zeros into gaps and record the sign of Z inside."""
    g = np.array([z.gamma for z in zeros], dtype=float)
    if g.size < 2:
        return []
    if np.any(np.diff(g) <= 0):
        raise ValueError("zeros must be strictly increasing")
    mid = 0.5 * (g[:-1] + g[1:])
    sgn = np.sign(_z(cfg)(mid)).astype(int)
    return [ZeroGap(float(a), float(b), sign=int(s)) for a, b, s in zip(g[:-1], g[1:], sgn)]


def locate_extrema(gaps: Sequence[ZeroGap], cfg: PrecisionConfig = DEFAULT) -> list[ZeroGap]:
    """Fill in lambda and Z(lambda) for every gap (vectorized over gaps).

    lambda is the root of Z' bracketed by the two zeros; a 64-point audit
    grid inside each gap must show exactly one sign change of Z', and
    |Z(lambda)| must dominate |Z| on that grid.
    """
    if not gaps:
        return []
    lo = np.array([g.gamma for g in gaps])
    hi = np.array([g.gamma_plus for g in gaps])
    if np.any(hi <= lo):
        raise ValueError("degenerate gap")
    frac = np.linspace(0.0, 1.0, AUDIT_POINTS + 2)
    grid = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
    zg, zpg, _, _ = z_line(grid.ravel(), cfg)
    zg = zg.reshape(grid.shape)
    zpg = zpg.reshape(grid.shape)
    changes = np.sum(np.sign(zpg[:, :-1]) * np.sign(zpg[:, 1:]) < 0, axis=1)
    if np.any(changes != 1):
        bad = int(np.flatnonzero(changes != 1)[0])
        raise MultipleCriticalPointError(
            f"{changes[bad]} sign changes of Z' on gap ({lo[bad]:.10f}, {hi[bad]:.10f})"
        )
    # narrow each bracket to the audit cell holding the sign change
    j = np.argmax(np.sign(zpg[:, :-1]) * np.sign(zpg[:, 1:]) < 0, axis=1)
    rows = np.arange(len(gaps))
    a, b = grid[rows, j], grid[rows, j + 1]
    lam = refine_brackets(_zp(cfg), a, b, zpg[rows, j], zpg[rows, j + 1], xtol=1e-13)
    zl = _z(cfg)(lam)
    below = np.abs(zl) < np.abs(zg).max(axis=1) - 100 * cfg.abs_floor * (1 + np.abs(zl))
    if np.any(below):
        bad = int(np.flatnonzero(below)[0])
        raise MultipleCriticalPointError(f"|Z(lambda)| below grid maximum on gap {bad}")
    return [replace(g, lambda_=float(l), z_lambda=float(v), sign=int(np.sign(v)))
            for g, l, v in zip(gaps, lam, zl)]


def locate_extremum(gap: ZeroGap, cfg: PrecisionConfig = DEFAULT) -> ZeroGap:
    return locate_extrema([gap], cfg)[0]


def initial_critical_points(gamma1: float, cfg: PrecisionConfig = DEFAULT) -> list[tuple[float, float]]:
    """Zeros of Z' in (0, gamma_1), excluding t = 0, with Z there.

    Z is even, so Z'(0) = 0; the scan starts just above the origin.
    """
    t = np.linspace(0.05, gamma1 - 1e-6, 2000)
    zp = _zp(cfg)(t)
    k = np.flatnonzero(zp[:-1] * zp[1:] < 0)
    if k.size == 0:
        return []
    lam = refine_brackets(_zp(cfg), t[k], t[k + 1], zp[k], zp[k + 1], xtol=1e-13)
    return [(float(l), float(v)) for l, v in zip(lam, _z(cfg)(lam))]


# -------------------------------------------------------------- cache --

def build_cache(t_max: float, cfg: PrecisionConfig = DEFAULT, *, workers: int = 1,
                pmap=None) -> ZeroCache:
    """Scan (0, t_max] and keep scanning until one zero above t_max is found,
    so every zero up to t_max has a completed gap."""
    zeros = scan_zeros(0.0, t_max, cfg, workers=workers, pmap=pmap)
    return _close_cache(ZeroCache(t_max, zeros, [], cfg.abs_floor), cfg)


def _close_cache(cache: ZeroCache, cfg: PrecisionConfig) -> ZeroCache:
    """Scan past t_max until one further zero exists, then fill gaps."""
    zeros = list(cache.zeros)
    top = cache.t_max
    while not zeros or zeros[-1].gamma <= cache.t_max:
        hi = top + 2 * float(mean_spacing(top))
        more = _scan_window((top, hi, 8.0, cfg))
        resid = np.abs(_z(cfg)(np.array(more))) if more else []
        zeros += [CriticalZero(len(zeros) + i + 1, float(g), float(r))
                  for i, (g, r) in enumerate(zip(more, resid))]
        top = hi
    new_gaps = enumerate_gaps(zeros[len(cache.gaps):], cfg)
    gaps = list(cache.gaps) + locate_extrema(new_gaps, cfg)
    return ZeroCache(zeros[-1].gamma, zeros, gaps, cache.tol, dict(cache.meta))


def extend_cache(cache: ZeroCache, t_max: float, cfg: PrecisionConfig = DEFAULT, *,
                 workers: int = 1, pmap=None) -> ZeroCache:
    """Scan (cache.t_max, t_max] and append, keeping the existing prefix."""
    if t_max <= cache.t_max:
        return cache
    more = scan_zeros(cache.t_max, t_max, cfg, workers=workers, pmap=pmap,
                      index_offset=len(cache.zeros))
    zeros = list(cache.zeros) + more
    return _close_cache(ZeroCache(t_max, zeros, list(cache.gaps), cache.tol, dict(cache.meta)), cfg)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def save_cache(cache: ZeroCache, path) -> None:
    """Write the line-oriented text format (17 significant digits, LF)."""
    lines = [f"#zeta-zero-cache {CACHE_VERSION} tmax={_fmt(cache.t_max)} tol={_fmt(cache.tol)}"]
    for i, z in enumerate(cache.zeros):
        if i < len(cache.gaps):
            g = cache.gaps[i]
            lines.append(",".join([str(z.index), _fmt(g.gamma), _fmt(g.gamma_plus),
                                   _fmt(g.lambda_), _fmt(g.z_lambda)]))
        else:
            lines.append(f"{z.index},{_fmt(z.gamma)},,,")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_cache(path, cfg: PrecisionConfig = DEFAULT) -> ZeroCache:
    """Read a cache written by :func:`save_cache`.

    Zero residuals |Z(gamma)| are not stored and are recomputed.
    """
    text = Path(path).read_text(encoding="utf-8")
    if not text.endswith("\n"):
        raise CacheFormatError("truncated cache file (no final newline)")
    lines = text.split("\n")[:-1]
    if not lines or not lines[0].startswith("#zeta-zero-cache "):
        raise CacheFormatError("missing cache header")
    head = lines[0].split()
    if len(head) != 4 or head[1] != CACHE_VERSION:
        raise CacheFormatError(f"unsupported cache version {head[1] if len(head) > 1 else '?'}")
    try:
        t_max = float(head[2].removeprefix("tmax="))
        tol = float(head[3].removeprefix("tol="))
    except ValueError as exc:
        raise CacheFormatError("bad header fields") from exc
    gammas, gaps = [], []
    partial_seen = False
    for n, line in enumerate(lines[1:], start=1):
        fields = line.split(",")
        if len(fields) != 5 or partial_seen:
            raise CacheFormatError(f"malformed record on line {n + 1}")
        try:
            idx = int(fields[0])
            gamma = float(fields[1])
        except ValueError as exc:
            raise CacheFormatError(f"malformed record on line {n + 1}") from exc
        if idx != n:
            raise CacheFormatError(f"non-contiguous index on line {n + 1}")
        gammas.append(gamma)
        if fields[2] == "":
            partial_seen = True
            continue
        try:
            gp, lam, zl = (float(x) for x in fields[2:])
        except ValueError as exc:
            raise CacheFormatError(f"malformed record on line {n + 1}") from exc
        gaps.append(ZeroGap(gamma, gp, lam, zl, int(np.sign(zl))))
    for g, nxt in zip(gaps, gammas[1:]):
        if g.gamma_plus != nxt:
            raise CacheFormatError("gap upper ordinate does not match the next zero")
    if len(gaps) == len(gammas) and gammas:
        raise CacheFormatError("truncated cache file (last gap has no closing zero)")
    resid = np.abs(_z(cfg)(np.array(gammas))) if gammas else []
    zeros = [CriticalZero(i + 1, g, float(r)) for i, (g, r) in enumerate(zip(gammas, resid))]
    return ZeroCache(t_max, zeros, gaps, tol)
