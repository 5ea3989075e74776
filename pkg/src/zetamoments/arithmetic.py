"""Divisor functions, their log-weighted variant, and Dirichlet polynomials.

d_k(n) counts ordered factorizations of n into k positive integers and is
built by k-1 exact integer convolutions with the constant function 1.
The log-weighted coefficients d~_k = d_{k-1} * log are the Dirichlet
coefficients of -zeta' zeta^(k-1).

Arrays are indexed by n directly: element 0 is an unused zero.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .config import DEFAULT, PrecisionConfig, QuadratureError
from .quadrature import integrate

MAX_XI = 10_000_000
MAX_K = 6
DEFAULT_THETA = 0.25


@dataclass
class DivisorTable:
    k: int
    xi: int
    dk: np.ndarray
    dk_tilde: np.ndarray | None = None

    def __post_init__(self):
        if self.dk.shape != (self.xi + 1,):
            raise ValueError("dk must have length xi + 1")


def _convolve_with_one(prev: np.ndarray) -> np.ndarray:
    """(prev * 1)(n) = sum_{d | n} prev(d), exactly, for n <= len(prev)-1."""
    xi = prev.size - 1
    out = np.zeros_like(prev)
    r = math.isqrt(xi)
    for d in range(1, r + 1):
        out[d::d] += prev[d]
    # divisors above sqrt(xi): each multiple j*d has j < sqrt(xi)
    for j in range(1, xi // (r + 1) + 1):
        d = np.arange(r + 1, xi // j + 1)
        out[j * d] += prev[d]
    return out


def sieve_dk(k: int, xi: int) -> DivisorTable:
    """Exact d_k(n) for 1 <= n <= xi."""
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must lie in 1..{MAX_K}")
    if not 1 <= xi <= MAX_XI:
        raise ValueError(f"xi must lie in 1..{MAX_XI}")
    dk = np.ones(xi + 1, dtype=np.int64)
    dk[0] = 0
    for _ in range(k - 1):
        dk = _convolve_with_one(dk)
        if dk.max() > 2**62:
            raise OverflowError("d_k values exceed 64-bit range")
    return DivisorTable(k, xi, dk)


def compute_dk_tilde(table: DivisorTable) -> DivisorTable:
    """Fill d~_k(n) = sum_{d | n} d_{k-1}(d) log(n/d); d_0 is the unit."""
    xi, k = table.xi, table.k
    if k == 1:
        prev = np.zeros(xi + 1, dtype=np.int64)
        prev[1] = 1
    else:
        prev = sieve_dk(k - 1, xi).dk
    prevf = prev.astype(float)
    logs = np.log(np.maximum(np.arange(xi + 1, dtype=float), 1.0))
    tilde = np.zeros(xi + 1)
    r = math.isqrt(xi)
    # pairs (d, m) with d*m = n, weight prev(d) log(m)
    for m in range(2, r + 1):
        tilde[m::m] += logs[m] * prevf[1: xi // m + 1]
    for d in range(1, xi // (r + 1) + 1):
        if prev[d] == 0:
            continue
        m = np.arange(r + 1, xi // d + 1)
        tilde[d * m] += prevf[d] * logs[m]
    table.dk_tilde = tilde
    return table


def write_table_csv(table: DivisorTable, path) -> None:
    """Dump ``n,dk,dk_tilde`` rows (dk_tilde blank if not computed)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "dk", "dk_tilde"])
        for n in range(1, table.xi + 1):
            tilde = "" if table.dk_tilde is None else format(table.dk_tilde[n], ".17g")
            w.writerow([n, int(table.dk[n]), tilde])


# ------------------------------------------------------ partial sums --

class PartialSum(NamedTuple):
    value: float
    normalized: float


def _table(k: int, xi: int, table: DivisorTable | None) -> np.ndarray:
    if table is not None:
        if table.k != k or table.xi < xi:
            raise ValueError("table does not match (k, xi)")
        return table.dk[: xi + 1]
    return sieve_dk(k, xi).dk


def partial_sum_dk2_over_n(k: int, xi: int, table: DivisorTable | None = None) -> float:
    """sum_{n <= xi} d_k(n)^2 / n, correctly rounded (math.fsum)."""
    dk = _table(k, xi, table).astype(float)
    n = np.arange(1, xi + 1, dtype=float)
    return math.fsum(dk[1:] ** 2 / n)


def partial_sum_dk2(k: int, xi: int, table: DivisorTable | None = None) -> PartialSum:
    """sum_{n <= xi} d_k(n)^2 and its ratio to xi (log xi)^(k^2-1)."""
    dk = _table(k, xi, table)
    value = float(sum(int(v) ** 2 for v in dk[1:])) if xi < 10_000 else math.fsum(
        dk[1:].astype(float) ** 2)
    denom = xi * math.log(xi) ** (k * k - 1) if xi > 1 else math.nan
    return PartialSum(value, value / denom if xi > 1 else math.nan)


@dataclass
class PartialSumFit:
    """Growth fit of S(xi) = sum_{n<=xi} d_k(n)^2/n.

    ``exponent`` and ``loglog_intercept`` come from least squares of
    log S against log log xi. ``C_k`` is the leading coefficient of a
    least-squares polynomial in log xi of degree k^2 (or of the two leading
    terms when the grid is too short), which is the shape of the known
    asymptotic expansion and so is not biased by the secondary term.
    """

    k: int
    xi_grid: np.ndarray
    sums: np.ndarray
    exponent: float
    loglog_intercept: float
    C_k: float
    target_exponent: int
    residuals: np.ndarray = field(repr=False)


def fit_Ck(k: int, xi_grid: Sequence[int]) -> PartialSumFit:
    """Estimate C_k and the growth exponent from partial sums on a grid."""
    grid = np.array(sorted(set(int(x) for x in xi_grid)), dtype=np.int64)
    if grid.size < 6 or grid[0] < 3:
        raise ValueError("need at least 6 distinct grid points, all >= 3")
    dk = sieve_dk(k, int(grid[-1])).dk.astype(float)
    n = np.arange(grid[-1] + 1, dtype=float)
    n[0] = 1.0
    terms = dk**2 / n
    terms[0] = 0.0
    sums = []
    running = 0.0
    prev = 0
    for x in grid:
        running = math.fsum([running, math.fsum(terms[prev + 1: x + 1])])
        sums.append(running)
        prev = int(x)
    sums = np.array(sums)
    if np.any(np.diff(sums) <= 0):
        raise ValueError("partial sums are not increasing on this grid")
    L = np.log(grid.astype(float))
    X = np.log(L)
    Y = np.log(sums)
    slope, intercept = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + intercept)
    deg = k * k
    if grid.size >= deg + 2:
        coefs = np.polynomial.polynomial.polyfit(L, sums, deg)
        C = float(coefs[-1])
    else:
        # S / L^(deg-1) = C L + D
        C = float(np.polyfit(L, sums / L ** (deg - 1), 1)[0])
    return PartialSumFit(k, grid, sums, float(slope), float(intercept), C, deg, resid)


def predicted_Ck(k: int, primes_up_to: int = 100_000) -> float:
    """Euler-product value of C_k, truncated at ``primes_up_to``.

    C_k = prod_p (1-1/p)^(k^2) sum_j d_k(p^j)^2 p^-j / Gamma(k^2 + 1).
    """
    sieve = np.ones(primes_up_to + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(primes_up_to) + 1):
        if sieve[p]:
            sieve[p * p:: p] = False
    logprod = 0.0
    for p in np.flatnonzero(sieve):
        x = 1.0 / p
        local = math.fsum(math.comb(j + k - 1, j) ** 2 * x**j for j in range(60))
        logprod += k * k * math.log1p(-x) + math.log(local)
    return math.exp(logprod) / math.gamma(k * k + 1)


# -------------------------------------------------- Dirichlet polynomial --

@dataclass
class DirichletPoly:
    """A(t) = sum_{n <= xi} d_k(n) n^(-1/2 - it)."""

    k: int
    xi: int
    theta_exponent: float | None
    coefficients: np.ndarray  # d_k(n)/sqrt(n), n = 1..xi
    dk: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.xi < 1:
            raise ValueError("xi must be positive")
        self._logn = np.log(np.arange(1, self.xi + 1, dtype=float))

    @classmethod
    def build(cls, k: int, xi: int, theta_exponent: float | None = None) -> "DirichletPoly":
        dk = sieve_dk(k, xi).dk[1:]
        coef = dk / np.sqrt(np.arange(1, xi + 1, dtype=float))
        return cls(k, xi, theta_exponent, coef, dk)

    @classmethod
    def for_height(cls, k: int, T: float, theta_exponent: float = DEFAULT_THETA) -> "DirichletPoly":
        """Length xi = floor(T^theta), at least 2."""
        xi = max(2, int(math.floor(T**theta_exponent)))
        return cls.build(k, xi, theta_exponent)

    @property
    def diagonal(self) -> float:
        """sum_{n<=xi} d_k(n)^2 / n."""
        return math.fsum(self.coefficients**2)


def eval_A(t, poly: DirichletPoly, chunk: int = 2_000_000):
    """A(t) for scalar or array t."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(t_arr.shape, dtype=complex)
    rows = max(1, chunk // poly.xi)
    for start in range(0, t_arr.size, rows):
        tt = t_arr[start:start + rows]
        phase = np.multiply.outer(tt, poly._logn)
        out[start:start + rows] = (poly.coefficients * np.exp(-1j * phase)).sum(axis=1)
    return out[0] if np.ndim(t) == 0 else out


@dataclass
class MeanValueReport:
    integral: float
    main_term: float
    rel_deviation: float
    quad_error: float
    offdiag_scale: float
    measured_C: float


def mean_square_exact(poly: DirichletPoly, T: float) -> float:
    """Closed-form integral of |A|^2 over [0, T] (double sum)."""
    c = poly.coefficients
    L = poly._logn
    diff = L[:, None] - L[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        off = np.where(diff != 0, np.sin(T * diff) / np.where(diff != 0, diff, 1.0), 0.0)
    cc = np.outer(c, c)
    return T * float(np.sum(c**2)) + float(np.sum(cc * off))


def mv_meanvalue_check(poly: DirichletPoly, T: float, cfg: PrecisionConfig = DEFAULT) -> MeanValueReport:
    """Quadrature of |A(t)|^2 on [0, T] against the diagonal T sum d_k(n)^2/n."""
    if T < 10 * poly.xi:
        raise ValueError("need T >= 10 xi")
    width = min(1.0, 2 * math.pi / max(math.log(poly.xi), 1.0) / 4)

    def f(t):
        return np.abs(eval_A(t, poly)) ** 2

    try:
        val, err = integrate(f, 0.0, T, rel_tol=max(cfg.rel_tol, 1e-12), panel_width=width)
    except QuadratureError:
        raise
    integral = float(val[0])
    main = T * poly.diagonal
    scale = float(np.sum(poly.dk.astype(float) ** 2))
    return MeanValueReport(
        integral=integral,
        main_term=main,
        rel_deviation=abs(integral - main) / main,
        quad_error=float(err[0]),
        offdiag_scale=scale,
        measured_C=abs(integral - main) / scale,
    )
