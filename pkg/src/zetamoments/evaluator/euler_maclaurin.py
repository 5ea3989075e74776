"""Euler-Maclaurin evaluation of zeta(s) and its s-derivatives.

zeta(s) = sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2
          + sum_{j=1}^{m} B_2j/(2j)! * s(s+1)...(s+2j-2) * N^(-s-2j+1) + R

Every term is differentiated exactly in s, so the same routine yields
zeta^(l) for small l. Points are sorted by height and processed in chunks
that share one truncation N, which keeps the work a dense matrix product.
"""

from __future__ import annotations

import math

import numpy as np

from ..config import PrecisionConfig, PoleProximityError, RangeError
from ._special import BERNOULLI_EVEN

BERNOULLI_TERMS = 10  # corrections through B_20
MAX_HEIGHT = 1.0e6
POLE_RADIUS = 1.0e-8
_CHUNK_ELEMENTS = 2_000_000
_EPS = np.finfo(float).eps

_poly = np.polynomial.polynomial


def _rising_polys(m: int) -> list[np.ndarray]:
    """Ascending coefficients of s(s+1)...(s+2j-2) for j = 1..m+1."""
    out = []
    for j in range(1, m + 2):
        out.append(_poly.polyfromroots(-np.arange(2 * j - 1, dtype=float)))
    return out


_RISING = _rising_polys(BERNOULLI_TERMS)
_BCOEF = np.array(
    [BERNOULLI_EVEN[j] / math.factorial(2 * j) for j in range(1, BERNOULLI_TERMS + 2)]
)


def initial_terms(t) -> np.ndarray:
    """Starting truncation 2*ceil(|t|) + 16."""
    return 2 * np.ceil(np.abs(t)).astype(np.int64) + 16


def _tail_and_remainder(s: np.ndarray, N: int, ell: int):
    """Closed-form part of the expansion at truncation N, and |R| estimate."""
    logN = math.log(N)
    Ns = np.exp(-s * logN)  # N^-s
    sm1 = s - 1.0
    # N^(1-s)/(s-1), Leibniz over N^(1-s) and (s-1)^-1
    integral = np.zeros_like(s)
    for j in range(ell + 1):
        g = (-1.0) ** j * math.factorial(j) / sm1 ** (j + 1)
        integral += math.comb(ell, j) * (-logN) ** (ell - j) * g
    integral *= N * Ns
    half = 0.5 * (-logN) ** ell * Ns
    corr = np.zeros_like(s)
    for j in range(1, BERNOULLI_TERMS + 1):
        P = _RISING[j - 1]
        acc = np.zeros_like(s)
        for i in range(min(ell, len(P) - 1) + 1):
            dP = _poly.polyval(s, _poly.polyder(P, i)) if i else _poly.polyval(s, P)
            acc += math.comb(ell, i) * dP * (-logN) ** (ell - i)
        corr += _BCOEF[j - 1] * acc * Ns * float(N) ** (-2 * j + 1)
    # first omitted term, scaled as in the standard remainder bound
    m = BERNOULLI_TERMS
    nxt = np.abs(_BCOEF[m] * _poly.polyval(s, _RISING[m]) * Ns) * float(N) ** (-2 * m - 1)
    nxt = nxt * np.abs(s + 2 * m + 1) / np.maximum(s.real + 2 * m + 1, 1.0)
    nxt = nxt * max(1.0, logN) ** ell * (1 + ell)
    return integral + half + corr, nxt


def _chunk_eval(s: np.ndarray, N: int, ell: int):
    n = np.arange(1, N, dtype=float)
    logn = np.log(n)
    terms = np.exp(np.multiply.outer(-s, logn))
    if ell:
        terms *= (-logn) ** ell
    # numpy reduces the contiguous axis pairwise
    main = terms.sum(axis=1)
    tail, rem = _tail_and_remainder(s, N, ell)
    # each phase t*log n carries ~|t| log N ulps; errors add in quadrature
    scale = np.sqrt((terms.real**2 + terms.imag**2).sum(axis=1))
    rounding = 8.0 * _EPS * (1.0 + np.abs(s.imag) * math.log(N)) * scale
    return main + tail, rem, rounding


def _chunks(Nsorted: np.ndarray):
    """Split sorted truncations so each chunk's matrix stays bounded."""
    start = 0
    size = Nsorted.size
    while start < size:
        window = Nsorted[start:start + _CHUNK_ELEMENTS // 16]
        counts = np.arange(1, window.size + 1)
        fits = np.flatnonzero(window * counts <= _CHUNK_ELEMENTS)
        stop = start + (int(fits[-1]) + 1 if fits.size else 1)
        yield start, stop
        start = stop


def _check(s: np.ndarray) -> None:
    if np.any(np.abs(s - 1.0) < POLE_RADIUS):
        raise PoleProximityError("zeta evaluated within 1e-8 of the pole at s = 1")
    if np.any(np.abs(s.imag) > MAX_HEIGHT):
        raise RangeError(f"|t| above supported height {MAX_HEIGHT:g}")
    if not np.all(np.isfinite(s)):
        raise ValueError("non-finite argument")


def zeta_em(s, ell: int = 0, cfg: PrecisionConfig | None = None):
    """Vectorized zeta^(ell)(s) by Euler-Maclaurin.

    Returns ``(values, err_est)`` with the shape of ``s``. The truncation
    starts at 2*ceil(|t|)+16 and is doubled for any point whose remainder
    estimate exceeds ``rel_tol*(1+|zeta|)``.
    """
    cfg = cfg or PrecisionConfig()
    s_in = np.asarray(s, dtype=complex)
    flat = s_in.ravel()
    _check(flat)
    out = np.empty_like(flat)
    err = np.empty(flat.shape, dtype=float)
    order = np.argsort(np.abs(flat.imag), kind="stable")
    Nsorted = initial_terms(flat.imag)[order]
    for start, stop in _chunks(Nsorted):
        N = int(Nsorted[stop - 1])
        idx = order[start:stop]
        val, rem, rnd = _chunk_eval(flat[idx], N, ell)
        bad = rem > cfg.rel_tol * (1.0 + np.abs(val))
        Nd = N
        while np.any(bad) and 2 * Nd <= cfg.max_terms:
            Nd *= 2
            sub = np.flatnonzero(bad)
            val[sub], rem[sub], rnd[sub] = _chunk_eval(flat[idx[sub]], Nd, ell)
            bad[sub] = rem[sub] > cfg.rel_tol * (1.0 + np.abs(val[sub]))
        out[idx] = val
        err[idx] = rem + rnd
    return out.reshape(s_in.shape), err.reshape(s_in.shape)
