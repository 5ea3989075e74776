"""Batched adaptive Gauss-Legendre quadrature.

Many intervals are integrated at once: every active panel is evaluated
with a 15-point rule as a whole and as two halves, and panels whose two
estimates disagree are bisected. All nodes of one sweep go to the
integrand in a single vectorized call, which matters because the
integrands here (powers of Z and Z') are expensive per call but cheap per
point.

The integrand may be vector valued: ``f(t)`` returns shape ``(m, len(t))``
and every component is integrated over the same panels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import QuadratureError

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)


@dataclass
class QuadResult:
    """Per-interval integrals and error estimates, each of shape (m, n_intervals)."""

    values: np.ndarray
    errors: np.ndarray
    evaluations: int

    def total(self):
        return self.values.sum(axis=1), self.errors.sum(axis=1)


def _as_2d(y, npts):
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[None, :]
    if y.shape[-1] != npts:
        raise ValueError("integrand returned the wrong number of points")
    return y


def _rule(f, lo, hi):
    """15-point Gauss-Legendre on each [lo_i, hi_i]; returns (m, len(lo))."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    t = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    y = _as_2d(f(t), t.size).reshape(-1, lo.size, _NODES.size)
    return (y * _WEIGHTS).sum(axis=2) * half


def integrate_intervals(f, a, b, rel_tol: float = 1e-10, abs_tol: float = 0.0,
                        max_depth: int = 40, strict: bool = True) -> QuadResult:
    """Integrate ``f`` over each interval [a_i, b_i].

    A panel is accepted when the whole-panel and two-half-panel estimates
    differ by at most ``max(rel_tol * |I|, abs_tol * width / interval_width)``
    in every component, where ``I`` is the running estimate for the whole
    interval scaled to the panel width. The reported error is that
    difference summed over panels.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ValueError("a and b must have the same shape")
    if np.any(b < a):
        raise ValueError("intervals must satisfy a <= b")
    nint = a.size
    width_total = np.where(b > a, b - a, 1.0)

    whole = _rule(f, a, b)
    m = whole.shape[0]
    values = np.zeros((m, nint))
    errors = np.zeros((m, nint))
    scale = np.abs(whole)

    lo, hi, owner, depth = a.copy(), b.copy(), np.arange(nint), np.zeros(nint, dtype=int)
    evaluations = 15 * nint
    while lo.size:
        mid = 0.5 * (lo + hi)
        halves = _rule(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]))
        evaluations += 30 * lo.size
        left, right = halves[:, : lo.size], halves[:, lo.size:]
        fine = left + right
        diff = np.abs(fine - whole)
        frac = (hi - lo) / width_total[owner]
        tol = np.maximum(rel_tol * np.maximum(np.abs(fine), scale[:, owner] * frac),
                         abs_tol * frac)
        ok = np.all(diff <= tol, axis=0) | (hi - lo <= 0)
        give_up = ~ok & (depth >= max_depth)
        if np.any(give_up) and strict:
            raise QuadratureError(
                f"quadrature did not converge on {int(give_up.sum())} panel(s) near "
                f"t = {lo[give_up][0]:.6g}"
            )
        done = ok | give_up
        for c in range(m):
            np.add.at(values[c], owner[done], fine[c, done])
            np.add.at(errors[c], owner[done], diff[c, done])
        keep = ~done
        if not np.any(keep):
            break
        lo, hi, owner, depth = (
            np.concatenate([lo[keep], mid[keep]]),
            np.concatenate([mid[keep], hi[keep]]),
            np.concatenate([owner[keep], owner[keep]]),
            np.concatenate([depth[keep] + 1, depth[keep] + 1]),
        )
        whole = np.concatenate([left[:, keep], right[:, keep]], axis=1)
    return QuadResult(values, errors, evaluations)


def integrate(f, a: float, b: float, rel_tol: float = 1e-10, abs_tol: float = 0.0,
              breakpoints=None, panel_width: float | None = None):
    """Integrate a scalar or vector integrand over [a, b].

    ``breakpoints`` (sorted, inside (a, b)) are forced panel edges, used
    for kinks; ``panel_width`` additionally chops the range into panels no
    wider than that. Returns ``(value, error)`` arrays of shape (m,).
    """
    edges = [a, b]
    if breakpoints is not None:
        bp = np.asarray(breakpoints, dtype=float)
        edges = np.concatenate([[a], bp[(bp > a) & (bp < b)], [b]])
    edges = np.asarray(edges, dtype=float)
    if panel_width is not None:
        pieces = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            n = max(1, int(np.ceil((hi - lo) / panel_width)))
            pieces.append(np.linspace(lo, hi, n + 1)[:-1])
        edges = np.concatenate(pieces + [[b]])
    res = integrate_intervals(f, edges[:-1], edges[1:], rel_tol=rel_tol, abs_tol=abs_tol)
    return res.total()
