"""Complex gamma-family helpers and overflow-safe trigonometry.

Log-gamma and digamma come from :mod:`scipy.special`; higher polygammas
for complex arguments are not available there and are computed here by
upward recurrence followed by the Stirling-type asymptotic series.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

# B_2 .. B_30 as floats; index j holds B_{2j}
BERNOULLI_EVEN = special.bernoulli(30)[::2].astype(float)

_SHIFT_RADIUS = 18.0
_ASYMPTOTIC_TERMS = 12


def loggamma(z):
    """Principal branch of log Gamma, continuous off the negative real axis."""
    return special.loggamma(np.asarray(z, dtype=complex))


def polygamma(m: int, z):
    """Polygamma function psi^(m)(z) for complex ``z`` and ``m >= 0``."""
    z = np.asarray(z, dtype=complex)
    if m == 0:
        return special.psi(z)
    fact = math.factorial(m)
    sign = (-1.0) ** (m + 1)
    z = z.copy()
    acc = np.zeros_like(z)
    # psi^(m)(z) = psi^(m)(z+1) - (-1)^m m! / z^(m+1)
    need = np.abs(z) < _SHIFT_RADIUS
    while np.any(need):
        acc[need] += sign * fact / z[need] ** (m + 1)
        z[need] += 1.0
        need = np.abs(z) < _SHIFT_RADIUS
    inv = 1.0 / z
    series = math.factorial(m - 1) * inv**m + 0.5 * fact * inv ** (m + 1)
    for j in range(1, _ASYMPTOTIC_TERMS + 1):
        coef = BERNOULLI_EVEN[j] * math.factorial(2 * j + m - 1) / math.factorial(2 * j)
        series = series + coef * inv ** (2 * j + m)
    return acc + sign * series


def log_sin(z):
    """A logarithm of sin(z) that stays finite for large |Im z|.

    The branch is not the principal one; only ``exp(log_sin(z))`` is
    meaningful.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    up = z.imag >= 0
    # Im z >= 0: sin z = (i/2) e^{-iz} (1 - e^{2iz})
    zu = z[up]
    out[up] = np.log(0.5j) - 1j * zu + np.log1p(-np.exp(2j * zu))
    zd = z[~up]
    out[~up] = np.log(-0.5j) + 1j * zd + np.log1p(-np.exp(-2j * zd))
    return out
