"""Public evaluation routines: zeta, chi, theta, Z and their derivatives.

All functions accept scalars or array-likes; scalar inputs give scalar
outputs. Complex arguments may be given as Python complex numbers or as
:class:`ComplexPoint`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..config import (
    DEFAULT,
    ChiOverflowError,
    DomainError,
    PrecisionConfig,
    RangeError,
)
from . import riemann_siegel as rs
from ._special import loggamma, polygamma
from .euler_maclaurin import MAX_HEIGHT, POLE_RADIUS, zeta_em

RS_THRESHOLD = 200.0
LOG_PI = math.log(math.pi)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ComplexPoint:
    sigma: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and math.isfinite(self.t)):
            raise ValueError("ComplexPoint must be finite")

    def __complex__(self) -> complex:
        return complex(self.sigma, self.t)

    @classmethod
    def on_line(cls, t: float) -> "ComplexPoint":
        return cls(0.5, t)


@dataclass(frozen=True)
class ZEvaluation:
    """Z(t) together with Z'(t), theta(t) and an error estimate.

    ``imag_residue`` is the imaginary part left over when e^{i theta}
    zeta(1/2+it) is formed explicitly; it is zero on the Riemann-Siegel path.
    """

    t: float
    z: float
    z_prime: float
    theta: float
    err_est: float
    imag_residue: float = 0.0


def _as_s(s):
    if isinstance(s, ComplexPoint):
        return complex(s)
    return np.asarray(s, dtype=complex) if not np.isscalar(s) else complex(s)


def _out(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


# ---------------------------------------------------------------- zeta --

def zeta(s, cfg: PrecisionConfig = DEFAULT, return_error: bool = False):
    """Riemann zeta-function by Euler-Maclaurin summation."""
    val, err = zeta_em(_as_s(s), 0, cfg)
    return (_out(val), _out(err)) if return_error else _out(val)


def zeta_deriv(s, ell: int, cfg: PrecisionConfig = DEFAULT, return_error: bool = False):
    """ell-th derivative of zeta for 0 <= ell <= 4.

    Orders up to 2 differentiate the Euler-Maclaurin terms; orders 3 and 4
    use trapezoidal Cauchy quadrature on a circle of radius
    0.25/log(|t|+2) around ``s``.
    """
    if not 0 <= ell <= 4:
        raise ValueError("ell must lie in 0..4")
    s = _as_s(s)
    if ell <= 2:
        val, err = zeta_em(s, ell, cfg)
    else:
        val, err = _cauchy_deriv(np.asarray(s, dtype=complex), ell, cfg)
    return (_out(val), _out(err)) if return_error else _out(val)


def _cauchy_deriv(s: np.ndarray, ell: int, cfg: PrecisionConfig, nodes: int = 32):
    r = 0.25 / np.log(np.abs(s.imag) + 2.0)
    # keep the pole outside the circle
    r = np.minimum(r, 0.5 * np.abs(s - 1.0))
    phi = 2 * np.pi * np.arange(nodes) / nodes
    w = np.exp(1j * phi)
    pts = s[..., None] + r[..., None] * w
    f, ferr = zeta_em(pts, 0, cfg)
    coef = math.factorial(ell) / (nodes * r**ell)
    val = coef * (f * w ** (-ell)).sum(axis=-1)
    err = coef * nodes * (ferr.max(axis=-1) + _EPS * np.abs(f).max(axis=-1))
    return val, err


# ----------------------------------------------------------------- chi --

def log_chi(s):
    """log chi(s) from log-Gamma, without forming Gamma itself."""
    s = np.asarray(_as_s(s), dtype=complex)
    return (s - 0.5) * LOG_PI + loggamma((1.0 - s) / 2.0) - loggamma(s / 2.0)


def chi(s):
    """Functional-equation factor with zeta(s) = chi(s) zeta(1-s).

    Evaluated as pi^(s-1/2) Gamma((1-s)/2) / Gamma(s/2), which equals
    2^s pi^(s-1) sin(pi s/2) Gamma(1-s) by the duplication and reflection
    formulas.
    """
    lc = log_chi(s)
    if np.any(lc.real > 700.0):
        raise ChiOverflowError("|chi(s)| overflows at this real part")
    return _out(np.exp(lc))


def chi_asymmetric(s):
    """chi(s) in the form 2^s pi^(s-1) sin(pi s/2) Gamma(1-s), via logs."""
    from ._special import log_sin

    s = np.asarray(_as_s(s), dtype=complex)
    lc = s * math.log(2.0) + (s - 1.0) * LOG_PI + log_sin(np.pi * s / 2) + loggamma(1.0 - s)
    if np.any(lc.real > 700.0):
        raise ChiOverflowError("|chi(s)| overflows at this real part")
    return _out(np.exp(lc))


def _chi_logderiv(s):
    s = np.asarray(s, dtype=complex)
    return LOG_PI - 0.5 * polygamma(0, (1.0 - s) / 2.0) - 0.5 * polygamma(0, s / 2.0)


def _check_strip(s):
    s = np.asarray(s, dtype=complex)
    if np.any(np.abs(s.imag) < 1.0) or np.any(s.real < -1.0) or np.any(s.real > 2.0):
        raise DomainError("chi'/chi estimates need |t| >= 1 and -1 <= sigma <= 2")


def chi_logderiv(s):
    """Logarithmic derivative chi'(s)/chi(s) on 1 <= |t|, -1 <= sigma <= 2."""
    s = _as_s(s)
    _check_strip(s)
    return _out(_chi_logderiv(s))


def chi_logderiv_tderiv(s, m: int):
    """m-th derivative in t of chi'/chi(sigma + it)."""
    s = _as_s(s)
    _check_strip(s)
    s = np.asarray(s, dtype=complex)
    if m == 0:
        return _out(_chi_logderiv(s))
    dm = -0.5 * (-0.5) ** m * polygamma(m, (1.0 - s) / 2.0) - 0.5 * 0.5**m * polygamma(m, s / 2.0)
    return _out(1j**m * dm)


def chi_magnitude_check(sigma: float, t: float) -> float:
    """| |chi(sigma+it)| (t/2pi)^(sigma-1/2) - 1 |."""
    if not (-1.0 <= sigma <= 2.0 and t >= 1.0):
        raise DomainError("need -1 <= sigma <= 2 and t >= 1")
    lc = log_chi(complex(sigma, t)).real
    return abs(math.expm1(lc + (sigma - 0.5) * math.log(t / (2 * math.pi))))


# --------------------------------------------------------------- theta --

def _theta(t):
    t = np.asarray(t, dtype=float)
    return loggamma(0.25 + 0.5j * t).imag - 0.5 * t * LOG_PI


def _theta_deriv(t, m: int = 1):
    t = np.asarray(t, dtype=float)
    val = ((0.5j) ** m * polygamma(m - 1, 0.25 + 0.5j * t)).imag
    if m == 1:
        val = val - 0.5 * LOG_PI
    return val


def theta(t):
    """Riemann-Siegel theta, the continuous phase with theta(0) = 0."""
    if np.any(np.asarray(t) < 0):
        raise DomainError("theta is evaluated for t >= 0")
    return _out(_theta(t))


def theta_deriv(t, m: int = 1):
    """m-th derivative of theta (m >= 1)."""
    if np.any(np.asarray(t) < 0):
        raise DomainError("theta is evaluated for t >= 0")
    return _out(_theta_deriv(t, m))


def _phase_derivs(t, order: int):
    """[P_0..P_order] with d^k/dt^k e^{i theta} = P_k e^{i theta}."""
    th = [None] + [1j * _theta_deriv(t, m) for m in range(1, order + 1)]
    P = [np.ones_like(np.asarray(t, dtype=complex))]
    if order >= 1:
        P.append(th[1])
    if order >= 2:
        P.append(th[2] + th[1] ** 2)
    if order >= 3:
        P.append(th[3] + 3 * th[1] * th[2] + th[1] ** 3)
    if order >= 4:
        P.append(th[4] + 4 * th[1] * th[3] + 3 * th[2] ** 2 + 6 * th[1] ** 2 * th[2] + th[1] ** 4)
    return P


def chi_half_deriv_ratio(t, k: int, T: float):
    """|d^k/dt^k chi(1/2-it)^(1/2)| / log(T)^k, the measured Lemma-4 ratio."""
    if not 1 <= k <= 4:
        raise ValueError("k must lie in 1..4")
    return _out(np.abs(_phase_derivs(t, k)[k]) / math.log(T) ** k)


# ------------------------------------------------------------------- Z --

def _check_line(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("Z is evaluated for t >= 0")
    if np.any(t > MAX_HEIGHT):
        raise RangeError(f"t above supported height {MAX_HEIGHT:g}")
    return t


def z_line(t, cfg: PrecisionConfig = DEFAULT, derivative: bool = True, method: str = "auto"):
    """Vectorized Z(t), Z'(t) on the critical line.

    Returns ``(z, z_prime, err_est, imag_residue)``; ``z_prime`` is None
    when ``derivative`` is false. ``method`` is ``"auto"`` (Riemann-Siegel
    above t = 200, Euler-Maclaurin below), ``"rs"`` or ``"em"``.
    """
    t = _check_line(t)
    shape = t.shape
    t = t.ravel()
    th = _theta(t)
    dth = _theta_deriv(t) if derivative else None
    z = np.empty_like(t)
    zp = np.empty_like(t) if derivative else None
    err = np.empty_like(t)
    resid = np.zeros_like(t)
    if method == "auto":
        use_rs = t > RS_THRESHOLD
    elif method in ("rs", "em"):
        use_rs = np.full(t.shape, method == "rs")
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.any(use_rs):
        tr = t[use_rs]
        zr, zpr = rs.z_rs(tr, th[use_rs], dth[use_rs] if derivative else None)
        z[use_rs] = zr
        if derivative:
            zp[use_rs] = zpr
        nterms = np.sqrt(tr / (2 * np.pi))
        rounding = 8 * _EPS * (1 + tr * np.log(nterms + 1)) * np.sqrt(np.log(nterms) + 1.0)
        err[use_rs] = rs.truncation_bound(tr) + rounding
    em = ~use_rs
    if np.any(em):
        te = t[em]
        s = 0.5 + 1j * te
        u = np.exp(1j * th[em])
        zeta0, e0 = zeta_em(s, 0, cfg)
        w = u * zeta0
        z[em] = w.real
        resid[em] = w.imag
        err[em] = e0
        if derivative:
            zeta1, e1 = zeta_em(s, 1, cfg)
            wp = 1j * u * (dth[em] * zeta0 + zeta1)
            zp[em] = wp.real
            err[em] = np.maximum(e0, e1)
    out = (z.reshape(shape), zp.reshape(shape) if derivative else None,
           err.reshape(shape), resid.reshape(shape))
    return out


def Z(t: float, cfg: PrecisionConfig = DEFAULT, method: str = "auto") -> ZEvaluation:
    """Riemann-Siegel Z function with its derivative and phase."""
    z, zp, err, resid = z_line(np.array([t], dtype=float), cfg, True, method)
    return ZEvaluation(
        t=float(t), z=float(z[0]), z_prime=float(zp[0]),
        theta=float(_theta(t)), err_est=float(err[0]), imag_residue=float(resid[0]),
    )


def Z_values(t, cfg: PrecisionConfig = DEFAULT, method: str = "auto"):
    """Z(t) only, vectorized."""
    return _out(z_line(t, cfg, derivative=False, method=method)[0])


def Z_prime(t, cfg: PrecisionConfig = DEFAULT, method: str = "auto"):
    """Z'(t), vectorized."""
    return _out(z_line(t, cfg, derivative=True, method=method)[1])


def Z1(s, cfg: PrecisionConfig = DEFAULT):
    """zeta'(s) - (1/2)(chi'/chi)(s) zeta(s)."""
    s = np.asarray(_as_s(s), dtype=complex)
    z0, _ = zeta_em(s, 0, cfg)
    z1, _ = zeta_em(s, 1, cfg)
    return _out(z1 - 0.5 * _chi_logderiv(s) * z0)


def Z_higher_deriv(t, ell: int, cfg: PrecisionConfig = DEFAULT):
    """ell-th derivative of Z (ell <= 3) by Leibniz over zeta^(m) and e^{i theta}.

    d^m/dt^m zeta(1/2+it) = i^m zeta^(m)(1/2+it); the phase factor
    derivatives come from theta', theta'', theta'''.
    """
    if not 0 <= ell <= 3:
        raise ValueError("ell must lie in 0..3")
    t = _check_line(t)
    s = 0.5 + 1j * t
    u = np.exp(1j * _theta(t))
    P = _phase_derivs(t, ell)
    total = np.zeros(np.shape(t), dtype=complex)
    for m in range(ell + 1):
        zm = zeta_deriv(s, m, cfg)
        total = total + math.comb(ell, m) * (1j**m) * zm * P[ell - m]
    return _out((u * total).real)


def functional_equation_residual(s, cfg: PrecisionConfig = DEFAULT):
    """|zeta(s) - chi(s) zeta(1-s)| / (1 + |zeta(s)|)."""
    s = np.asarray(_as_s(s), dtype=complex)
    lhs, _ = zeta_em(s, 0, cfg)
    rhs, _ = zeta_em(1.0 - s, 0, cfg)
    return _out(np.abs(lhs - np.exp(log_chi(s)) * rhs) / (1.0 + np.abs(lhs)))


__all__ = [
    "ComplexPoint", "ZEvaluation", "zeta", "zeta_deriv", "chi", "chi_asymmetric",
    "log_chi", "chi_logderiv", "chi_logderiv_tderiv", "chi_magnitude_check",
    "theta", "theta_deriv", "chi_half_deriv_ratio", "z_line", "Z", "Z_values",
    "Z_prime", "Z1", "Z_higher_deriv", "functional_equation_residual",
    "RS_THRESHOLD", "POLE_RADIUS",
]
