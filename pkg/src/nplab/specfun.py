"""Special functions: Gamma, lower incomplete gamma, modified Bessel I.

All routines accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "gamma",
    "gamma_inc_lower",
    "bessel_i",
    "bessel_ie",
    "bessel_asymptotic_coeffs",
    "sphere_area",
]

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])

_SERIES_MAX_Z = 25.0


def _lanczos(x):
    # valid for x >= 0.5
    xm = x - 1.0
    acc = np.full_like(xm, _LANCZOS[0])
    for i in range(1, len(_LANCZOS)):
        acc = acc + _LANCZOS[i] / (xm + i)
    tt = xm + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * tt ** (xm + 0.5) * np.exp(-tt) * acc


def gamma(x):
    """Gamma function for positive real arguments.

    Raises:
        ValueError: if any argument is not strictly positive.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise ValueError("gamma: argument must be positive")
    out = np.empty_like(xa)
    small = xa < 0.5
    big = ~small
    if np.any(big):
        out[big] = _lanczos(xa[big])
    if np.any(small):
        xs = xa[small]
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        out[small] = math.pi / (np.sin(math.pi * xs) * _lanczos(1.0 - xs))
    return out if out.ndim else float(out)


def gamma_inc_lower(p, u):
    """Unregularized lower incomplete gamma ``int_0^u e^{-t} t^{p-1} dt``.

    Power series below ``u < p + 1``, Lentz continued fraction for the upper
    tail otherwise.
    """
    pa, ua = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(u, dtype=float))
    if np.any(~(pa > 0)):
        raise ValueError("gamma_inc_lower: p must be positive")
    if np.any(ua < 0):
        raise ValueError("gamma_inc_lower: u must be nonnegative")
    out = np.zeros(pa.shape)
    g = np.asarray(gamma(pa), dtype=float).reshape(pa.shape)

    ser = (ua < pa + 1.0) & (ua > 0)
    if np.any(ser):
        pp, uu = pa[ser], ua[ser]
        term = 1.0 / pp
        total = term.copy()
        ap = pp.copy()
        for _ in range(500):
            ap = ap + 1.0
            term = term * uu / ap
            total = total + term
            if np.all(np.abs(term) < np.abs(total) * 1e-17):
                break
        out[ser] = total * np.exp(-uu + pp * np.log(uu))

    cf = ua >= pa + 1.0
    if np.any(cf):
        pp, uu = pa[cf], ua[cf]
        tiny = 1e-300
        b = uu + 1.0 - pp
        c = np.full_like(uu, 1.0 / tiny)
        d = 1.0 / b
        h = d.copy()
        for i in range(1, 500):
            an = -i * (i - pp)
            b = b + 2.0
            d = an * d + b
            d = np.where(np.abs(d) < tiny, tiny, d)
            c = b + an / c
            c = np.where(np.abs(c) < tiny, tiny, c)
            d = 1.0 / d
            delta = d * c
            h = h * delta
            if np.all(np.abs(delta - 1.0) < 1e-16):
                break
        upper = np.exp(-uu + pp * np.log(uu)) * h
        out[cf] = g[cf] - upper
    return out if out.ndim else float(out)


def bessel_asymptotic_coeffs(nu: float, terms: int = 30) -> np.ndarray:
    """Coefficients ``c_k`` with ``I_nu(z) e^{-z} sqrt(2 pi z) ~ sum_k c_k z^{-k}``."""
    mu = 4.0 * nu * nu
    c = np.empty(terms)
    c[0] = 1.0
    for k in range(1, terms):
        c[k] = -c[k - 1] * (mu - (2 * k - 1) ** 2) / (k * 8.0)
    return c


def _bessel_series(nu, z):
    half = 0.5 * z
    term = np.power(half, nu) / gamma(np.full_like(z, nu + 1.0))
    total = term.copy()
    q = half * half
    for k in range(1, 200):
        term = term * q / (k * (k + nu))
        total = total + term
        if np.all(term <= total * 1e-17):
            break
    return total


def _bessel_scaled(nu, z):
    """I_nu(z) e^{-z} without overflow; series for moderate z, asymptotic beyond."""
    out = np.empty_like(z)
    lo = z <= _SERIES_MAX_Z
    if np.any(lo):
        zl = z[lo]
        out[lo] = _bessel_series(nu, zl) * np.exp(-zl)
    hi = ~lo
    if np.any(hi):
        zh = z[hi]
        c = bessel_asymptotic_coeffs(nu)
        acc = np.zeros_like(zh)
        inv = 1.0 / zh
        for ck in c[::-1]:
            acc = acc * inv + ck
        out[hi] = acc / np.sqrt(2 * math.pi * zh)
    return out


def _check_bessel_args(nu, z):
    if nu < -0.5:
        raise ValueError("bessel_i: order must be >= -1/2")
    za = np.asarray(z, dtype=float)
    if np.any(za < 0):
        raise ValueError("bessel_i: argument must be nonnegative")
    return za


def bessel_i(nu: float, z):
    """Modified Bessel function of the first kind, ``I_nu(z)`` for ``z >= 0``."""
    za = _check_bessel_args(nu, z)
    flat = np.atleast_1d(za).astype(float)
    out = np.empty_like(flat)
    zero = flat == 0
    out[zero] = 1.0 if nu == 0 else (0.0 if nu > 0 else np.inf)
    pos = ~zero
    if np.any(pos):
        zp = flat[pos]
        lo = zp <= _SERIES_MAX_Z
        res = np.empty_like(zp)
        if np.any(lo):
            res[lo] = _bessel_series(nu, zp[lo])
        if np.any(~lo):
            res[~lo] = _bessel_scaled(nu, zp[~lo]) * np.exp(zp[~lo])
        out[pos] = res
    out = out.reshape(za.shape)
    return out if out.ndim else float(out)


def bessel_ie(nu: float, z):
    """Exponentially scaled ``I_nu(z) e^{-z}``."""
    za = _check_bessel_args(nu, z)
    flat = np.atleast_1d(za).astype(float)
    out = np.empty_like(flat)
    zero = flat == 0
    out[zero] = 1.0 if nu == 0 else (0.0 if nu > 0 else np.inf)
    if np.any(~zero):
        out[~zero] = _bessel_scaled(nu, flat[~zero])
    out = out.reshape(za.shape)
    return out if out.ndim else float(out)


def sphere_area(n: int) -> float:
    """Surface area ``2 pi^{n/2} / Gamma(n/2)`` of the unit sphere in R^n."""
    if int(n) != n or n < 1:
        raise ValueError("sphere_area: n must be a positive integer")
    return 2.0 * math.pi ** (n / 2) / gamma(n / 2)
