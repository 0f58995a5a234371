"""Quadrature machinery for one-dimensional heat-kernel integrals.

Spatial rules are sinh-graded Gauss-Legendre panels cut at every feature of
the integrand: set endpoints, function breakpoints, the kernel peaks at
``y = x`` (and ``y = -x`` when the reflection weight is active) and the weight
cusp at the origin, which gets a Gauss-Jacobi panel instead.  Pieces further
than ``trunc * sqrt(t)`` from every peak are dropped for kernel-localised
inner integrals.

Time integrals run on composite Gauss-Legendre panels in ``log t`` with
power-law tail corrections at both ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quad import QuadSpec, gauss_jacobi, graded_rule, log_time_rule
from .regions import IntervalSet

_GRADE = 0.5
_BIG = 1e300


def axis_weight(kappa: float, y):
    if kappa == 0:
        return np.ones_like(y)
    return (math.sqrt(2.0) * np.abs(y)) ** (2 * kappa)


def _cusp_rule(a, b, kappa, n):
    """Panels touching the origin: Gauss-Jacobi in |y| absorbing |y|^{2 kappa}.

    Returned weights already include the full weight ``2^kappa |y|^{2 kappa}``.
    """
    gx, gw = gauss_jacobi(n, 0.0, 2 * kappa)
    h = np.where(a == 0, b, -a)[..., None]
    sign = np.where(a == 0, 1.0, -1.0)[..., None]
    y = sign * h * (gx + 1.0) / 2
    w = 2.0 ** kappa * (h / 2) ** (2 * kappa + 1) * gw
    return y, w


def _assemble(a, b, center, scale, kappa, n, m0=None):
    if kappa > 0 and m0 is not None:
        # near-origin pieces: grade toward the weight cusp instead of the peak
        na = np.minimum(np.abs(a), np.abs(b))
        near0 = (na > 0) & (np.maximum(np.abs(a), np.abs(b)) <= m0 * (1 + 1e-12))
        center = np.where(near0, np.where(np.abs(a) < np.abs(b), a, b), center)
        scale = np.where(near0, 0.5 * na, scale)
    y, w = graded_rule(a, b, center, scale, n)
    if kappa > 0:
        w = w * axis_weight(kappa, y)
        cusp = ((a == 0) | (b == 0)) & (b > a)
        if np.any(cusp):
            yc, wc = _cusp_rule(a[cusp], b[cusp], kappa, n)
            y[cusp] = yc
            w[cusp] = wc
    return y, w


def inner_rule(x, t: float, domain: IntervalSet, cuts, kappa: float, quad: QuadSpec):
    """Rule in ``y`` for ``int_domain g(y) p_t(x, y) mu(dy)``, one row per ``x``.

    ``g`` must be smooth between ``cuts``.  Weights include the measure
    density; pieces where the kernel is below ``exp(-trunc^2/4)`` are zeroed.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    m = x.size
    rt = math.sqrt(t)
    T = quad.trunc * rt
    fixed = [v for v in domain.endpoints] + [float(c) for c in cuts if math.isfinite(c)]
    lo_dom = domain.parts[0][0] if domain.parts else 0.0
    hi_dom = domain.parts[-1][1] if domain.parts else 0.0
    far = float(np.max(np.abs(x))) + 2 * T + max([abs(v) for v in fixed] + [0.0]) + 1.0
    fixed += [max(lo_dom, -far), min(hi_dom, far)]
    cols = [np.broadcast_to(np.asarray(v, float), (m,)) for v in fixed]
    cols += [x, x - T, x + T]
    if kappa > 0:
        m0 = 2 * rt
        cols += [np.zeros(m), np.full(m, -m0), np.full(m, m0), -x, -x - T, -x + T]
    P = np.sort(np.stack(cols, axis=1), axis=1)
    a, b = P[:, :-1], P[:, 1:]
    mid = 0.5 * (a + b)
    xb = x[:, None]
    if kappa > 0:
        near = np.abs(np.abs(mid) - np.abs(xb)) < T
        c1, c2 = np.clip(xb, a, b), np.clip(-xb, a, b)
        center = np.where(np.abs(c1 - xb) <= np.abs(c2 + xb), c1, c2)
    else:
        near = np.abs(mid - xb) < T
        center = np.clip(xb, a, b)
    active = (b > a) & near & domain.contains(mid)
    y, w = _assemble(a, b, center, np.full_like(a, _GRADE * rt), kappa, quad.nodes, 2 * rt)
    w = w * active[..., None]
    return y.reshape(m, -1), w.reshape(m, -1)


def outer_rule(domain: IntervalSet, features, t: float, kappa: float, quad: QuadSpec):
    """Rule over a bounded set for an integrand with sqrt(t)-scale layers at ``features``."""
    if domain.is_empty:
        return np.zeros(0), np.zeros(0)
    if not domain.bounded:
        raise ValueError("outer domain must be bounded")
    rt = math.sqrt(t)
    T = quad.trunc * rt
    F = sorted({float(v) for v in features if math.isfinite(v)})
    if kappa > 0:
        F = sorted(set(F) | {-v for v in F} | {0.0, -2 * rt, 2 * rt})
    pts = set(domain.endpoints)
    for v in F:
        pts.update((v, v - T, v + T))
    pts.update(0.5 * (u + v) for u, v in zip(F[:-1], F[1:]))
    lo, hi = domain.parts[0][0], domain.parts[-1][1]
    P = np.array(sorted(p for p in pts if lo <= p <= hi))
    a, b = P[:-1], P[1:]
    mid = 0.5 * (a + b)
    keep = domain.contains(mid) & (b > a)
    a, b, mid = a[keep], b[keep], mid[keep]
    if F:
        Fa = np.array(F)
        dl = np.abs(Fa[None, :] - a[:, None]).min(axis=1)
        dr = np.abs(Fa[None, :] - b[:, None]).min(axis=1)
        touching = np.minimum(dl, dr) <= 1e-12 * max(1.0, abs(hi), abs(lo))
        center = np.where(dl <= dr, a, b)
        local = touching & (b - a <= T * (1 + 1e-12))
        scale = np.where(local, _GRADE * rt, b - a)
    else:
        center, scale = a, b - a
    y, w = _assemble(a, b, center, scale, kappa, quad.nodes, 2 * rt)
    return y.ravel(), w.ravel()


@dataclass
class TimeProfile:
    """Samples of a function of ``t`` on the log-time rule, split at ``t_split``.

    ``small``/``large`` hold (t, dt/t weights, values).  The large-time values
    are expected to decay to zero (the caller subtracts any limit first).
    Large-time tails below ``large_floor`` in magnitude are treated as
    quadrature noise and contribute nothing beyond the last node.
    """

    t_small: np.ndarray
    w_small: np.ndarray
    v_small: np.ndarray
    t_large: np.ndarray
    w_large: np.ndarray
    v_large: np.ndarray
    large_floor: float = 0.0

    @classmethod
    def sample(cls, func, quad: QuadSpec, func_large=None, large_floor: float = 0.0) -> "TimeProfile":
        ts, ws = log_time_rule(quad.t_min, quad.t_split, quad.t_panel, quad.t_nodes)
        tl, wl = log_time_rule(quad.t_split, quad.t_max, quad.t_panel, quad.t_nodes)
        fl = func_large or func
        return cls(ts, ws, np.array([func(t) for t in ts]), tl, wl, np.array([fl(t) for t in tl]),
                   large_floor)

    @staticmethod
    def _power_fit(t0, t1, v0, v1):
        if v0 == 0 or v1 == 0 or np.sign(v0) != np.sign(v1):
            return 0.0, 0.0
        beta = math.log(abs(v1 / v0)) / math.log(t1 / t0)
        return v0 / t0 ** beta, beta

    def small_tail(self, a: float):
        """``int_0^{t_min} t^{-a} F dt/t`` from a power-law fit; (value, diverging)."""
        C, beta = self._power_fit(self.t_small[0], self.t_small[1], self.v_small[0], self.v_small[1])
        if C == 0:
            return 0.0, False
        if beta - a <= 0.02:
            return math.inf, True
        return C * self.t_small[0] ** (beta - a) / (beta - a), False

    def large_tail(self, a: float):
        if max(abs(self.v_large[-2]), abs(self.v_large[-1])) <= self.large_floor:
            return 0.0, False
        C, beta = self._power_fit(self.t_large[-2], self.t_large[-1], self.v_large[-2], self.v_large[-1])
        if C == 0:
            return 0.0, False
        g = a - beta
        if g <= 0:
            return math.inf, True
        return C * self.t_large[-1] ** (-g) / g, False

    def integrate(self, a: float, part: str = "both"):
        """``int t^{-a} F(t) dt/t`` over (0, t_split) and/or (t_split, inf)."""
        total, div = 0.0, False
        if part in ("both", "small"):
            tail, d = self.small_tail(a)
            total += float(np.sum(self.w_small * self.t_small ** (-a) * self.v_small)) + tail
            div |= d
        if part in ("both", "large"):
            tail, d = self.large_tail(a)
            total += float(np.sum(self.w_large * self.t_large ** (-a) * self.v_large)) + tail
            div |= d
        return total, div
