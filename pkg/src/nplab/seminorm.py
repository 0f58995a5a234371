"""Gagliardo seminorms, heat-semigroup Besov seminorms and the small-s limit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _engine
from .extrapolate import LimitEstimate, extrapolate_limit
from .fields import ScalarField
from .heat import HeatKernel, _masked_kernel
from .quad import DivergenceError, QuadSpec, UnsupportedError, gauss_legendre, log_time_rule
from .regions import IntervalSet
from .specfun import gamma

__all__ = ["gagliardo", "gagliardo_power", "besov", "besov_profile", "BesovResult", "SeminormRequest",
           "ms_limit", "lattice_check", "lp_norm_power", "conversion_constant",
           "pointwise_max", "pointwise_min", "DEFAULT_S_GRID"]

DEFAULT_S_GRID = (0.16, 0.08, 0.04, 0.02, 0.01)
_Z_MIN = 1e-12
_FLAT = 0.02


def conversion_constant(s: float, p: float, n: int = 1) -> float:
    """``N_{s,p}^p / [f]_{W^{s,p}}^p`` for the Gaussian kernel."""
    return 2 ** (p * s) * gamma((n + p * s) / 2) / math.pi ** (n / 2)


def _field_key(f: ScalarField):
    return f.key if f.tag != "callable" else (f.key, id(f.func))


def _support(f: ScalarField) -> IntervalSet:
    if f.support is None:
        raise UnsupportedError("function needs a bounded support")
    if f.dim != 1:
        raise UnsupportedError("seminorms are implemented in one dimension")
    return IntervalSet.of([f.support])


def _piece_rule(cuts, n):
    gx, gw = gauss_legendre(n)
    c = np.asarray(sorted(set(cuts)), float)
    a, b = c[:-1, None], c[1:, None]
    return ((a + b) / 2 + (b - a) / 2 * gx).ravel(), ((b - a) / 2 * gw).ravel()


def _shift_energy(f, z, p, n):
    """``psi(z) = int |f(x + z) - f(x)|^p dx``."""
    a, b = f.support
    bp = [v for v in f.breakpoints] + [v - z for v in f.breakpoints] + [a - z, b]
    x, w = _piece_rule([v for v in bp if a - z <= v <= b], n)
    return float(np.sum(w * np.abs(f(x + z) - f(x)) ** p))


def gagliardo_power(f: ScalarField, s: float, p: float, quad: QuadSpec | None = None) -> float:
    """``[f]^p = int int |f(x) - f(y)|^p |x - y|^{-1 - ps} dx dy`` on the line.

    Written as ``2 int_0^inf z^{-1-ps} psi(z) dz``; for ``z`` beyond the support
    width ``psi = 2 ||f||_p^p`` and that tail is exact.  Near ``z = 0`` a
    power-law fit of ``psi`` supplies the remainder or detects divergence.
    """
    quad = quad or QuadSpec()
    if not 0 < s < 1:
        raise DivergenceError("Gagliardo seminorm needs 0 < s < 1")
    if p < 1:
        raise ValueError("p must be >= 1")
    if f.is_constant:
        return 0.0
    _support(f)
    a, b = f.support
    W = b - a
    a_exp = p * s
    n = quad.nodes
    knots = sorted({abs(u - v) for u in f.breakpoints for v in f.breakpoints if 0 < abs(u - v) < W} | {W})
    norm_p = _shift_energy(f, 2 * W, p, n) / 2
    total = 2 * (2 * norm_p) * W ** (-a_exp) / a_exp
    # log-spaced panels from z_min to the first kink, plain panels after
    zs, ws = log_time_rule(_Z_MIN, knots[0], quad.t_panel, quad.t_nodes)
    psi = np.array([_shift_energy(f, z, p, n) for z in zs])
    total += 2 * float(np.sum(ws * zs ** (-a_exp) * psi))
    gx, gw = gauss_legendre(n)
    for lo, hi in zip(knots[:-1], knots[1:]):
        z = (lo + hi) / 2 + (hi - lo) / 2 * gx
        psi_z = np.array([_shift_energy(f, zz, p, n) for zz in z])
        total += 2 * float(np.sum((hi - lo) / 2 * gw * z ** (-1 - a_exp) * psi_z))
    if psi[0] > 0 and psi[1] > 0:
        beta = math.log(psi[1] / psi[0]) / math.log(zs[1] / zs[0])
        if beta - a_exp <= _FLAT:
            raise DivergenceError(f"Gagliardo integral diverges at the diagonal (psi ~ z^{beta:.3f}, ps = {a_exp})")
        total += 2 * psi[0] * zs[0] ** (-a_exp) / (beta - a_exp)
    return total


def gagliardo(f: ScalarField, s: float, p: float, quad: QuadSpec | None = None) -> float:
    return gagliardo_power(f, s, p, quad) ** (1 / p)


@dataclass(frozen=True)
class SeminormRequest:
    f: ScalarField
    p: float
    s: float
    kernel: HeatKernel
    q: float | None = None
    quad: QuadSpec = field(default_factory=QuadSpec)

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise ValueError("s must lie in (0, 1)")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.q is not None and self.q < 1:
            raise ValueError("q must be >= 1 or infinite")


@dataclass
class BesovResult:
    value: float
    power: float
    small_part: float
    large_part: float
    diverging: bool
    q: float
    grid_sup_t: float | None = None

    def __float__(self):
        return self.value


@dataclass
class _Profile:
    phi: _engine.TimeProfile      # small: Phi(t); large: D_t = Phi(t) - 2||f||^p
    norm_p: float


_PROFILES: dict = {}


def lp_norm_power(f: ScalarField, p: float, kernel: HeatKernel, quad: QuadSpec | None = None) -> float:
    """``||f||_{L^p(mu)}^p``."""
    quad = quad or QuadSpec()
    if f.is_constant:
        return 0.0 if f.params[0] == 0 else math.inf
    S = _support(f)
    x, w = _engine.outer_rule(S, f.breakpoints, 1.0, kernel.kappa, quad)
    return float(np.sum(w * np.abs(f(x)) ** p))


def _phi_parts(kernel, f, p, t, quad, S, Sc):
    kap = kernel.kappa
    feats = tuple(f.breakpoints) + S.endpoints
    x, wx = _engine.outer_rule(S, feats, t, kap, quad)
    fx = f(x)
    xb = x[:, None]
    y, wy = _engine.inner_rule(x, t, S, f.breakpoints, kap, quad)
    pw = _masked_kernel(kap, t, xb, y, wy)
    diff = np.abs(fx[:, None] - f(y)) ** p
    same = np.abs(fx[:, None]) ** p + np.abs(f(y)) ** p
    ss = float(wx @ np.sum(pw * diff, axis=1))
    dd = float(wx @ np.sum(pw * (diff - same), axis=1))
    if not Sc.is_empty:
        yc, wc = _engine.inner_rule(x, t, Sc, (), kap, quad)
        out_mass = np.sum(_masked_kernel(kap, t, xb, yc, wc), axis=1)
    else:
        out_mass = np.zeros_like(x)
    cross = 2 * float(wx @ (np.abs(fx) ** p * out_mass))
    return cross + ss, dd


def besov_profile(kernel: HeatKernel, f: ScalarField, p: float, quad: QuadSpec | None = None) -> _Profile:
    """Samples of ``Phi(t) = int P_t(|f - f(x)|^p)(x) mu(dx)`` on the time rule (cached)."""
    quad = quad or QuadSpec()
    key = (kernel.key, _field_key(f), float(p), quad)
    if key in _PROFILES:
        return _PROFILES[key]
    S = _support(f)
    Sc = S.complement()
    norm_p = lp_norm_power(f, p, kernel, quad)
    prof = _engine.TimeProfile.sample(lambda t: _phi_parts(kernel, f, p, t, quad, S, Sc)[0], quad,
                                      lambda t: _phi_parts(kernel, f, p, t, quad, S, Sc)[1])
    out = _Profile(prof, norm_p)
    _PROFILES[key] = out
    return out


def besov(req: SeminormRequest | None = None, **kw) -> BesovResult:
    """``N^{kappa,q}_{s,p}(f)`` by time quadrature (``q=None`` means ``q = p``).

    For ``q = p`` the large-time part uses ``Phi = 2||f||^p + D_t`` with the
    constant integrated exactly.  ``q = inf`` takes the supremum over the time
    nodes, a lower bound for the true supremum.
    """
    req = req or SeminormRequest(**kw)
    f, p, s = req.f, req.p, req.s
    q = p if req.q is None else req.q
    if f.is_constant:
        return BesovResult(0.0, 0.0, 0.0, 0.0, False, q)
    prof = besov_profile(req.kernel, f, p, req.quad)
    ph, nrm = prof.phi, prof.norm_p
    if math.isinf(q):
        vals_s = ph.t_small ** (-s / 2) * np.maximum(ph.v_small, 0) ** (1 / p)
        vals_l = ph.t_large ** (-s / 2) * np.maximum(2 * nrm + ph.v_large, 0) ** (1 / p)
        allv = np.concatenate([vals_s, vals_l])
        allt = np.concatenate([ph.t_small, ph.t_large])
        i = int(np.argmax(allv))
        return BesovResult(float(allv[i]), float(allv[i]) ** p, float(vals_s.max()), float(vals_l.max()),
                           False, q, float(allt[i]))
    if q == p:
        small, div = ph.integrate(p * s / 2, "small")
        dl, div2 = ph.integrate(p * s / 2, "large")
        large = dl + 2 * nrm * 2 / (p * s)
        power = small + large
        diverging = div or div2
        return BesovResult(power ** (1 / p) if not diverging else math.inf, power, small, large, diverging, q)
    # general q: integrate t^{-sq/2} Phi^{q/p} dt/t
    a = s * q / 2
    v_small = np.maximum(ph.v_small, 0) ** (q / p)
    v_large = np.maximum(2 * nrm + ph.v_large, 0) ** (q / p)
    prof_q = _engine.TimeProfile(ph.t_small, ph.w_small, v_small, ph.t_large, ph.w_large, v_large)
    small, div = prof_q.integrate(a, "small")
    large = float(np.sum(ph.w_large * ph.t_large ** (-a) * v_large)) + v_large[-1] * ph.t_large[-1] ** (-a) / a
    power = small + large
    return BesovResult(power ** (1 / q) if not div else math.inf, power, small, large, div, q)


def ms_limit(f: ScalarField, p: float, kernel: HeatKernel, s_grid=DEFAULT_S_GRID,
             quad: QuadSpec | None = None) -> LimitEstimate:
    """Extrapolate ``s N_{s,p}(f)^p`` to ``s -> 0+``; the target is ``(4/p) ||f||_p^p``."""
    quad = quad or QuadSpec()
    s_grid = [float(s) for s in s_grid]
    res = [besov(SeminormRequest(f, p, s, kernel, None, quad)) for s in s_grid]
    if res[int(np.argmax(s_grid))].diverging:
        raise DivergenceError("Besov seminorm is infinite at the largest s")
    nrm = lp_norm_power(f, p, kernel, quad)
    est = extrapolate_limit(s_grid, [r.power for r in res], 4 / p * nrm, "dimension-free MS formula")
    est.diagnostics["norm_p"] = nrm
    est.diagnostics["large_time_times_s"] = [s * r.large_part for s, r in zip(s_grid, res)]
    return est


def _crossings(f, g, lo, hi, n=4001):
    x = np.linspace(lo, hi, n)
    d = f(x) - g(x)
    out = []
    for i in np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0):
        try:
            out.append(brentq(lambda u: float(f(np.array(u)) - g(np.array(u))), x[i], x[i + 1], xtol=1e-14))
        except ValueError:
            pass
    return out


def _lattice_field(f, g, op, name):
    if f.support is None or g.support is None:
        raise UnsupportedError("lattice fields need bounded supports")
    lo, hi = min(f.support[0], g.support[0]), max(f.support[1], g.support[1])
    bps = tuple(sorted(set(f.breakpoints) | set(g.breakpoints) | set(_crossings(f, g, lo, hi))))
    return ScalarField(lambda x: op(f(x), g(x)), 1, (lo, hi), bps, name,
                       (_field_key(f), _field_key(g)))


def pointwise_max(f, g):
    return _lattice_field(f, g, np.maximum, "max")


def pointwise_min(f, g):
    return _lattice_field(f, g, np.minimum, "min")


def lattice_check(f: ScalarField, g: ScalarField, s: float, p: float, kernel: HeatKernel,
                  quad: QuadSpec | None = None, allowance: float = 1e-3) -> dict:
    """Compare ``||max||^p + ||min||^p`` with ``||f||^p + ||g||^p`` in the Besov norms.

    Reports the relative slack ``(rhs - lhs)/rhs`` for the norm with ``q = p``,
    the norm with ``q = inf`` (grid supremum), the seminorm powers alone, and
    the worst pointwise-in-t slack of ``Phi``.
    """
    quad = quad or QuadSpec()
    fields = {"f": f, "g": g, "max": pointwise_max(f, g), "min": pointwise_min(f, g)}
    info = {}
    for name, h in fields.items():
        zero = h.support is None or lp_norm_power(h, p, kernel, quad) == 0
        if zero:
            info[name] = {"norm": 0.0, "N": 0.0, "N_inf": 0.0, "phi": None}
            continue
        nrm = lp_norm_power(h, p, kernel, quad) ** (1 / p)
        Nq = besov(SeminormRequest(h, p, s, kernel, None, quad)).value
        Ni = besov(SeminormRequest(h, p, s, kernel, math.inf, quad)).value
        prof = besov_profile(kernel, h, p, quad)
        phi = np.concatenate([prof.phi.v_small, 2 * prof.norm_p + prof.phi.v_large])
        info[name] = {"norm": nrm, "N": Nq, "N_inf": Ni, "phi": phi}

    def slack(lhs, rhs):
        return (rhs - lhs) / max(abs(rhs), 1e-300)

    out = {}
    for label, key in (("q=p", "N"), ("q=inf", "N_inf")):
        lhs = sum((info[k]["norm"] + info[k][key]) ** p for k in ("max", "min"))
        rhs = sum((info[k]["norm"] + info[k][key]) ** p for k in ("f", "g"))
        out[label] = {"lhs": lhs, "rhs": rhs, "rel_slack": slack(lhs, rhs)}
        lhs_s = sum(info[k][key] ** p for k in ("max", "min"))
        rhs_s = sum(info[k][key] ** p for k in ("f", "g"))
        out[label + " seminorm"] = {"lhs": lhs_s, "rhs": rhs_s, "rel_slack": slack(lhs_s, rhs_s)}
    phis = {k: (v["phi"] if v["phi"] is not None else 0.0) for k, v in info.items()}
    rhs_t = phis["f"] + phis["g"]
    lhs_t = phis["max"] + phis["min"]
    out["pointwise_t"] = {"rel_slack": float(np.min((rhs_t - lhs_t) / np.maximum(np.abs(rhs_t), 1e-300)))}
    out["passed"] = out["q=p"]["rel_slack"] >= -allowance and out["q=inf"]["rel_slack"] >= -allowance
    return out
