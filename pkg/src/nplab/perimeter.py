"""Interaction functionals, relative s-perimeters, tail functionals and the
verifiers for the small-s limits.

Heat-kernel quantities use the one-dimensional time route

    L_s(A, B) = int_0^inf t^{-1-s} K_t(A, B) dt,   K_t(A, B) = int_A P_t 1_B d mu,

with ``K_t`` sampled once on the log-time rule and reused for every ``s``.
The Gaussian-kernel closed forms (Riesz kernel, incomplete-gamma tail) are
evaluated alongside as independent checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import _engine
from .dunkl import WeightedMeasure, measure_of, mm_constant
from .extrapolate import LimitEstimate, extrapolate_limit
from .heat import HeatKernel, _masked_kernel
from .quad import (AccuracyError, DivergenceError, QuadSpec, UnsupportedError, gauss_legendre,
                   log_time_rule)
from .regions import INF, IntervalSet, Region, interval_union
from .specfun import gamma, gamma_inc_lower, sphere_area

__all__ = ["interaction", "riesz_interaction", "classical_interaction", "PerimeterResult",
           "perimeter_classical", "perimeter_dunkl", "lambda_tail", "lambda_tail_closed_form",
           "TailFunctionals", "xi_estimate", "iota_estimate", "relative_limit_verify",
           "converse_xi_recover", "weighted_interaction", "weighted_perimeter",
           "weighted_vanishing_trend", "perimeter_properties_suite", "riesz_constant",
           "PERIMETER_S_GRID", "XI_S_GRID"]

PERIMETER_S_GRID = (0.16, 0.08, 0.04, 0.02, 0.01)
XI_S_GRID = (0.05, 0.04, 0.03, 0.02, 0.01)
_AGREE = 1e-3
_GAMMA_FLAT = 40.0
_RAY_CACHE: dict = {}


def riesz_constant(s: float, n: int = 1) -> float:
    """``int_0^inf t^{-1-s} (4 pi t)^{-n/2} e^{-r^2/4t} dt = riesz_constant * r^{-n-2s}``."""
    return 2 ** (2 * s) * gamma(n / 2 + s) / math.pi ** (n / 2)


def _iv(region) -> IntervalSet:
    if isinstance(region, IntervalSet):
        return region
    if region.intervals is None:
        raise UnsupportedError("this operation needs interval-backed regions on the line")
    return region.intervals


def _check_disjoint(A: IntervalSet, B: IntervalSet):
    if A.intersect(B).length() > 0:
        raise ValueError("interaction sets must be disjoint")


def _ends_fraction(B: IntervalSet) -> float:
    lo, hi = B.ends()
    return 0.5 * lo + 0.5 * hi


# ---------------------------------------------------------------- Riesz forms

def _h(z, s):
    # second antiderivative of z^{-1-2s}, vanishing at 0 and with h(inf) differences -> 0
    return -np.abs(z) ** (1 - 2 * s) / (2 * s * (1 - 2 * s))


def riesz_interaction(A, B, s: float) -> float:
    """Exact ``int_A int_B |x - y|^{-1-2s}`` for disjoint interval unions on the line."""
    A, B = _iv(A), _iv(B)
    _check_disjoint(A, B)
    total = 0.0
    for a1, a2 in A:
        for b1, b2 in B:
            if b1 >= a2:
                lo1, hi1, lo2, hi2 = a1, a2, b1, b2
            else:
                lo1, hi1, lo2, hi2 = b1, b2, a1, a2
            if math.isinf(lo1) and math.isinf(hi2):
                return math.inf
            # right block (lo2, hi2) against left block (lo1, hi1)
            terms = [(hi2, lo1, 1), (hi2, hi1, -1), (lo2, lo1, -1), (lo2, hi1, 1)]
            acc = 0.0
            for u, v, sg in terms:
                if math.isinf(u) or math.isinf(v):
                    continue  # pairs with an infinite end cancel in the limit
                acc += sg * _h(u - v, s)
            total += acc
    return float(total)


def _riesz_inner(x, B: IntervalSet, s):
    """``int_B |x - y|^{-1-2s} dy`` for ``x`` outside ``B``."""
    out = np.zeros_like(x)
    for b1, b2 in B:
        right = x <= b1
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(right, (b1 - x), (x - b2))
            r2 = np.where(right, (b2 - x), (x - b1))
            t1 = np.where(r1 > 0, r1 ** (-2 * s), np.inf)
            t2 = np.where(np.isinf(r2), 0.0, np.abs(r2) ** (-2 * s))
        out = out + (t1 - t2) / (2 * s)
    return out


def classical_interaction(A, B, s: float, quad: QuadSpec | None = None) -> float:
    """``int_A int_B |x - y|^{-1-2s}`` with the inner integral in closed form and
    adaptive outer quadrature (endpoint singularities handled by extrapolation)."""
    quad = quad or QuadSpec()
    A, B = _iv(A), _iv(B)
    _check_disjoint(A, B)
    if A.is_empty or B.is_empty:
        return 0.0
    if not A.bounded:
        A, B = B, A
    if not A.bounded:
        return math.inf
    total = 0.0
    for a1, a2 in A:
        pts = [p for p in B.endpoints if a1 < p < a2]
        f = lambda x: float(_riesz_inner(np.array([x]), B, s)[0])
        v, err = integrate.quad(f, a1, a2, points=pts or None, epsabs=0, epsrel=min(quad.rtol, 1e-8), limit=400)
        total += v
    return total


# ------------------------------------------------------------- heat-kernel route

_K_PROFILES: dict = {}


def _k_at(kappa, t, A, B, quad):
    x, wx = _engine.outer_rule(A, B.endpoints, t, kappa, quad)
    y, wy = _engine.inner_rule(x, t, B, (), kappa, quad)
    return float(wx @ np.sum(_masked_kernel(kappa, t, x[:, None], y, wy), axis=1))


def _k_profile(kernel: HeatKernel, A: IntervalSet, B: IntervalSet, quad: QuadSpec):
    key = (kernel.key, A, B, quad)
    if key not in _K_PROFILES:
        kap = kernel.kappa
        k_inf = _ends_fraction(B) * measure_of(kernel.measure, interval_union(A.parts))
        prof = _engine.TimeProfile.sample(lambda t: _k_at(kap, t, A, B, quad), quad,
                                          lambda t: _k_at(kap, t, A, B, quad) - k_inf,
                                          large_floor=quad.rtol * k_inf)
        _K_PROFILES[key] = (prof, k_inf)
    return _K_PROFILES[key]


def interaction(kernel: HeatKernel, A, B, s: float, quad: QuadSpec | None = None,
                check: bool = True) -> float:
    """``L_s(A, B) = int_0^inf t^{-1-s} int_A P_t 1_B d mu dt`` on the line.

    At least one set must be bounded.  Returns ``inf`` when the small-time
    power law shows divergence.  For the Gaussian kernel the value is checked
    against the Riesz closed form (``AccuracyError`` beyond 1e-3 relative).
    """
    quad = quad or QuadSpec()
    if not 0 < s < 0.5:
        raise ValueError("s must lie in (0, 1/2)")
    A, B = _iv(A), _iv(B)
    _check_disjoint(A, B)
    if A.is_empty or B.is_empty:
        return 0.0
    if not A.bounded:
        A, B = B, A
    if not A.bounded:
        raise UnsupportedError("both interaction sets are unbounded")
    prof, k_inf = _k_profile(kernel, A, B, quad)
    val, div = prof.integrate(s)
    if div:
        return math.inf
    val += k_inf / s
    if check and kernel.kind == "classical_gaussian":
        ref = riesz_constant(s) * riesz_interaction(A, B, s)
        if abs(val - ref) > _AGREE * abs(ref):
            raise AccuracyError(f"time route {val} disagrees with the Riesz form {ref}")
    return val


@dataclass
class PerimeterResult:
    s: float
    value: float
    decomposition: tuple
    diagnostics: dict = field(default_factory=dict)

    @property
    def infinite(self) -> bool:
        return math.isinf(self.value)

    def __float__(self):
        return self.value


def _pieces(E, Omega):
    E, O = _iv(E), _iv(Omega)
    Ec, Oc = E.complement(), O.complement()
    return ((E.intersect(O), Ec.intersect(O)), (E.intersect(O), Ec.intersect(Oc)),
            (E.intersect(Oc), Ec.intersect(O)))


def perimeter_classical(E, Omega, s: float, quad: QuadSpec | None = None) -> PerimeterResult:
    """``Per_s(E, Omega)``: the three-term sum with kernel ``|x - y|^{-1-2s}``."""
    if not 0 < s < 0.5:
        raise ValueError("s must lie in (0, 1/2)")
    terms = []
    for A, B in _pieces(E, Omega):
        if A.is_empty or B.is_empty:
            terms.append(0.0)
        elif not A.bounded and not B.bounded:
            raise UnsupportedError("both sets of an interaction pair are unbounded")
        else:
            terms.append(classical_interaction(A, B, s, quad))
    return PerimeterResult(s, float(sum(terms)), tuple(terms), {"kind": "classical"})


def perimeter_dunkl(kernel: HeatKernel, E, Omega, s: float, quad: QuadSpec | None = None) -> PerimeterResult:
    """``Per^kappa_s(E, Omega) = 2 [L(E∩Ω, Eᶜ∩Ω) + L(E∩Ω, Eᶜ∩Ωᶜ) + L(E∩Ωᶜ, Eᶜ∩Ω)]``."""
    quad = quad or QuadSpec()
    terms = tuple(interaction(kernel, A, B, s, quad) for A, B in _pieces(E, Omega))
    return PerimeterResult(s, 2 * float(sum(terms)), terms, {"kind": kernel.kind})


# ---------------------------------------------------------------- tail functionals

def _pseudo_ball_1d(spec, x, r) -> IntervalSet:
    centers = {float(g[0, 0] * x) for g in spec.group_elements}
    return IntervalSet.of([(c - r, c + r) for c in centers])


def lambda_tail(kernel: HeatKernel, E, x, r: float, s: float, quad: QuadSpec | None = None,
                check: bool = True) -> float:
    """``Lambda_E(x, r, s) = int_1^inf t^{-1-s} P_t 1_{E minus B_d(x, r)}(x) dt``.

    One-dimensional time route with the large-time limit of ``P_t 1_F(x)``
    (half the number of infinite ends of ``F``) integrated exactly.  In higher
    dimensions (Gaussian kernel only) the incomplete-gamma form is used.
    """
    quad = quad or QuadSpec()
    if r <= 0 or s <= 0:
        raise ValueError("r and s must be positive")
    if kernel.dim > 1:
        if kernel.kind != "classical_gaussian":
            raise UnsupportedError("Lambda in n >= 2 is available for the Gaussian kernel only")
        return lambda_tail_closed_form(E, x, r, s, kernel.measure.spec, quad)
    x = float(np.ravel(x)[0])
    F = _iv(E).minus(_pseudo_ball_1d(kernel.measure.spec, x, r))
    if F.is_empty:
        return 0.0
    theta = _ends_fraction(F)
    kap = kernel.kappa
    tl, wl = log_time_rule(quad.t_split, quad.t_max, quad.t_panel, quad.t_nodes)

    def pf(t):
        y, w = _engine.inner_rule(np.array([x]), t, F, (), kap, quad)
        return float(np.sum(_masked_kernel(kap, t, x, y, w)))

    vals = np.array([pf(t) for t in tl]) - theta
    prof = _engine.TimeProfile(np.zeros(0), np.zeros(0), np.zeros(0), tl, wl, vals)
    tail, _ = prof.integrate(s, "large")
    val = theta / s + tail
    if check and kernel.kind == "classical_gaussian":
        ref = lambda_tail_closed_form(E, x, r, s, kernel.measure.spec, quad)
        if abs(val - ref) > _AGREE * max(abs(ref), 1e-12):
            raise AccuracyError(f"Lambda time route {val} disagrees with the closed form {ref}")
    return val


def _radial_lambda_upper(rho, s, n):
    """``int_rho^inf gamma(n/2 + s, u^2/4) u^{-1-2s} du`` for an array of ``rho`` (inf allowed)."""
    rho = np.asarray(rho, dtype=float)
    out = np.zeros(rho.shape)
    g_full = gamma(n / 2 + s)
    fin = np.isfinite(rho)
    far = np.maximum(rho, _GAMMA_FLAT)
    out[fin] = g_full * far[fin] ** (-2 * s) / (2 * s)
    near = fin & (rho < _GAMMA_FLAT)
    if np.any(near):
        # log substitution over (rho, flat): fixed panels in u = log(.)
        gx, gw = gauss_legendre(32)
        u0 = np.log(rho[near])[:, None]
        u1 = math.log(_GAMMA_FLAT)
        npan = 16
        edges = u0 + (u1 - u0) * np.linspace(0, 1, npan + 1)[None, :]
        h = (edges[:, 1:] - edges[:, :-1]) / 2
        u = (edges[:, 1:] + edges[:, :-1])[..., None] / 2 + h[..., None] * gx
        r = np.exp(u)
        f = gamma_inc_lower(n / 2 + s, r ** 2 / 4) * r ** (-2 * s)
        out[near] += np.sum(h[..., None] * gw * f, axis=(1, 2))
    return out


def _radial_sum(segs, weights, s, n, upper):
    """``sum_k w_k sum_segments (U(a) - U(b))`` with ``U`` the upper antiderivative."""
    a = np.array([sa for sg in segs for sa, _ in sg], dtype=float)
    b = np.array([sb for sg in segs for _, sb in sg], dtype=float)
    w = np.array([wk for wk, sg in zip(weights, segs) for _ in sg], dtype=float)
    if a.size == 0:
        return 0.0
    # rays share most endpoints (the excluded radius, infinity)
    pts, inv = np.unique(np.concatenate([a, b]), return_inverse=True)
    u = upper(pts, s, n)[inv]
    return float(np.sum(w * (u[:a.size] - u[a.size:])))


def _radial_lambda(a, b, s, n):
    return _radial_sum([[(a, b)]], [1.0], s, n, _radial_lambda_upper)


def _directions(n, m):
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        th = (np.arange(m) + 0.5) * 2 * math.pi / m
        return np.stack([np.cos(th), np.sin(th)], -1), np.full(m, 2 * math.pi / m)
    if n == 3:
        k = max(8, int(round(math.sqrt(m / 2))))
        cx, cw = gauss_legendre(k)
        ph = (np.arange(2 * k) + 0.5) * math.pi / k
        C, P = np.meshgrid(cx, ph, indexing="ij")
        S = np.sqrt(1 - C ** 2)
        d = np.stack([S * np.cos(P), S * np.sin(P), C], -1).reshape(-1, 3)
        return d, (cw[:, None] * np.full(ph.size, math.pi / k)).ravel()
    raise UnsupportedError("angular rules are implemented for n <= 3")


def _ray_segments(pred, x, dirs, r, far, n_samples=2048):
    """Intervals of ``rho in (r, inf)`` with ``x + rho d`` in the set, per direction."""
    rho = np.geomspace(r * (1 + 1e-12), far, n_samples)
    pts = x[None, None, :] + rho[None, :, None] * dirs[:, None, :]
    inside = np.asarray(pred(pts), bool)
    segs = []
    for i, d in enumerate(dirs):
        row = inside[i]
        change = np.flatnonzero(row[1:] != row[:-1])
        edges = []
        for j in change:
            lo, hi = rho[j], rho[j + 1]
            v_lo = row[j]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if bool(pred((x + mid * d)[None])[0]) == v_lo:
                    lo = mid
                else:
                    hi = mid
            edges.append(0.5 * (lo + hi))
        cur = [r] if row[0] else []
        out = []
        for e in edges:
            if cur:
                out.append((cur[0], e))
                cur = []
            else:
                cur = [e]
        if cur:
            out.append((cur[0], INF))  # the set persists to the sampling horizon
        segs.append(out)
    return segs


def lambda_tail_closed_form(E, x, r: float, s: float, spec=None, quad: QuadSpec | None = None,
                            n_angles: int = 2048) -> float:
    """Gaussian-kernel ``Lambda`` via ``4^s pi^{-n/2} int gamma(n/2+s, |x-y|^2/4) |x-y|^{-n-2s} dy``.

    Integrated along rays from ``x``; the set is taken as a cone beyond the
    sampling horizon.  Exact ray geometry on the line.
    """
    n = E.dim if isinstance(E, Region) else 1
    x = np.atleast_1d(np.asarray(x, dtype=float))
    pref = 4 ** s / math.pi ** (n / 2)
    if n == 1 and (isinstance(E, IntervalSet) or E.intervals is not None):
        ball = _pseudo_ball_1d(spec, x[0], r) if spec is not None else IntervalSet.of([(x[0] - r, x[0] + r)])
        F = _iv(E).minus(ball)
        total = 0.0
        for a, b in F:
            # distances from x covered by (a, b)
            if a >= x[0]:
                total += _radial_lambda(a - x[0], b - x[0], s, 1)
            else:
                total += _radial_lambda(x[0] - b, x[0] - a, s, 1)
        return pref * total
    dirs, dw = _directions(n, n_angles)
    groups = spec.group_elements if spec is not None else [np.eye(n)]
    centers = [g @ x for g in groups]

    def pred(p):
        keep = np.asarray(E(p), bool)
        for c in centers:
            keep &= np.sum((p - c) ** 2, axis=-1) >= r * r
        return keep

    far = 1e6 * (1 + np.linalg.norm(x) + r)
    key = (id(E), tuple(x.tolist()), float(r), n_angles, id(spec))
    if key not in _RAY_CACHE:
        _RAY_CACHE[key] = (E, _ray_segments(pred, x, dirs, r, far))
    segs = _RAY_CACHE[key][1]
    return pref * _radial_sum(segs, dw, s, n, _radial_lambda_upper)


@dataclass
class TailFunctionals:
    lambda_values: dict = field(default_factory=dict)
    xi: float | None = None
    xi_estimates: list = field(default_factory=list)
    iota: float | None = None
    flags: dict = field(default_factory=dict)

    def scaled_lambdas(self):
        return {k: k[2] * v for k, v in self.lambda_values.items()}


def xi_estimate(kernel: HeatKernel, E, x=0.0, r: float = 1.0, s_grid=XI_S_GRID,
                quad: QuadSpec | None = None, second=(0.7, 2.5), tol: float = 1e-3) -> TailFunctionals:
    """Extrapolate ``s Lambda_E(x, r, s)`` to ``s -> 0+`` at two ``(x, r)`` pairs.

    The reported Xi is the estimate at the first pair; the second is the
    independence check.
    """
    quad = quad or QuadSpec()
    out = TailFunctionals()
    pairs = [(x, r)] + ([second] if second is not None else [])
    ests = []
    for xx, rr in pairs:
        xx_arr = np.atleast_1d(np.asarray(xx, dtype=float))
        if xx_arr.size != kernel.dim:
            xx_arr = np.full(kernel.dim, float(xx_arr[0]))
        vals = []
        for s in s_grid:
            v = lambda_tail(kernel, E, xx_arr, rr, s, quad)
            out.lambda_values[(tuple(xx_arr.tolist()), float(rr), float(s))] = v
            vals.append(v)
        ests.append(extrapolate_limit(s_grid, vals, degree=2))
    out.xi_estimates = ests
    xi = ests[0].limit
    flags = {}
    if xi < -tol or xi > 1 + tol:
        flags["clamped"] = True
        xi = min(max(xi, 0.0), 1.0)
    if len(ests) > 1:
        gap = abs(ests[0].limit - ests[1].limit)
        flags["pair_gap"] = gap
        flags["inconsistent"] = gap > max(3 * (ests[0].residual + ests[1].residual), 1e-4)
    flags["unreliable"] = any(e.unreliable for e in ests)
    out.xi = float(xi)
    out.flags = flags
    return out


def _iota_upper(rho, s, n):
    rho = np.asarray(rho, dtype=float)
    return np.where(np.isfinite(rho), np.abs(rho) ** (-2 * s), 0.0) / (2 * s)


def iota_estimate(E, s_grid=XI_S_GRID, quad: QuadSpec | None = None, n_angles: int = 2048) -> LimitEstimate:
    """Extrapolate ``s int_{E minus B_1} |x|^{-n-2s} dx`` to ``s -> 0+``.

    Rays from the origin; on the line the geometry is exact.
    """
    if isinstance(E, IntervalSet) or (E.dim == 1 and E.intervals is not None):
        F = _iv(E).minus(IntervalSet.of([(-1.0, 1.0)]))
        segs = [[(a, b) for a, b in F if a >= 0], [(-b, -a) for a, b in F if b <= 0]]
        dw = np.array([1.0, 1.0])
    else:
        n = E.dim
        dirs, dw = _directions(n, n_angles)
        segs = _ray_segments(lambda p: E(p), np.zeros(n), dirs, 1.0, 1e8)
    vals = []
    for s in s_grid:
        vals.append(_radial_sum(segs, dw, s, 1, _iota_upper))
    return extrapolate_limit(s_grid, vals, degree=2)


# ---------------------------------------------------------------- limit verifiers

def _mu(kernel, S: IntervalSet) -> float:
    if S.is_empty:
        return 0.0
    if not S.bounded:
        return math.inf
    return measure_of(kernel.measure, interval_union(S.parts))


def _limit_of_perimeter(kernel, E, Omega, s_grid, quad):
    pers = [perimeter_dunkl(kernel, E, Omega, s, quad) for s in s_grid]
    if pers[int(np.argmax(s_grid))].infinite:
        raise DivergenceError("perimeter is infinite at the largest s")
    return extrapolate_limit(s_grid, [p.value for p in pers]), pers


def relative_limit_verify(kernel: HeatKernel, E, Omega, s_grid=PERIMETER_S_GRID,
                          quad: QuadSpec | None = None, xi_s_grid=XI_S_GRID, rtol: float = 0.02) -> dict:
    """Compare the extrapolated ``s Per_s(E, Omega)`` with ``2[(1 - Xi) mu(E∩Ω) + Xi mu(Eᶜ∩Ω)]``."""
    quad = quad or QuadSpec()
    O = _iv(Omega)
    if not O.bounded:
        raise ValueError("Omega must be bounded")
    Ei = _iv(E)
    est, pers = _limit_of_perimeter(kernel, Ei, O, s_grid, quad)
    xi_E = xi_estimate(kernel, Ei, s_grid=xi_s_grid, quad=quad)
    xi_Ec = xi_estimate(kernel, Ei.complement(), s_grid=xi_s_grid, quad=quad)
    m_in = _mu(kernel, Ei.intersect(O))
    m_out = _mu(kernel, Ei.complement().intersect(O))
    xi = xi_E.xi
    target = 2 * ((1 - xi) * m_in + xi * m_out)
    first_form = 2 * xi_Ec.xi * m_in + 2 * xi * m_out
    est.target, est.target_name = target, "relative perimeter limit"
    forms_agree = abs(first_form - target) <= 3 * max(est.residual, 1e-3) * max(1.0, abs(target))
    balanced = abs(m_in - m_out) <= 5 * quad.rtol * max(1.0, m_in, m_out)
    return {"estimate": est, "limit": est.limit, "target": target, "first_form": first_form,
            "forms_agree": bool(forms_agree), "xi_E": xi, "xi_Ec": xi_Ec.xi,
            "xi_sum": xi + xi_Ec.xi, "mu_in": m_in, "mu_out": m_out, "balanced": bool(balanced),
            "balanced_target": 2 * m_in if balanced else None,
            "relative_error": est.relative_error, "passed": est.passes(rtol=rtol) and not est.unreliable,
            "perimeters": [p.value for p in pers], "s": list(map(float, s_grid))}


def converse_xi_recover(kernel: HeatKernel, E, Omega, s_grid=PERIMETER_S_GRID, quad: QuadSpec | None = None,
                        xi_s_grid=XI_S_GRID, boundary_report=None, atol: float = 0.05) -> dict:
    """Recover Xi from the perimeter limit when ``mu(E∩Ω) != mu(Eᶜ∩Ω)``."""
    quad = quad or QuadSpec()
    O, Ei = _iv(Omega), _iv(E)
    m_in = _mu(kernel, Ei.intersect(O))
    m_out = _mu(kernel, Ei.complement().intersect(O))
    if abs(m_in - m_out) <= 5 * quad.rtol * max(1.0, m_in, m_out):
        raise ValueError("measures are balanced; Xi cannot be recovered from the limit")
    est, _ = _limit_of_perimeter(kernel, Ei, O, s_grid, quad)
    recovered = (est.limit - 2 * m_in) / (2 * (m_out - m_in))
    direct = xi_estimate(kernel, Ei, s_grid=xi_s_grid, quad=quad).xi
    if boundary_report is None:
        from .fractal import boundary_condition_fit
        boundary_report = boundary_condition_fit(interval_union(O.parts), kernel.measure)
    return {"recovered": float(recovered), "direct": direct, "gap": abs(recovered - direct),
            "passed": abs(recovered - direct) <= atol, "limit": est.limit, "estimate": est,
            "mu_in": m_in, "mu_out": m_out, "boundary": boundary_report}


# ---------------------------------------------------------------- weighted perimeter

def _clip(S: IntervalSet, L: float) -> IntervalSet:
    return S.intersect(IntervalSet.of([(-L, L)]))


def _correlation(A, B, dens, u, n):
    """``C(u) = int 1_A(x) 1_B(x + u) dens(x) dens(x + u) dx``."""
    X = A.intersect(B.shift(-u))
    if X.is_empty:
        return 0.0
    gx, gw = gauss_legendre(n)
    total = 0.0
    for a, b in X:
        inner = sorted({a, b} | {c for c in (0.0, -u) if a < c < b})
        for lo, hi in zip(inner[:-1], inner[1:]):
            x = (lo + hi) / 2 + (hi - lo) / 2 * gx
            total += float(np.sum((hi - lo) / 2 * gw * dens(x) * dens(x + u)))
    return total


def weighted_interaction(measure: WeightedMeasure, A, B, s: float, quad: QuadSpec | None = None,
                         cutoff: float = 12.0) -> float:
    """``int_A int_B |x - y|^{-(2 chi + 1 + 2s)} nu(dy) nu(dx)`` on the line.

    Written as ``int_0^inf u^{-alpha} [C_+(u) + C_-(u)] du`` with correlation
    functions of the Gaussian-weighted densities.  Raises ``DivergenceError``
    when the near-diagonal power law is not integrable.
    """
    quad = quad or QuadSpec()
    if measure.dim != 1:
        raise UnsupportedError("weighted perimeter is implemented in one dimension")
    A, B = _clip(_iv(A), cutoff), _clip(_iv(B), cutoff)
    _check_disjoint(A, B)
    if A.is_empty or B.is_empty:
        return 0.0
    c = mm_constant(measure)
    kap = float(measure.spec.coordinate_kappas[0])
    alpha = 2 * kap + 1 + 2 * s
    dens = lambda y: np.exp(-0.5 * y * y) * _engine.axis_weight(kap, y) / c
    n = quad.nodes
    ends = sorted(set(A.endpoints) | set(B.endpoints))
    knots = sorted({abs(p - q) for p in ends for q in ends if abs(p - q) > 0} | {abs(p) for p in ends if p})
    umax = 2 * cutoff
    knots = [k for k in knots if k < umax] + [umax]
    C = lambda u: _correlation(A, B, dens, u, n) + _correlation(B, A, dens, u, n)
    total = 0.0
    us, ws = log_time_rule(1e-12, knots[0], quad.t_panel, quad.t_nodes)
    cu = np.array([C(u) for u in us])
    total += float(np.sum(ws * us ** (1 - alpha) * cu))
    gx, gw = gauss_legendre(n)
    for lo, hi in zip(knots[:-1], knots[1:]):
        u = (lo + hi) / 2 + (hi - lo) / 2 * gx
        total += float(np.sum((hi - lo) / 2 * gw * u ** (-alpha) * np.array([C(v) for v in u])))
    if cu[0] > 0 and cu[1] > 0:
        beta = math.log(cu[1] / cu[0]) / math.log(us[1] / us[0])
        if beta - alpha + 1 <= 0.02:
            raise DivergenceError(f"weighted interaction diverges at the diagonal (C ~ u^{beta:.3f})")
        total += cu[0] * us[0] ** (1 - alpha) / (beta - alpha + 1)
    return total


def weighted_perimeter(measure: WeightedMeasure, E, Omega, s: float, quad: QuadSpec | None = None) -> float:
    """The Gaussian-weighted three-term perimeter (``inf`` if an interaction diverges)."""
    if not 0 < s < 0.5:
        raise ValueError("s must lie in (0, 1/2)")
    total = 0.0
    for A, B in _pieces(E, Omega):
        try:
            total += weighted_interaction(measure, A, B, s, quad)
        except DivergenceError:
            return math.inf
    return total


def weighted_vanishing_trend(measure: WeightedMeasure, E, Omega, s_grid=(0.2, 0.1, 0.05, 0.02),
                             quad: QuadSpec | None = None) -> dict:
    """``s * weighted perimeter`` along a decreasing grid; checks monotone decay toward 0."""
    s_grid = [float(s) for s in s_grid]
    vals = [weighted_perimeter(measure, E, Omega, s, quad) for s in s_grid]
    scaled = [s * v for s, v in zip(s_grid, vals)]
    finite = all(math.isfinite(v) for v in scaled)
    decreasing = finite and all(b < a for a, b in zip(scaled[:-1], scaled[1:]))
    ratio = scaled[-1] / scaled[0] if finite and scaled[0] > 0 else math.nan
    return {"s": s_grid, "values": vals, "s_times_value": scaled, "decreasing": decreasing,
            "final_over_first": ratio, "passed": bool(decreasing and ratio < 0.1)}


# ---------------------------------------------------------------- property suite

def _random_union(rng, lo=-2.0, hi=2.0, max_parts=2):
    k = int(rng.integers(1, max_parts + 1))
    pts = np.sort(rng.uniform(lo, hi, 2 * k))
    return IntervalSet.of(zip(pts[::2], pts[1::2]))


def perimeter_properties_suite(kernel: HeatKernel, s: float = 0.2, quad: QuadSpec | None = None,
                               n_instances: int = 10, seed: int = 0, slack: float = 2.0) -> dict:
    """Randomized checks of the basic perimeter properties on interval unions.

    Tolerances are ``slack * quad.rtol`` relative to the larger side.
    """
    quad = quad or QuadSpec()
    rng = np.random.default_rng(seed)
    tol = slack * quad.rtol
    per = lambda A, O: perimeter_dunkl(kernel, A, O, s, quad).value
    report = {}

    rows = []
    for _ in range(n_instances):
        A, O = _random_union(rng), _random_union(rng, -3, 3)
        rows.append(abs(per(A.reflect(), O.reflect()) - per(A, O)) / max(per(A, O), 1e-300))
    report["g_invariance"] = {"max_rel_dev": max(rows), "passed": max(rows) <= tol}

    rows = []
    for _ in range(n_instances):
        A, B, O = _random_union(rng), _random_union(rng), _random_union(rng, -3, 3)
        lhs, rhs = per(A.union(B), O), per(A, O) + per(B, O)
        rows.append((rhs - lhs) / max(rhs, 1e-300))
    report["subadditivity"] = {"min_rel_slack": min(rows), "passed": min(rows) >= -tol}

    rows = []
    for _ in range(n_instances):
        A, U1 = _random_union(rng), _random_union(rng, -3, 3)
        U2 = U1.union(_random_union(rng, -3, 3))
        lo, hi = per(A, U1), per(A, U2)
        rows.append((hi - lo) / max(hi, 1e-300))
    report["domain_monotonicity"] = {"min_rel_slack": min(rows), "passed": min(rows) >= -tol}

    rows, ratios = [], []
    for _ in range(n_instances):
        A, O = _random_union(rng), _random_union(rng, -3, 3)
        r = float(rng.uniform(0.5, 3))
        base = perimeter_classical(A, O, s, quad).value
        scaled = perimeter_classical(A.scale(r), O.scale(r), s, quad).value
        rows.append(abs(scaled / (r ** (1 - 2 * s) * base) - 1))
        ratios.append(2 ** (2 * s + 1) * gamma(0.5 + s) / math.sqrt(math.pi))
    report["classical_scaling"] = {"max_rel_dev": max(rows), "passed": max(rows) <= 1e-6,
                                   "dunkl_to_classical_factor": ratios[0]}

    rows = []
    for _ in range(n_instances):
        A, O = _random_union(rng), _random_union(rng, -3, 3)
        z = float(rng.uniform(-5, 5))
        base = perimeter_classical(A, O, s, quad).value
        rows.append(abs(perimeter_classical(A.shift(z), O.shift(z), s, quad).value - base) / base)
    report["classical_translation"] = {"max_rel_dev": max(rows), "passed": max(rows) <= 1e-6}

    A = IntervalSet.of([(0.0, 0.4), (0.6, 1.0)])
    B = IntervalSet.of([(0.0, 1.0)])
    O = IntervalSet.of([(-2.0, 2.0)])
    pa, pb = per(A, O), per(B, O)
    report["non_monotonicity"] = {"A": list(A.parts), "B": list(B.parts), "per_A": pa, "per_B": pb,
                                  "passed": pa > pb}
    report["passed"] = all(v["passed"] for v in report.values() if isinstance(v, dict))
    return report
