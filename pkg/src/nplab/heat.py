"""Heat kernels for the trivial and Z2^n reflection groups, semigroup
application, and numeric checks of the kernel's basic properties.

The rank-one kernel is

    p_t(x, y) = c^{-1} (2t)^{-(kappa + 1/2)} exp(-(x^2 + y^2) / 4t) E(x y / 2t)

with ``c = 2^{2 kappa + 1/2} Gamma(kappa + 1/2)`` the Gaussian mass of the
weight ``2^kappa |y|^{2 kappa}`` and ``E`` the rank-one Dunkl kernel.  Products
over coordinates give the Z2^n kernel; ``kappa = 0`` gives the Gaussian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _engine
from .dunkl import WeightedMeasure, ball_volume, pseudo_dist
from .fields import ScalarField
from .quad import AccuracyError, QuadSpec, UnsupportedError, gauss_jacobi, graded_rule
from .regions import IntervalSet
from .specfun import bessel_asymptotic_coeffs, bessel_ie, gamma

__all__ = ["HeatKernel", "kernel_eval", "dunkl_kernel_scaled", "dunkl_kernel_bessel",
           "rank_one_kernel", "semigroup_apply", "completeness_check", "semigroup_check",
           "ultracontractivity_exponent", "KernelBoundFit", "fit_kernel_bound",
           "RegularityFit", "kernel_regularity_probe", "UnderflowError"]

_ASYMPTOTIC_Z = 30.0
# (|z| bound, Gauss-Jacobi order); the rule error for exp(z tau) is ~ |z|^{2n} / (2n)!
_JACOBI_TIERS = ((2.0, 12), (8.0, 24), (16.0, 40), (_ASYMPTOTIC_Z, 64))
_CHUNK = 1 << 16


class UnderflowError(ArithmeticError):
    """A fitted quantity fell below the representable range."""


def dunkl_kernel_scaled(kappa: float, z):
    """``E_kappa(z) exp(-|z|)`` for the rank-one Dunkl kernel, ``z = u v``.

    Gauss-Jacobi on the Beta-type integral for ``|z| <= 30``; beyond, the
    Bessel asymptotic series of the even/odd parts, summed coefficient-wise
    so the difference at negative ``z`` does not cancel.
    """
    z = np.asarray(z, dtype=float)
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if kappa == 0:
        return np.exp(z - np.abs(z))
    out = np.empty(z.shape)
    az = np.abs(z)
    small = az <= _ASYMPTOTIC_Z
    c = gamma(kappa + 0.5) / (gamma(kappa) * math.sqrt(math.pi))
    lower = -1.0
    for bound, order in _JACOBI_TIERS:
        sel = (az > lower) & (az <= bound)
        lower = bound
        if not np.any(sel):
            continue
        tau, w = gauss_jacobi(order, kappa - 1.0, kappa)
        zs = z[sel]
        res = np.empty(zs.size)
        for i in range(0, zs.size, _CHUNK):
            zz = zs[i:i + _CHUNK, None]
            res[i:i + _CHUNK] = c * (np.exp(zz * tau - np.abs(zz)) @ w)
        out[sel] = res
    big = ~small
    if np.any(big):
        ce = bessel_asymptotic_coeffs(kappa - 0.5)
        co = bessel_asymptotic_coeffs(kappa + 0.5)
        zb, ab = z[big], az[big]
        pos = zb > 0
        inv = 1.0 / ab
        acc = np.zeros_like(ab)
        for k in range(ce.size - 1, -1, -1):
            acc = acc * inv + np.where(pos, ce[k] + co[k], ce[k] - co[k])
        out[big] = gamma(kappa + 0.5) * (ab / 2) ** (0.5 - kappa) * acc / np.sqrt(2 * math.pi * ab)
    return out


def dunkl_kernel_bessel(kappa: float, z):
    """Independent evaluation of ``E_kappa(z) exp(-|z|)`` through ``I_{kappa -+ 1/2}``."""
    z = np.asarray(z, dtype=float)
    if kappa == 0:
        return np.exp(z - np.abs(z))
    az = np.abs(z)
    out = np.ones(z.shape)
    nz = az > 0
    a = az[nz]
    out[nz] = gamma(kappa + 0.5) * (a / 2) ** (0.5 - kappa) * (
        bessel_ie(kappa - 0.5, a) + np.sign(z[nz]) * bessel_ie(kappa + 0.5, a))
    return out


def mm_constant_1d(kappa: float) -> float:
    return 2.0 ** (2 * kappa + 0.5) * gamma(kappa + 0.5)


def rank_one_kernel(kappa: float, t: float, x, y, scaled_kernel=dunkl_kernel_scaled):
    """The one-dimensional heat kernel against ``2^kappa |y|^{2 kappa} dy``."""
    if not t > 0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if kappa == 0:
        return np.exp(-(x - y) ** 2 / (4 * t)) / math.sqrt(4 * math.pi * t)
    pref = (2 * t) ** (-(kappa + 0.5)) / mm_constant_1d(kappa)
    gauss = np.exp(-(np.abs(x) - np.abs(y)) ** 2 / (4 * t))
    return pref * gauss * scaled_kernel(kappa, x * y / (2 * t))


def _masked_kernel(kappa, t, x, y, w):
    """Kernel times weights, evaluating only where the weight is nonzero."""
    x, y = np.broadcast_arrays(x, y)
    out = np.zeros(w.shape)
    nz = w != 0
    if np.any(nz):
        out[nz] = w[nz] * rank_one_kernel(kappa, t, x[nz], y[nz])
    return out


@dataclass(frozen=True)
class HeatKernel:
    """Heat kernel of the Dunkl Laplacian for the trivial or Z2^n group."""

    measure: WeightedMeasure
    kind: str = ""

    def __post_init__(self):
        kap = self.measure.spec.coordinate_kappas
        if kap is None:
            raise UnsupportedError("heat kernels are available only for trivial and Z2^n groups")
        kind = "classical_gaussian" if not np.any(kap) else "dunkl_z2_product"
        if self.kind and self.kind != kind:
            raise ValueError(f"kind {self.kind!r} does not match the root system")
        object.__setattr__(self, "kind", kind)

    @property
    def dim(self) -> int:
        return self.measure.dim

    @property
    def kappas(self) -> np.ndarray:
        return self.measure.spec.coordinate_kappas

    @property
    def kappa(self) -> float:
        """The multiplicity of a one-dimensional kernel."""
        if self.dim != 1:
            raise UnsupportedError("this operation is implemented in one dimension")
        return float(self.kappas[0])

    @property
    def chi(self) -> float:
        return self.measure.chi

    @property
    def key(self):
        return (self.kind, self.dim, tuple(float(k) for k in self.kappas))

    def __call__(self, t, x, y):
        return kernel_eval(self, t, x, y)


def _points(k, x):
    x = np.asarray(x, dtype=float)
    if k.dim == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.shape[-1] != k.dim:
        raise ValueError("point dimension does not match the kernel")
    return x


def kernel_eval(k: HeatKernel, t: float, x, y):
    """``p_t(x, y)``; broadcasts over leading axes of ``x`` and ``y``."""
    if not t > 0:
        raise ValueError("t must be positive")
    x, y = _points(k, x), _points(k, y)
    out = 1.0
    for i, kap in enumerate(k.kappas):
        out = out * rank_one_kernel(float(kap), t, x[..., i], y[..., i])
    return out if np.ndim(out) else float(out)


def _axis_mass(kappa, t, x, domain, cuts, f, quad):
    y, w = _engine.inner_rule(x, t, domain, cuts, kappa, quad)
    pw = _masked_kernel(kappa, t, np.asarray(x, float)[:, None], y, w)
    if f is None:
        return pw.sum(axis=1)
    return np.sum(pw * f(y), axis=1)


def semigroup_apply(k: HeatKernel, f: ScalarField, t: float, x, quad: QuadSpec | None = None):
    """``P_t f(x) = int f(y) p_t(x, y) mu(dy)``.

    In one dimension the integral is cut at the breakpoints of ``f`` and
    truncated where the kernel is below ``exp(-trunc^2/4)``.  In higher
    dimensions ``f`` must be constant or supported in a declared box, and a
    tensor rule is used.
    """
    quad = quad or QuadSpec()
    if not t > 0:
        raise ValueError("t must be positive")
    xs = _points(k, x)
    flat = xs.reshape(-1, k.dim)
    if f.is_constant:
        out = f.params[0] * np.ones(flat.shape[0])
        for i, kap in enumerate(k.kappas):
            out = out * _axis_mass(float(kap), t, flat[:, i], IntervalSet.of([(-np.inf, np.inf)]), (), None, quad)
    elif f.support is None:
        raise UnsupportedError("function without declared support or decay")
    elif k.dim == 1:
        a, b = f.support
        out = _axis_mass(k.kappa, t, flat[:, 0], IntervalSet.of([(a, b)]), f.breakpoints, f, quad)
    else:
        lo, hi = (np.broadcast_to(np.asarray(v, float), (k.dim,)) for v in f.support)
        out = np.empty(flat.shape[0])
        for j, xp in enumerate(flat):
            grids, weights = [], []
            for i, kap in enumerate(k.kappas):
                y, w = _engine.inner_rule(xp[i:i + 1], t, IntervalSet.of([(lo[i], hi[i])]), (), float(kap), quad)
                keep = w[0] != 0
                grids.append(y[0][keep])
                weights.append(w[0][keep] * rank_one_kernel(float(kap), t, xp[i], y[0][keep]))
            mesh = np.stack(np.meshgrid(*grids, indexing="ij"), -1)
            wt = weights[0]
            for wi in weights[1:]:
                wt = np.multiply.outer(wt, wi)
            out[j] = np.sum(wt * f(mesh))
    out = out.reshape(xs.shape[:-1])
    return out if out.ndim else float(out)


def completeness_check(k: HeatKernel, t_grid, x_samples, quad: QuadSpec | None = None) -> dict:
    """Largest deviation of ``int p_t(x, .) d mu`` from 1.

    The integral is computed per coordinate and multiplied, which is exact
    for the product kernels supported here.
    """
    quad = quad or QuadSpec()
    xs = _points(k, np.asarray(x_samples, float)).reshape(-1, k.dim)
    rows = []
    whole = IntervalSet.of([(-np.inf, np.inf)])
    for t in t_grid:
        mass = np.ones(xs.shape[0])
        for i, kap in enumerate(k.kappas):
            mass = mass * _axis_mass(float(kap), float(t), xs[:, i], whole, (), None, quad)
        rows.append((float(t), float(np.max(np.abs(mass - 1.0)))))
    return {"max_deviation": max(r[1] for r in rows), "per_t": rows}


def _chapman_axis(kappa, s, t, x, y, quad):
    feats = sorted({x, -x, y, -y, 0.0})
    width = math.sqrt(min(s, t))
    R = max(abs(x), abs(y)) + quad.trunc * math.sqrt(max(s, t))
    pts = sorted(set(feats + [-R, R] + [0.5 * (u + v) for u, v in zip(feats[:-1], feats[1:])]))
    pts = np.array([p for p in pts if -R <= p <= R])
    a, b = pts[:-1], pts[1:]
    fa = np.array(feats)
    dl = np.abs(fa[None] - a[:, None]).min(1)
    dr = np.abs(fa[None] - b[:, None]).min(1)
    center = np.where(dl <= dr, a, b)
    u, w = _engine._assemble(a, b, center, np.full_like(a, _engine._GRADE * width), kappa, 2 * quad.nodes)
    u, w = u.ravel(), w.ravel()
    lhs = np.sum(w * rank_one_kernel(kappa, s, x, u) * rank_one_kernel(kappa, t, u, y))
    return float(lhs), float(rank_one_kernel(kappa, s + t, x, y))


def semigroup_check(k: HeatKernel, n_tuples: int = 20, seed: int = 0, quad: QuadSpec | None = None) -> dict:
    """Chapman-Kolmogorov on random ``(s, t, x, y)``; reports the worst relative deviation.

    The ``u``-integral factorizes over coordinates for product kernels.
    """
    quad = quad or QuadSpec()
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n_tuples):
        s, t = 10 ** rng.uniform(-1.5, 1, 2)
        x = rng.uniform(-2, 2, k.dim)
        y = rng.uniform(-2, 2, k.dim)
        lhs = rhs = 1.0
        for i, kap in enumerate(k.kappas):
            l, r = _chapman_axis(float(kap), float(s), float(t), float(x[i]), float(y[i]), quad)
            lhs, rhs = lhs * l, rhs * r
        rows.append({"s": float(s), "t": float(t), "x": x.tolist(), "y": y.tolist(),
                     "rel_dev": abs(lhs - rhs) / rhs})
    return {"max_rel_deviation": max(r["rel_dev"] for r in rows), "tuples": rows}


def _dual_norm_at_origin(k, t, p, quad):
    """``|| p_t(0, .) ||_{L^{p'}(mu)}``, the exact L^p -> L^inf norm of ``f -> P_t f(0)``."""
    val = 1.0
    whole = IntervalSet.of([(-np.inf, np.inf)])
    for kap in k.kappas:
        y, w = _engine.inner_rule(np.zeros(1), t, whole, (), float(kap), quad)
        ker = rank_one_kernel(float(kap), t, 0.0, y[0])
        if p == 1:
            val *= float(np.max(ker))
        else:
            q = p / (p - 1)
            val *= float(np.sum(w[0] * ker ** q)) ** (1 / q)
    return val


def ultracontractivity_exponent(k: HeatKernel, f: ScalarField | None, p: float, t_grid,
                                quad: QuadSpec | None = None) -> dict:
    """Least-squares slope of ``log`` of the semigroup size at the origin versus ``log t``.

    With a test function, fits ``|P_t f(0)|``; for fixed ``f`` with compact
    support this decays like ``t^{-(chi + n/2)}`` for every ``p``.  With
    ``f=None`` fits the operator norm ``sup_{||f||_p = 1} |P_t f(0)|``, which
    decays at the rate ``t^{-(chi + n/2)/p}``.
    """
    quad = quad or QuadSpec()
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 1) or t_grid.max() / t_grid.min() < 100:
        raise ValueError("t_grid must lie in [1, inf) and span at least two decades")
    if p < 1:
        raise ValueError("p must be >= 1")
    if f is None:
        vals = np.array([_dual_norm_at_origin(k, t, p, quad) for t in t_grid])
        expected = -(k.chi + k.dim / 2) / p
    else:
        vals = np.abs([semigroup_apply(k, f, t, np.zeros(k.dim), quad) for t in t_grid])
        expected = -(k.chi + k.dim / 2)
    if np.any(vals < 1e-300):
        raise UnderflowError("semigroup value underflowed")
    slope, icpt = np.polyfit(np.log(t_grid), np.log(vals), 1)
    return {"slope": float(slope), "intercept": float(icpt), "expected": expected,
            "mode": "operator_norm" if f is None else "fixed_function"}


@dataclass(frozen=True)
class KernelBoundFit:
    """Constants of ``p_t(x, y) <= c1 exp(-c2 d(x,y)^2 / t) / max(V(x, sqrt t), V(y, sqrt t))``."""

    c1: float
    c2: float

    def ratio(self, k: HeatKernel, t, x, y, quad=None) -> float:
        d = pseudo_dist(k.measure.spec, x, y)
        rt = math.sqrt(t)
        vol = max(ball_volume(k.measure, x, rt, quad), ball_volume(k.measure, y, rt, quad))
        return float(kernel_eval(k, t, x, y) * vol / (self.c1 * math.exp(-self.c2 * d * d / t)))


def _random_triples(rng, dim, m):
    t = 10 ** rng.uniform(-2, 1, m)
    x = rng.uniform(-3, 3, (m, dim))
    y = rng.uniform(-3, 3, (m, dim))
    return t, x, y


def fit_kernel_bound(k: HeatKernel, n_calib: int = 200, seed: int = 0, c2: float = 0.125,
                     safety: float = 1.5, quad: QuadSpec | None = None) -> KernelBoundFit:
    """Calibrate ``c1`` as ``safety`` times the worst ratio with ``c1 = 1`` and a fixed ``c2``."""
    rng = np.random.default_rng(seed)
    t, x, y = _random_triples(rng, k.dim, n_calib)
    unit = KernelBoundFit(1.0, c2)
    worst = max(unit.ratio(k, ti, xi, yi, quad) for ti, xi, yi in zip(t, x, y))
    return KernelBoundFit(safety * worst, c2)


@dataclass(frozen=True)
class RegularityFit:
    """Constants of the Lipschitz-type regularity bound.

    ``|p_t(x,z) - p_t(y,z)| <= c1 (|x-y|/sqrt t) exp(-c2 d(x,z)^2/t) / V(x, sqrt t)``
    for ``|x - y| <= c3 sqrt t``; otherwise the right side is the sum of the
    two Gaussian bounds at ``x`` and ``y``.
    """

    c1: float
    c2: float
    c3: float

    def rhs(self, k, t, x, y, z, quad=None):
        rt = math.sqrt(t)
        spec = k.measure.spec
        gx = math.exp(-self.c2 * pseudo_dist(spec, x, z) ** 2 / t) / ball_volume(k.measure, x, rt, quad)
        dxy = float(np.linalg.norm(np.atleast_1d(np.asarray(x, float) - np.asarray(y, float))))
        if dxy <= self.c3 * rt:
            return self.c1 * dxy / rt * gx
        gy = math.exp(-self.c2 * pseudo_dist(spec, y, z) ** 2 / t) / ball_volume(k.measure, y, rt, quad)
        return self.c1 * (gx + gy)

    def ratio(self, k, t, x, y, z, quad=None) -> float:
        num = abs(kernel_eval(k, t, x, z) - kernel_eval(k, t, y, z))
        if num == 0:
            return 0.0
        return float(num / self.rhs(k, t, x, y, z, quad))


def fit_regularity(k: HeatKernel, n_calib: int = 200, seed: int = 0, c2: float = 0.125,
                   c3: float = 0.5, safety: float = 1.5, quad: QuadSpec | None = None) -> RegularityFit:
    rng = np.random.default_rng(seed)
    t, x, y = _random_triples(rng, k.dim, n_calib)
    z = rng.uniform(-3, 3, (n_calib, k.dim))
    near = rng.random(n_calib) < 0.7
    y = np.where(near[:, None], x + rng.uniform(-1, 1, (n_calib, k.dim)) * c3 * np.sqrt(t)[:, None], y)
    unit = RegularityFit(1.0, c2, c3)
    worst = max(unit.ratio(k, *args, quad) for args in zip(t, x, y, z))
    return RegularityFit(safety * worst, c2, c3)


def kernel_regularity_probe(k: HeatKernel, t: float, x, y, z, fit: RegularityFit,
                            quad: QuadSpec | None = None) -> dict:
    r = fit.ratio(k, t, x, y, z, quad)
    return {"ratio": r, "ok": r <= 1.0, "c1": fit.c1, "c2": fit.c2, "c3": fit.c3}
