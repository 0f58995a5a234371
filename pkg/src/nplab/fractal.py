"""Weierstrass functions, box-counting dimension and the boundary-layer fit.

The boundary layer of a bounded open set ``Omega`` is
``D_r = {x in Omega : d(x, Omega^c) <= r}`` with ``d`` the orbit pseudo-distance
of the reflection group.  ``boundary_condition_fit`` estimates its weighted
measure on a geometric grid of ``r`` and fits ``mu(D_r) ~ c * r**eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from .dunkl import WeightedMeasure, measure_of
from .quad import QuadSpec, UnsupportedError
from .regions import IntervalSet, Region, interval_union

__all__ = ["WeierstrassSpec", "weierstrass_eval", "InsufficientScalesError", "BoxCountResult",
           "box_count_dimension", "box_scale_grid", "boundary_layer_measure", "BoundaryFit",
           "boundary_condition_fit"]


@dataclass(frozen=True)
class WeierstrassSpec:
    """``W(x) = sum_{k=0}^{terms} a^k cos(2 pi b^k x)`` with ``0 < a < 1 < b`` and ``ab > 1``."""

    a: float = 0.5
    b: float = 3.0
    terms: int = 16

    def __post_init__(self):
        if not 0 < self.a < 1 or self.b <= 1 or self.a * self.b <= 1:
            raise ValueError("need 0 < a < 1, b > 1 and a*b > 1")
        if int(self.terms) != self.terms or self.terms < 0:
            raise ValueError("terms must be a nonnegative integer")

    @property
    def graph_dimension(self) -> float:
        return 2 + math.log(self.a) / math.log(self.b)

    @property
    def eta(self) -> float:
        """Boundary-layer exponent of a domain bounded by the graph."""
        return -math.log(self.a) / math.log(self.b)

    @property
    def truncation_bound(self) -> float:
        return self.a ** (self.terms + 1) / (1 - self.a)


def weierstrass_eval(spec: WeierstrassSpec, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for k in range(int(spec.terms) + 1):
        # reduce the phase first so large b^k x keeps its fractional part
        phase = np.mod(spec.b ** k * x, 1.0)
        out = out + spec.a ** k * np.cos(2 * math.pi * phase)
    return out if out.ndim else float(out)


# ------------------------------------------------------------------ box counting

class InsufficientScalesError(ValueError):
    pass


@dataclass
class BoxCountResult:
    dimension: float
    intercept: float
    deltas: np.ndarray
    counts: np.ndarray
    fit_mask: np.ndarray
    residuals: np.ndarray
    content: np.ndarray

    def rows(self):
        res = np.full(self.deltas.size, np.nan)
        res[self.fit_mask] = self.residuals
        return [(float(d), int(c), float(r)) for d, c, r in zip(self.deltas, self.counts, res)]


def box_scale_grid(delta0: float, levels: int = 11):
    return delta0 * 2.0 ** -np.arange(levels)


def _graph_counts(func, lo, hi, deltas, density):
    h = deltas.min() / density
    n = int(math.ceil((hi - lo) / h)) + 1
    x = np.linspace(lo, hi, n)
    y = np.asarray(func(x), dtype=float)
    counts = []
    for d in deltas:
        col = np.minimum(((x - lo) / d).astype(np.int64), int(math.ceil((hi - lo) / d)) - 1)
        ncol = int(col.max()) + 1
        ymin = np.full(ncol, np.inf)
        ymax = np.full(ncol, -np.inf)
        np.minimum.at(ymin, col, y)
        np.maximum.at(ymax, col, y)
        # the graph is continuous: each column also reaches the next column's first sample
        first = np.full(ncol, np.nan)
        first[col[::-1]] = y[::-1]
        nxt = first[1:]
        has = ~np.isnan(nxt)
        ymin[:-1][has] = np.minimum(ymin[:-1][has], nxt[has])
        ymax[:-1][has] = np.maximum(ymax[:-1][has], nxt[has])
        counts.append(int(np.sum(np.floor(ymax / d) - np.floor(ymin / d) + 1)))
    return np.array(counts)


def _point_counts(points, lo, deltas):
    counts = []
    for d in deltas:
        idx = np.floor((points - lo) / d).astype(np.int64)
        counts.append(np.unique(idx, axis=0).shape[0])
    return np.array(counts)


def box_count_dimension(curve, window=None, deltas=None, drop: int = 2, density: int = 16,
                        phase: float = 0.0) -> BoxCountResult:
    """Box-counting dimension of a graph or a point set.

    ``curve`` is either a callable ``y = f(x)`` over ``window = (x_lo, x_hi)``
    (counted column by column, so the graph's vertical extent in each column is
    covered) or an array of points ``(N, d)`` sampled at least ``density`` per
    smallest box.  The fit of ``log N`` against ``log(1/delta)`` drops ``drop``
    scales at each end.  ``phase`` shifts the grid origin by that fraction of
    a box.
    """
    if callable(curve):
        if window is None:
            raise ValueError("a window (x_lo, x_hi) is needed for a graph")
        lo, hi = map(float, window)
        if deltas is None:
            deltas = box_scale_grid((hi - lo) / 4)
        deltas = np.asarray(deltas, dtype=float)
        shift = phase * deltas.min()
        counts = _graph_counts(lambda x: np.asarray(curve(x)) + shift, lo, hi, deltas, density)
    else:
        pts = np.asarray(curve, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if deltas is None:
            deltas = box_scale_grid(float(np.max(pts.max(axis=0) - pts.min(axis=0))) / 4)
        deltas = np.asarray(deltas, dtype=float)
        lo = pts.min(axis=0) - phase * deltas.min()
        counts = _point_counts(pts, lo, deltas)
    if deltas.max() / deltas.min() < 10 ** 2.5:
        raise InsufficientScalesError("the scale grid must span at least 2.5 decades")
    mask = np.zeros(deltas.size, bool)
    mask[drop:deltas.size - drop] = True
    if mask.sum() < 4:
        raise InsufficientScalesError("fewer than 4 scales left for the fit")
    X = np.log(1 / deltas[mask])
    Y = np.log(counts[mask])
    slope, icpt = np.polyfit(X, Y, 1)
    res = Y - (icpt + slope * X)
    # content proxy: neighbourhood area ~ N delta^n, normalised by delta^(n - dim)
    content = counts * deltas ** slope
    return BoxCountResult(float(slope), float(icpt), deltas, counts, mask, res, content)


# ------------------------------------------------------------- boundary layers

def _orbit_complement_1d(measure: WeightedMeasure, omega: IntervalSet) -> IntervalSet:
    comp = omega.complement()
    out = IntervalSet.of([])
    for g in measure.spec.group_elements:
        out = out.union(comp.reflect() if g[0, 0] < 0 else comp)
    return out


def _layer_1d(measure, omega: IntervalSet, r: float) -> IntervalSet:
    C = _orbit_complement_1d(measure, omega)
    grown = IntervalSet.of([(a - r, b + r) for a, b in C])
    return omega.intersect(grown)


def _distance_ball(region, pts):
    c = np.asarray(region.tag["center"], dtype=float)
    return region.tag["radius"] - np.linalg.norm(pts - c, axis=-1)


def _distance_box(region, pts):
    lo = np.asarray(region.tag["lo"], dtype=float)
    hi = np.asarray(region.tag["hi"], dtype=float)
    return np.min(np.minimum(pts - lo, hi - pts), axis=-1)


def _weierstrass_boundary(region, spacing):
    spec = region.weierstrass
    low = region.lower_curve
    x0, x1 = region.bbox[0][0], region.bbox[1][0]
    x = np.linspace(x0, x1, int(math.ceil((x1 - x0) / spacing)) + 1)
    top, bot = weierstrass_eval(spec, x), low(x)
    keep = top >= bot
    pts = np.concatenate([np.stack([x[keep], top[keep]], -1), np.stack([x[keep], bot[keep]], -1)])
    # fill vertical gaps of the graph polyline so the cloud resolves the curve
    seg = np.stack([x[keep], top[keep]], -1)
    gaps = np.abs(np.diff(seg[:, 1]))
    big = np.flatnonzero(gaps > spacing)
    extra = []
    for i in big:
        m = int(math.ceil(gaps[i] / spacing))
        tt = np.linspace(0, 1, m + 1)[1:-1, None]
        extra.append(seg[i] + tt * (seg[i + 1] - seg[i]))
    # side walls where the two curves meet
    edges = np.flatnonzero(np.diff(keep.astype(int)) != 0)
    for i in edges:
        j = i + 1 if keep[i + 1] else i
        ys = np.arange(bot[j], top[j], spacing)
        extra.append(np.stack([np.full_like(ys, x[j]), ys], -1))
    if extra:
        pts = np.concatenate([pts] + extra)
    return pts


def _distance_weierstrass(region, pts, spacing):
    tree = cKDTree(_weierstrass_boundary(region, spacing))
    d, _ = tree.query(pts, workers=-1)
    x, y = pts[:, 0], pts[:, 1]
    vertical = np.minimum(weierstrass_eval(region.weierstrass, x) - y, y - region.lower_curve(x))
    return d, vertical


def boundary_layer_measure(omega: Region, measure: WeightedMeasure, r_grid, quad: QuadSpec | None = None,
                           n_samples: int = 2 ** 18, spacing: float | None = None) -> dict:
    """Weighted measure of ``D_r`` for each ``r``; exact on the line, QMC in the plane."""
    quad = quad or QuadSpec()
    r_grid = np.asarray(r_grid, dtype=float)
    if omega.dim == 1:
        if omega.intervals is None or not omega.intervals.bounded:
            raise ValueError("Omega must be a bounded interval union")
        vals = [measure_of(measure, interval_union(_layer_1d(measure, omega.intervals, r).parts))
                for r in r_grid]
        return {"r": r_grid, "measure": np.array(vals), "stderr": np.zeros(r_grid.size), "method": "exact"}
    if omega.bbox is None:
        raise ValueError("Omega must be bounded")
    kind = (omega.tag or {}).get("kind")
    if measure.spec.order > 1:
        raise UnsupportedError("planar boundary layers are implemented for the trivial group")
    lo, hi = (np.asarray(v, dtype=float) for v in omega.bbox)
    vol = float(np.prod(hi - lo))
    reps = 4
    per = np.zeros((reps, r_grid.size))
    per_vert = np.zeros((reps, r_grid.size))
    for rep in range(reps):
        sob = qmc.Sobol(omega.dim, scramble=True, seed=np.random.default_rng([quad.seed, rep]))
        pts = lo + (hi - lo) * sob.random(n_samples // reps)
        inside = np.asarray(omega(pts), bool)
        pts = pts[inside]
        w = measure.weight(pts) * vol / (n_samples // reps)
        if kind == "ball":
            d, dv = _distance_ball(omega, pts), None
        elif kind == "axis_box":
            d, dv = _distance_box(omega, pts), None
        elif kind == "weierstrass_domain":
            d, dv = _distance_weierstrass(omega, pts, spacing or min(r_grid.min() / 8, 1e-3))
        else:
            raise UnsupportedError(f"no distance-to-complement rule for region kind {kind!r}")
        per[rep] = [np.sum(w[d <= r]) for r in r_grid]
        if dv is not None:
            per_vert[rep] = [np.sum(w[dv <= r]) for r in r_grid]
    out = {"r": r_grid, "measure": per.mean(0), "stderr": per.std(0, ddof=1) / math.sqrt(reps),
           "method": "qmc"}
    if kind == "weierstrass_domain":
        out["vertical_proxy"] = per_vert.mean(0)
    return out


@dataclass
class BoundaryFit:
    eta: float
    c_star: float
    c_star_bound: float
    eta_stderr: float
    residual: float
    unreliable: bool
    monotone: bool
    exceeds_2s0: object
    layers: dict

    def to_dict(self) -> dict:
        lay = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.layers.items()}
        return {"eta": self.eta, "c_star": self.c_star, "c_star_bound": self.c_star_bound,
                "eta_stderr": self.eta_stderr, "residual": self.residual, "unreliable": self.unreliable,
                "monotone": self.monotone, "exceeds_2s0": self.exceeds_2s0, "layers": lay}


def boundary_condition_fit(omega: Region, measure: WeightedMeasure, r_grid=None, quad: QuadSpec | None = None,
                           s0: float | None = None, n_samples: int = 2 ** 18,
                           residual_tol: float = 0.05) -> BoundaryFit:
    """Fit ``mu(D_r) ~ c_star * r**eta`` on a geometric grid of ``r``.

    ``c_star`` is the fitted prefactor; ``c_star_bound`` the smallest constant
    with ``mu(D_r) <= c * r**eta`` on the grid.  With ``s0`` the report says
    whether ``eta > 2 s0``, or ``"inconclusive"`` within two standard errors.
    """
    if r_grid is None:
        r_grid = np.geomspace(1e-3, 1e-1, 9)
    lay = boundary_layer_measure(omega, measure, r_grid, quad, n_samples)
    r, m = lay["r"], lay["measure"]
    ok = m > 0
    if ok.sum() < 3:
        raise ValueError("boundary layer measure vanishes on the grid")
    X, Y = np.log(r[ok]), np.log(m[ok])
    coef, cov = np.polyfit(X, Y, 1, cov=True) if ok.sum() > 3 else (np.polyfit(X, Y, 1), np.zeros((2, 2)))
    eta, icpt = float(coef[0]), float(coef[1])
    res = float(np.sqrt(np.mean((Y - (icpt + eta * X)) ** 2)))
    se = float(math.sqrt(max(cov[0, 0], 0.0)))
    verdict = None
    if s0 is not None:
        gap = eta - 2 * s0
        verdict = "inconclusive" if abs(gap) <= 2 * se else bool(gap > 0)
    order = np.argsort(r)
    monotone = bool(np.all(np.diff(m[order]) >= -1e-12))
    return BoundaryFit(eta, math.exp(icpt), float(np.max(m[ok] / r[ok] ** eta)), se, res,
                       res > residual_tol, monotone, verdict, lay)
