"""Root systems, the Dunkl weight and measure, the pseudo-metric, ball volumes
and the Macdonald-Mehta constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.stats import qmc

from .quad import AccuracyError, QuadSpec, UnsupportedError, gauss_legendre
from .regions import Region, ball
from .specfun import gamma

__all__ = ["RootSystemSpec", "WeightedMeasure", "weight", "measure_of", "pseudo_dist",
           "ball_volume", "mm_constant", "mm_constant_report", "root_system_from_config"]

_SQRT2 = math.sqrt(2.0)
_MAX_GROUP = 1024


def _reflection(alpha):
    a = np.asarray(alpha, dtype=float)
    return np.eye(a.size) - 2.0 * np.outer(a, a) / (a @ a)


def _close_group(gens, n):
    elems = [np.eye(n)]
    frontier = [np.eye(n)]
    while frontier:
        new = []
        for g in frontier:
            for s in gens:
                h = s @ g
                if not any(np.max(np.abs(h - e)) < 1e-10 for e in elems):
                    elems.append(h)
                    new.append(h)
                    if len(elems) > _MAX_GROUP:
                        raise ValueError("reflection group exceeds 1024 elements; malformed roots?")
        frontier = new
    return elems


@dataclass(frozen=True)
class RootSystemSpec:
    """Positive roots (normalized to length sqrt 2) with multiplicities.

    The reflection group is generated on construction.  Multiplicities must be
    nonnegative and constant on group orbits.
    """

    dimension: int
    positive_roots: tuple = ()
    multiplicities: tuple = ()
    preset: str = "explicit"
    group_elements: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        n = int(self.dimension)
        if n < 1:
            raise ValueError("dimension must be positive")
        roots = tuple(tuple(float(v) for v in r) for r in self.positive_roots)
        kap = tuple(float(k) for k in self.multiplicities)
        if len(roots) != len(kap):
            raise ValueError("need one multiplicity per positive root")
        normed = []
        for r in roots:
            a = np.asarray(r)
            if a.size != n or not np.any(a):
                raise ValueError(f"bad root {r}")
            normed.append(tuple(a * _SQRT2 / np.linalg.norm(a)))
        if any(k < 0 for k in kap):
            raise ValueError("multiplicities must be nonnegative")
        object.__setattr__(self, "positive_roots", tuple(normed))
        object.__setattr__(self, "multiplicities", kap)
        gens = [_reflection(a) for a in normed]
        elems = _close_group(gens, n)
        object.__setattr__(self, "group_elements", tuple(elems))
        self._validate()

    def _validate(self):
        R = np.array(self.positive_roots).reshape(-1, self.dimension)
        for g in self.group_elements:
            for a, k in zip(R, self.multiplicities):
                ga = g @ a
                hit = [i for i, b in enumerate(R) if np.allclose(ga, b, atol=1e-9) or np.allclose(ga, -b, atol=1e-9)]
                if not hit:
                    raise ValueError("positive roots are not closed under the reflection group")
                if abs(self.multiplicities[hit[0]] - k) > 1e-12:
                    raise ValueError("multiplicity is not invariant under the reflection group")

    @property
    def chi(self) -> float:
        return float(sum(self.multiplicities))

    @property
    def order(self) -> int:
        return len(self.group_elements)

    @cached_property
    def coordinate_kappas(self):
        """Per-axis multiplicities when every root is a coordinate root, else None."""
        kap = np.zeros(self.dimension)
        for a, k in zip(self.positive_roots, self.multiplicities):
            nz = np.flatnonzero(np.abs(a) > 1e-12)
            if nz.size != 1:
                return None
            kap[nz[0]] = k
        return kap

    def components(self):
        """Irreducible components as (root indices, span dimension)."""
        m = len(self.positive_roots)
        R = np.array(self.positive_roots).reshape(m, self.dimension)
        seen, comps = set(), []
        for i in range(m):
            if i in seen:
                continue
            stack, comp = [i], []
            seen.add(i)
            while stack:
                j = stack.pop()
                comp.append(j)
                for k in range(m):
                    if k not in seen and abs(R[j] @ R[k]) > 1e-12:
                        seen.add(k)
                        stack.append(k)
            comps.append((sorted(comp), int(np.linalg.matrix_rank(R[comp]))))
        return comps

    def to_config(self) -> dict:
        if self.preset in ("trivial", "z2", "z2_product"):
            d = {"dimension": self.dimension, "preset": self.preset}
            if self.preset == "z2":
                d["multiplicities"] = list(self.multiplicities)
            elif self.preset == "z2_product":
                d["multiplicities"] = self.coordinate_kappas.tolist()
            return d
        return {"dimension": self.dimension, "roots": [list(r) for r in self.positive_roots],
                "multiplicities": list(self.multiplicities)}

    @classmethod
    def trivial(cls, n: int = 1) -> "RootSystemSpec":
        return cls(n, (), (), "trivial")

    @classmethod
    def z2(cls, kappa: float) -> "RootSystemSpec":
        return cls(1, ((_SQRT2,),), (kappa,), "z2")

    @classmethod
    def z2_product(cls, kappas) -> "RootSystemSpec":
        kappas = [float(k) for k in kappas]
        n = len(kappas)
        roots = tuple(tuple(_SQRT2 * float(i == j) for j in range(n)) for i in range(n))
        return cls(n, roots, tuple(kappas), "z2_product")


def root_system_from_config(d) -> RootSystemSpec:
    if not isinstance(d, dict):
        raise ValueError("root_system must be an object")
    n = int(d.get("dimension", 1))
    preset = d.get("preset")
    mult = d.get("multiplicities", [])
    if preset == "trivial":
        return RootSystemSpec.trivial(n)
    if preset == "z2":
        if n != 1 or len(mult) != 1:
            raise ValueError("z2 preset needs dimension 1 and one multiplicity")
        return RootSystemSpec.z2(mult[0])
    if preset == "z2_product":
        if len(mult) != n:
            raise ValueError("z2_product needs one multiplicity per coordinate")
        return RootSystemSpec.z2_product(mult)
    if preset is not None:
        raise ValueError(f"unknown root-system preset {preset!r}")
    if "roots" not in d:
        raise ValueError("root_system needs a preset or an explicit root list")
    return RootSystemSpec(n, tuple(map(tuple, d["roots"])), tuple(mult))


class WeightedMeasure:
    """The measure ``mu = w dx`` with ``w(x) = prod |<a, x>|^{2 kappa(a)}``."""

    def __init__(self, spec: RootSystemSpec):
        self.spec = spec
        self.chi = spec.chi
        self._roots = np.array(spec.positive_roots, dtype=float).reshape(-1, spec.dimension)
        self._kap = np.array(spec.multiplicities, dtype=float)

    @property
    def dim(self) -> int:
        return self.spec.dimension

    def __repr__(self):
        return f"WeightedMeasure({self.spec.preset}, kappa={list(self.spec.multiplicities)})"

    def weight(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.dim == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        out = np.ones(x.shape[:-1])
        for a, k in zip(self._roots, self._kap):
            if k:
                out = out * np.abs(x @ a) ** (2 * k)
        return out

    def weight_1d(self, axis: int, y):
        """Per-axis factor for coordinate root systems: ``(sqrt2 |y|)^{2 kappa_i}``."""
        k = self.spec.coordinate_kappas[axis]
        return (_SQRT2 * np.abs(y)) ** (2 * k) if k else np.ones_like(np.asarray(y, float))

    def antiderivative_1d(self, axis: int, y):
        """``int_0^y`` of the axis factor."""
        k = self.spec.coordinate_kappas[axis]
        y = np.asarray(y, dtype=float)
        return 2.0 ** k * np.sign(y) * np.abs(y) ** (2 * k + 1) / (2 * k + 1)


def weight(measure: WeightedMeasure, x):
    return measure.weight(x)


def _interval_measure(measure, axis, a, b):
    if not (math.isfinite(a) and math.isfinite(b)):
        raise UnsupportedError("unbounded region has infinite measure")
    return float(measure.antiderivative_1d(axis, b) - measure.antiderivative_1d(axis, a))


def _qmc_measure(measure, region, quad):
    if region.bbox is None:
        raise UnsupportedError("predicate region needs a bounding box")
    lo, hi = region.bbox
    vol = float(np.prod(hi - lo))
    reps = 8
    m = max(1, int(round(math.log2(max(quad.mc_samples // reps, 2)))))
    est = []
    for r in range(reps):
        pts = qmc.Sobol(region.dim, scramble=True, seed=quad.seed + r).random_base2(m)
        x = lo + pts * (hi - lo)
        est.append(vol * np.mean(region(x) * measure.weight(x)))
    est = np.array(est)
    return float(est.mean()), float(est.std(ddof=1) / math.sqrt(reps))


def _ball_polar(measure, center, radius, nr=64, nang=512):
    n = measure.dim
    c = np.asarray(center, dtype=float)
    gx, gw = gauss_legendre(nr)
    rho = 0.5 * radius * (gx + 1)
    wr = 0.5 * radius * gw * rho ** (n - 1)
    if n == 2:
        th = (np.arange(nang) + 0.5) * 2 * math.pi / nang
        dirs = np.stack([np.cos(th), np.sin(th)], -1)
        wd = np.full(nang, 2 * math.pi / nang)
    elif n == 3:
        tx, tw = gauss_legendre(nang // 8)
        ph = (np.arange(nang // 4) + 0.5) * 2 * math.pi / (nang // 4)
        ct, P = np.meshgrid(tx, ph, indexing="ij")
        st = np.sqrt(1 - ct ** 2)
        dirs = np.stack([st * np.cos(P), st * np.sin(P), ct], -1).reshape(-1, 3)
        wd = (tw[:, None] * np.full(ph.size, 2 * math.pi / ph.size)).ravel()
    else:
        raise UnsupportedError("polar ball quadrature supports n = 2, 3")
    pts = c + rho[:, None, None] * dirs[None]
    return float(np.einsum("i,j,ij->", wr, wd, measure.weight(pts)))


def measure_of(measure: WeightedMeasure, region: Region, quad: QuadSpec | None = None,
               return_error: bool = False):
    """``mu(region)``.

    Axis-aligned tagged regions under coordinate root systems are integrated
    exactly; balls by polar Gauss rules; bare predicates by scrambled Sobol
    sampling over the bounding box (the standard error is returned when
    ``return_error`` is set).
    """
    quad = quad or QuadSpec()
    err = 0.0
    kap = measure.spec.coordinate_kappas
    kind = region.tag.get("kind")
    if region.dim != measure.dim:
        raise ValueError("region and measure dimensions differ")
    if region.intervals is not None and kap is not None:
        val = sum(_interval_measure(measure, 0, a, b) for a, b in region.intervals)
    elif kind == "axis_box" and kap is not None:
        lo, hi = region.tag["lo"], region.tag["hi"]
        val = float(np.prod([_interval_measure(measure, i, lo[i], hi[i]) for i in range(measure.dim)]))
    elif kind == "ball" and measure.dim in (2, 3):
        val = _ball_polar(measure, region.tag["center"], region.tag["radius"])
    elif region.intervals is not None:
        if not region.intervals.bounded:
            raise UnsupportedError("unbounded region has infinite measure")
        val = 0.0
        for a, b in region.intervals:
            pts = [p for p in (0.0,) if a < p < b]
            v, e = integrate.quad(lambda y: float(measure.weight(np.array([y]))[0]), a, b,
                                  points=pts or None, epsabs=0, epsrel=quad.rtol, limit=200)
            val += v
            err += e
    else:
        val, err = _qmc_measure(measure, region, quad)
    return (val, err) if return_error else val


def pseudo_dist(spec: RootSystemSpec, x, y):
    """``d(x, y) = min_g |x - g y|``; broadcasts over leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if spec.dimension == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x, y = x[..., None], y[..., None]
    best = None
    for g in spec.group_elements:
        d = np.linalg.norm(x - y @ g.T, axis=-1)
        best = d if best is None else np.minimum(best, d)
    return best if best.ndim else float(best)


def ball_volume(measure: WeightedMeasure, x, r: float, quad: QuadSpec | None = None) -> float:
    """``V(x, r) = mu(B(x, r))`` for the Euclidean ball."""
    if r <= 0:
        raise ValueError("radius must be positive")
    return measure_of(measure, ball(x, r), quad)


def _mm_product_formula(kap, chi, n):
    val = (2 * math.pi) ** (n / 2)
    for k in kap:
        val *= gamma(k + chi + 1) / gamma(chi + 1)
    return val


def mm_constant_report(measure: WeightedMeasure, quad: QuadSpec | None = None) -> dict:
    """Macdonald-Mehta constant by quadrature, with both product-formula readings.

    ``literal`` applies the product over all positive roots with the global
    chi; ``per_component`` applies it on each irreducible component (its own
    chi) and multiplies, which is what the Gaussian integral factorizes into
    for orthogonal sums such as Z2^n.
    """
    quad = quad or QuadSpec()
    spec = measure.spec
    n = measure.dim
    kap = spec.coordinate_kappas
    if kap is not None:
        vals = []
        for i in range(n):
            f = lambda y, i=i: float(math.exp(-0.5 * y * y) * measure.weight_1d(i, y))
            a, ea = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
            b, eb = integrate.quad(f, -np.inf, 0, epsabs=0, epsrel=1e-13, limit=200)
            vals.append(a + b)
            if (ea + eb) > 1e-8 * (a + b):
                raise AccuracyError("Gaussian moment quadrature did not converge")
        quadv = float(np.prod(vals))
    else:
        m = 40
        hx, hw = np.polynomial.hermite_e.hermegauss(m)
        grids = np.meshgrid(*([hx] * n), indexing="ij")
        pts = np.stack(grids, -1)
        wts = np.ones_like(grids[0])
        for g in np.meshgrid(*([hw] * n), indexing="ij"):
            wts = wts * g
        quadv = float(np.sum(wts * measure.weight(pts)))
    literal = _mm_product_formula(spec.multiplicities, spec.chi, n)
    per = (2 * math.pi) ** (n / 2)
    for idx, _ in spec.components():
        ks = [spec.multiplicities[i] for i in idx]
        c = sum(ks)
        for k in ks:
            per *= gamma(k + c + 1) / gamma(c + 1)
    rel = lambda a: abs(a - quadv) / quadv
    return {
        "quadrature": quadv,
        "literal_formula": literal,
        "per_component_formula": per,
        "literal_agrees": rel(literal) <= 1e-6,
        "per_component_agrees": rel(per) <= 1e-6,
    }


def mm_constant(measure: WeightedMeasure, quad: QuadSpec | None = None) -> float:
    """``int exp(-|x|^2/2) mu(dx)`` (the quadrature value)."""
    return mm_constant_report(measure, quad)["quadrature"]
