"""Measurable sets: interval unions on the line and tagged regions in R^n."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["IntervalSet", "Region", "interval", "interval_union", "half_line", "ball",
           "axis_box", "half_space", "sector", "whole", "empty", "weierstrass_domain",
           "region_from_config"]

INF = math.inf


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of disjoint open intervals, sorted.  Endpoints may be +-inf.

    Boundary points are ignored throughout (Lebesgue-null).
    """

    parts: tuple = ()

    @classmethod
    def of(cls, pieces) -> "IntervalSet":
        segs = sorted((float(a), float(b)) for a, b in pieces if float(b) > float(a))
        merged: list[list[float]] = []
        for a, b in segs:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged))

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    @property
    def is_empty(self) -> bool:
        return not self.parts

    @property
    def bounded(self) -> bool:
        return all(math.isfinite(a) and math.isfinite(b) for a, b in self.parts)

    @property
    def endpoints(self) -> tuple:
        return tuple(sorted({v for p in self.parts for v in p if math.isfinite(v)}))

    def complement(self) -> "IntervalSet":
        out, cur = [], -INF
        for a, b in self.parts:
            if a > cur:
                out.append((cur, a))
            cur = b
        if cur < INF:
            out.append((cur, INF))
        return IntervalSet.of(out)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a, b in self.parts:
            for c, d in other.parts:
                lo, hi = max(a, c), min(b, d)
                if hi > lo:
                    out.append((lo, hi))
        return IntervalSet.of(out)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.of(self.parts + other.parts)

    def minus(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersect(other.complement())

    def reflect(self) -> "IntervalSet":
        return IntervalSet.of((-b, -a) for a, b in self.parts)

    def shift(self, z: float) -> "IntervalSet":
        return IntervalSet.of((a + z, b + z) for a, b in self.parts)

    def scale(self, r: float) -> "IntervalSet":
        if r <= 0:
            raise ValueError("scale factor must be positive")
        return IntervalSet.of((a * r, b * r) for a, b in self.parts)

    def length(self) -> float:
        return sum(b - a for a, b in self.parts)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.parts:
            out |= (x > a) & (x < b)
        return out

    def ends(self) -> tuple[bool, bool]:
        """Whether the set reaches -inf and +inf."""
        if not self.parts:
            return False, False
        return self.parts[0][0] == -INF, self.parts[-1][1] == INF

    def split(self, cuts) -> list[tuple[float, float]]:
        """Pieces of the set after cutting at the given points."""
        cuts = sorted(set(float(c) for c in cuts))
        out = []
        for a, b in self.parts:
            edges = [a] + [c for c in cuts if a < c < b] + [b]
            out.extend(zip(edges[:-1], edges[1:]))
        return out


def _as_points(x, dim):
    x = np.asarray(x, dtype=float)
    if dim == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        return x[..., None]
    return x


class Region:
    """A measurable subset of R^n.

    Carries an indicator predicate, an optional bounding box and an optional
    analytic tag.  On the line every supported tag resolves to an
    ``IntervalSet`` (``self.intervals``) which the integrators use directly.
    """

    def __init__(self, dim, indicator, bbox=None, tag=None, intervals=None):
        self.dim = int(dim)
        self._indicator = indicator
        self.bbox = None if bbox is None else (np.asarray(bbox[0], float), np.asarray(bbox[1], float))
        self.tag = tag or {"kind": "predicate"}
        self.intervals = intervals

    def __call__(self, x) -> np.ndarray:
        pts = _as_points(x, self.dim)
        return np.asarray(self._indicator(pts), dtype=bool)

    def __repr__(self):
        if self.intervals is not None:
            return f"Region({list(self.intervals.parts)})"
        return f"Region(dim={self.dim}, tag={self.tag.get('kind')})"

    @property
    def bounded(self) -> bool:
        if self.intervals is not None:
            return self.intervals.bounded
        return self.bbox is not None

    @property
    def is_empty(self) -> bool:
        return self.intervals is not None and self.intervals.is_empty

    def complement(self) -> "Region":
        if self.intervals is not None:
            return _from_intervals(self.intervals.complement(), {"kind": "complement", "of": self.tag})
        ind = self._indicator
        return Region(self.dim, lambda p: ~np.asarray(ind(p), bool), None,
                      {"kind": "complement", "of": self.tag})

    def intersect(self, other: "Region") -> "Region":
        if self.intervals is not None and other.intervals is not None:
            return _from_intervals(self.intervals.intersect(other.intervals))
        a, b = self._indicator, other._indicator
        bbox = self.bbox if self.bbox is not None else other.bbox
        return Region(self.dim, lambda p: np.asarray(a(p), bool) & np.asarray(b(p), bool), bbox)

    def union(self, other: "Region") -> "Region":
        if self.intervals is not None and other.intervals is not None:
            return _from_intervals(self.intervals.union(other.intervals))
        a, b = self._indicator, other._indicator
        bbox = None
        if self.bbox is not None and other.bbox is not None:
            bbox = (np.minimum(self.bbox[0], other.bbox[0]), np.maximum(self.bbox[1], other.bbox[1]))
        return Region(self.dim, lambda p: np.asarray(a(p), bool) | np.asarray(b(p), bool), bbox)

    def transform(self, g) -> "Region":
        """Image ``gA`` under an orthogonal matrix ``g``."""
        g = np.atleast_2d(np.asarray(g, dtype=float))
        if self.dim == 1 and self.intervals is not None:
            iv = self.intervals if g[0, 0] > 0 else self.intervals.reflect()
            return _from_intervals(iv)
        ind = self._indicator
        ginv = g.T
        bbox = None
        if self.bbox is not None and np.allclose(np.abs(g), np.eye(self.dim)):
            lo, hi = g @ self.bbox[0], g @ self.bbox[1]
            bbox = (np.minimum(lo, hi), np.maximum(lo, hi))
        elif self.bbox is not None:
            rad = np.max(np.abs(np.stack(self.bbox)))
            bbox = (-rad * math.sqrt(self.dim) * np.ones(self.dim), rad * math.sqrt(self.dim) * np.ones(self.dim))
        return Region(self.dim, lambda p: ind(np.asarray(p) @ ginv.T), bbox,
                      {"kind": "transformed", "of": self.tag})

    def shift(self, z) -> "Region":
        if self.intervals is not None:
            return _from_intervals(self.intervals.shift(float(np.ravel(z)[0])))
        z = np.asarray(z, float)
        ind = self._indicator
        bbox = None if self.bbox is None else (self.bbox[0] + z, self.bbox[1] + z)
        return Region(self.dim, lambda p: ind(np.asarray(p) - z), bbox, {"kind": "shifted", "of": self.tag})

    def scale(self, r: float) -> "Region":
        if self.intervals is not None:
            return _from_intervals(self.intervals.scale(r))
        ind = self._indicator
        bbox = None if self.bbox is None else (self.bbox[0] * r, self.bbox[1] * r)
        return Region(self.dim, lambda p: ind(np.asarray(p) / r), bbox, {"kind": "scaled", "of": self.tag})

    def check_tag(self, n_probe: int = 10_000, seed: int = 0) -> bool:
        """Compare the tag-derived interval set with the predicate on random probes."""
        if self.intervals is None:
            return True
        rng = np.random.default_rng(seed)
        x = rng.uniform(-10, 10, n_probe)
        return bool(np.all(self.intervals.contains(x) == self(x)))


def _from_intervals(iv: IntervalSet, tag=None) -> Region:
    bbox = None
    if iv.bounded and not iv.is_empty:
        bbox = (np.array([iv.parts[0][0]]), np.array([iv.parts[-1][1]]))
    tag = tag or {"kind": "interval_union", "intervals": [list(p) for p in iv.parts]}
    return Region(1, lambda p, iv=iv: iv.contains(np.asarray(p)[..., 0]), bbox, tag, iv)


def interval_union(pieces) -> Region:
    return _from_intervals(IntervalSet.of(pieces))


def interval(a: float, b: float) -> Region:
    return interval_union([(a, b)])


def half_line(c: float, upper: bool = True) -> Region:
    return interval(c, INF) if upper else interval(-INF, c)


def whole(dim: int = 1) -> Region:
    if dim == 1:
        return interval(-INF, INF)
    return Region(dim, lambda p: np.ones(np.shape(p)[:-1], bool), None, {"kind": "whole"})


def empty(dim: int = 1) -> Region:
    if dim == 1:
        return interval_union([])
    return Region(dim, lambda p: np.zeros(np.shape(p)[:-1], bool),
                  (np.zeros(dim), np.zeros(dim)), {"kind": "empty"})


def ball(center, radius: float) -> Region:
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if c.size == 1:
        return _from_intervals(IntervalSet.of([(c[0] - radius, c[0] + radius)]),
                               {"kind": "ball", "center": c.tolist(), "radius": radius})
    return Region(c.size, lambda p: np.sum((np.asarray(p) - c) ** 2, axis=-1) < radius ** 2,
                  (c - radius, c + radius), {"kind": "ball", "center": c.tolist(), "radius": radius})


def axis_box(lo, hi) -> Region:
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    tag = {"kind": "axis_box", "lo": lo.tolist(), "hi": hi.tolist()}
    if lo.size == 1:
        return _from_intervals(IntervalSet.of([(lo[0], hi[0])]), tag)
    bbox = (lo, hi) if np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) else None
    return Region(lo.size, lambda p: np.all((np.asarray(p) > lo) & (np.asarray(p) < hi), axis=-1), bbox, tag)


def half_space(normal, offset: float = 0.0) -> Region:
    """``{x : <normal, x> > offset}``."""
    nv = np.atleast_1d(np.asarray(normal, dtype=float))
    tag = {"kind": "half_space", "normal": nv.tolist(), "offset": offset}
    if nv.size == 1:
        c = offset / nv[0]
        iv = IntervalSet.of([(c, INF)] if nv[0] > 0 else [(-INF, c)])
        return _from_intervals(iv, tag)
    return Region(nv.size, lambda p: np.asarray(p) @ nv > offset, None, tag)


def sector(theta: float, start: float = 0.0) -> Region:
    """Planar cone ``{x : angle(x) - start in (0, theta)}``."""
    def ind(p):
        p = np.asarray(p)
        ang = np.mod(np.arctan2(p[..., 1], p[..., 0]) - start, 2 * math.pi)
        return (ang > 0) & (ang < theta)
    return Region(2, ind, None, {"kind": "sector", "theta": theta, "start": start})


def weierstrass_domain(a: float = 0.5, b: float = 3.0, terms: int = 16, lower=None) -> Region:
    """Planar domain between a lower curve (default ``x^2 - 3/2``) and the Weierstrass graph."""
    from .fractal import WeierstrassSpec, weierstrass_eval

    spec = WeierstrassSpec(a, b, terms)
    low = lower or (lambda x: x * x - 1.5)
    top = 1.0 / (1.0 - a)
    # lower curve exceeds the graph's upper bound beyond |x| = sqrt(top + 1.5)
    xr = math.sqrt(top + 1.5)

    def ind(p):
        p = np.asarray(p)
        x, y = p[..., 0], p[..., 1]
        return (y > low(x)) & (y < weierstrass_eval(spec, x))
    tag = {"kind": "weierstrass_domain", "a": a, "b": b, "terms": terms}
    r = Region(2, ind, (np.array([-xr, -1.5]), np.array([xr, top])), tag)
    r.weierstrass = spec
    r.lower_curve = low
    return r


def region_from_config(d) -> Region:
    """Build a region from a JSON-style tag description."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError(f"region must be an object with a 'kind' field, got {d!r}")
    kind = d["kind"]

    def num(v):
        if isinstance(v, str):
            s = v.strip().lower()
            if s in ("inf", "+inf", "infinity"):
                return INF
            if s in ("-inf", "-infinity"):
                return -INF
        return float(v)

    try:
        if kind == "interval_union":
            return interval_union([(num(a), num(b)) for a, b in d["intervals"]])
        if kind == "interval":
            return interval(num(d["a"]), num(d["b"]))
        if kind == "ball":
            return ball(d["center"], float(d["radius"]))
        if kind == "axis_box":
            return axis_box([num(v) for v in d["lo"]], [num(v) for v in d["hi"]])
        if kind == "half_space":
            return half_space(d["normal"], float(d.get("offset", 0.0)))
        if kind == "sector":
            return sector(float(d["theta"]), float(d.get("start", 0.0)))
        if kind == "whole":
            return whole(int(d.get("dim", 1)))
        if kind == "empty":
            return empty(int(d.get("dim", 1)))
        if kind == "weierstrass_domain":
            return weierstrass_domain(float(d.get("a", 0.5)), float(d.get("b", 3.0)), int(d.get("terms", 16)))
        if kind == "complement":
            return region_from_config(d["of"]).complement()
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed region {kind!r}: {exc}") from exc
    raise ValueError(f"unknown region kind {kind!r}")
