"""Scalar test functions with the support and breakpoint hints the integrators need."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["ScalarField", "indicator", "tent", "gaussian", "constant", "field_from_config"]


@dataclass(frozen=True)
class ScalarField:
    """A function on R^n (n = 1 for the integrators that need breakpoints).

    ``support`` is a closed box outside of which the function vanishes
    (``None`` means unbounded support; only constants are accepted that way).
    ``breakpoints`` lists points where the function or its derivative jumps.
    """

    func: Callable = field(compare=False)
    dim: int = 1
    support: tuple | None = None
    breakpoints: tuple = ()
    tag: str = "callable"
    params: tuple = ()

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    @property
    def key(self):
        return (self.tag, self.params, self.dim)

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, ScalarField) and self.key == other.key and (
            self.tag != "callable" or self.func is other.func)

    @property
    def is_constant(self) -> bool:
        return self.tag == "constant"


def indicator(a: float, b: float) -> ScalarField:
    """Indicator of the interval (a, b)."""
    a, b = float(a), float(b)
    return ScalarField(lambda x: ((x > a) & (x < b)).astype(float), 1, (a, b), (a, b),
                       "indicator", (a, b))


def tent(center: float = 0.5, half_width: float = 0.5, height: float = 1.0) -> ScalarField:
    c, h, m = float(center), float(half_width), float(height)
    return ScalarField(lambda x: m * np.clip(1.0 - np.abs(x - c) / h, 0.0, None), 1,
                       (c - h, c + h), (c - h, c, c + h), "tent", (c, h, m))


def gaussian(width: float, center: float = 0.0, l2_normalized: bool = True,
             cutoff: float = 12.0) -> ScalarField:
    """``exp(-(x-c)^2 / (2 width^2))``, optionally scaled to unit Lebesgue L^2 norm.

    Treated as supported on ``[c - cutoff*width, c + cutoff*width]``; the
    neglected mass is below 1e-31 relative.
    """
    w, c = float(width), float(center)
    amp = (math.pi * w * w) ** -0.25 if l2_normalized else 1.0
    lo, hi = c - cutoff * w, c + cutoff * w
    return ScalarField(lambda x: np.where((x > lo) & (x < hi), amp * np.exp(-0.5 * ((x - c) / w) ** 2), 0.0),
                       1, (lo, hi), (lo, c, hi), "gaussian", (w, c, l2_normalized, cutoff))


def constant(value: float = 1.0, dim: int = 1) -> ScalarField:
    v = float(value)
    return ScalarField(lambda x: np.full(np.shape(x)[:-1] if dim > 1 else np.shape(x), v), dim, None, (),
                       "constant", (v,))


def field_from_config(d) -> ScalarField:
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError(f"function must be an object with a 'kind' field, got {d!r}")
    kind = d["kind"]
    try:
        if kind == "indicator":
            return indicator(d["a"], d["b"])
        if kind == "tent":
            return tent(d.get("center", 0.5), d.get("half_width", 0.5), d.get("height", 1.0))
        if kind == "gaussian":
            return gaussian(d["width"], d.get("center", 0.0), d.get("l2_normalized", True))
        if kind == "constant":
            return constant(d.get("value", 1.0), d.get("dim", 1))
    except KeyError as exc:
        raise ValueError(f"malformed function {kind!r}: missing {exc}") from exc
    raise ValueError(f"unknown function kind {kind!r}")
