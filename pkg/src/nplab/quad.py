"""Quadrature configuration and the fixed rules shared by the integrators."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

__all__ = ["QuadSpec", "AccuracyError", "UnsupportedError", "DivergenceError", "gauss_legendre", "gauss_jacobi",
           "graded_rule", "log_time_rule"]


class AccuracyError(RuntimeError):
    """A quadrature did not reach its requested accuracy."""


class UnsupportedError(ValueError):
    """The requested region/kernel combination is not supported."""


class DivergenceError(ArithmeticError):
    """An integral diverges (detected from the local power law of its integrand)."""


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature parameters.

    ``rtol`` is the nominal relative tolerance used for adaptive routines and
    as the comparison slack unit in property checks.  ``nodes`` is the
    Gauss-Legendre order per graded half-panel in space, ``t_nodes`` the order
    per panel in log-time.  ``trunc`` is the spatial truncation radius in
    units of ``sqrt(t)``.
    """

    rtol: float = 1e-6
    max_evals: int = 400_000
    mc_samples: int = 2 ** 16
    seed: int = 0
    trunc: float = 13.0
    t_split: float = 1.0
    t_min: float = 1e-14
    t_max: float = 1e9
    t_panel: float = 2.0
    t_nodes: int = 8
    nodes: int = 32

    def replace(self, **kw) -> "QuadSpec":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict | None) -> "QuadSpec":
        if not d:
            return cls()
        known = {f.name for f in dataclasses.fields(cls)}
        bad = set(d) - known
        if bad:
            raise ValueError(f"unknown quad fields: {sorted(bad)}")
        return cls(**d)


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def gauss_jacobi(n: int, alpha: float, beta: float):
    """Nodes and weights for the weight (1-x)^alpha (1+x)^beta on [-1, 1]."""
    x, w = roots_jacobi(n, alpha, beta)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def graded_rule(lo, hi, center, scale, n):
    """Sinh-graded Gauss-Legendre rule on [lo, hi] clustered at ``center``.

    Maps ``y = center + scale*sinh(xi)`` so nodes are geometrically dense near
    ``center``.  All arguments broadcast; the rule axis is appended last.
    Empty intervals (lo >= hi) get zero weights.
    """
    lo, hi, center, scale = np.broadcast_arrays(*(np.asarray(v, dtype=float)
                                                  for v in (lo, hi, center, scale)))
    gx, gw = gauss_legendre(n)
    a = np.arcsinh((lo - center) / scale)[..., None]
    b = np.arcsinh((hi - center) / scale)[..., None]
    b = np.maximum(a, b)
    half = 0.5 * (b - a)
    xi = a + half * (gx + 1.0)
    y = center[..., None] + scale[..., None] * np.sinh(xi)
    w = half * gw * scale[..., None] * np.cosh(xi)
    return y, w


def log_time_rule(t_lo: float, t_hi: float, panel: float, n: int):
    """Composite Gauss-Legendre rule in tau = log t on [log t_lo, log t_hi].

    Returns (t, w) with ``sum w * g(t)`` approximating ``int g(t) dt / t``.
    """
    a, b = np.log(t_lo), np.log(t_hi)
    npan = max(1, int(np.ceil((b - a) / panel)))
    edges = np.linspace(a, b, npan + 1)
    gx, gw = gauss_legendre(n)
    half = 0.5 * np.diff(edges)
    tau = (edges[:-1, None] + half[:, None] * (gx + 1.0)).ravel()
    w = (half[:, None] * gw).ravel()
    return np.exp(tau), w
