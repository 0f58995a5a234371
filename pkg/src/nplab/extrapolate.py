"""Extrapolation of ``s * F(s)`` to ``s -> 0+``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["LimitEstimate", "extrapolate_limit"]

_RESIDUAL_REL = 1e-3


@dataclass
class LimitEstimate:
    """An s-grid of ``s * F(s)`` values and the fitted value at ``s = 0``.

    ``residual`` is the RMS misfit of the model that produced ``limit``.
    ``unreliable`` is set when the quadratic fallback still misfits or the
    smallest-s values oscillate by more than the residual.
    """

    s: np.ndarray
    raw: np.ndarray
    scaled: np.ndarray
    limit: float
    slope: float
    residual: float
    model: str
    unreliable: bool = False
    target: float | None = None
    target_name: str = ""
    diagnostics: dict = field(default_factory=dict)

    @property
    def relative_error(self) -> float | None:
        if self.target is None:
            return None
        return abs(self.limit - self.target) / max(abs(self.target), 1e-12)

    def passes(self, rtol: float = None, atol: float = None) -> bool:
        if self.target is None:
            raise ValueError("no target to compare with")
        err = abs(self.limit - self.target)
        ok = True
        if rtol is not None:
            ok &= err <= rtol * max(abs(self.target), 1e-12)
        if atol is not None:
            ok &= err <= atol
        return bool(ok)

    def to_dict(self) -> dict:
        return {"s": self.s.tolist(), "raw": self.raw.tolist(), "s_times_value": self.scaled.tolist(),
                "limit": self.limit, "slope": self.slope, "residual": self.residual, "model": self.model,
                "unreliable": self.unreliable, "target": self.target, "target_name": self.target_name,
                "relative_error": self.relative_error}


def _fit(s, v, deg):
    A = np.vander(s, deg + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    res = v - A @ coef
    rms = float(np.sqrt(np.mean(res ** 2))) if len(s) > deg + 1 else 0.0
    return coef, rms


def extrapolate_limit(s_grid, raw_values, target=None, target_name="", n_fit=4,
                      degree: int = 1) -> LimitEstimate:
    """Fit ``s * F(s) = L + a s`` on the ``n_fit`` smallest ``s``; quadratic fallback on the same points.

    ``degree=2`` fits the quadratic directly, for quantities with a known
    curvature in ``s``.
    """
    s = np.asarray(s_grid, dtype=float)
    raw = np.asarray(raw_values, dtype=float)
    order = np.argsort(s)[::-1]
    s, raw = s[order], raw[order]
    v = s * raw
    if s.size < 2:
        raise ValueError("need at least two grid points")
    if not np.all(np.isfinite(v)):
        return LimitEstimate(s, raw, v, float("inf"), float("nan"), float("inf"), "none", True,
                             target, target_name)
    idx = np.argsort(s)[:min(n_fit, s.size)]
    coef, rms = _fit(s[idx], v[idx], degree)
    model = "linear" if degree == 1 else "quadratic"
    L, slope = float(coef[0]), float(coef[1])
    unreliable = False
    if degree == 1 and rms > _RESIDUAL_REL * max(abs(L), 1e-6) and s.size >= 3:
        sel = idx if idx.size >= 4 else slice(None)
        coef, rms = _fit(s[sel], v[sel], 2)
        model = "quadratic"
        L, slope = float(coef[0]), float(coef[1])
        unreliable = rms > _RESIDUAL_REL * max(abs(L), 1e-6)
    d = np.diff(v[idx][np.argsort(s[idx])])
    noise = 3 * max(rms, 1e-9 * max(float(np.max(np.abs(v))), 1.0))
    if d.size >= 2 and np.any(np.sign(d[:-1]) * np.sign(d[1:]) < 0) and np.max(np.abs(d)) > noise:
        unreliable = True
    return LimitEstimate(s, raw, v, L, slope, rms, model, unreliable, target, target_name)
