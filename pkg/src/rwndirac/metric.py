"""Metric factor of the point-nucleus spacetime and its compactified form."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from .params import ModelParams


def _as_float(x: np.ndarray) -> float | np.ndarray:
    return float(x) if x.ndim == 0 else x


def f(r: ArrayLike, p: ModelParams) -> float | np.ndarray:
    """Metric factor sqrt(1 - 2A*/r + Z*^2/r^2).

    Returns exactly 1 in the flat limit. Accepts scalars or arrays.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("f requires r > 0")
    if p.g_ratio == 0.0:
        return _as_float(np.ones_like(r))
    inv = 1.0 / r
    return _as_float(np.sqrt(1.0 - 2.0 * p.a_star * inv + (p.z_star * inv) ** 2))


def g_coefficients(p: ModelParams) -> tuple[float, float, float]:
    """Coefficients (c2, c1, c0) of the quadratic under the radical of g."""
    zz = p.z_star * p.z_star
    return 1.0 + 2.0 * p.a_star + zz, -2.0 * (p.a_star + zz), zz


def g(eta: ArrayLike, p: ModelParams) -> float | np.ndarray:
    """Compactified metric factor, equal to eta * f(r(eta))."""
    eta = np.asarray(eta, dtype=float)
    if np.any((eta < 0) | (eta > 1)) or np.any(np.isnan(eta)):
        raise ValueError("g requires 0 <= eta <= 1")
    c2, c1, c0 = g_coefficients(p)
    return _as_float(np.sqrt((c2 * eta + c1) * eta + c0))


def eta_of_r(r: ArrayLike) -> float | np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("eta_of_r requires r > 0")
    return _as_float(r / (1.0 + r))


def r_of_eta(eta: ArrayLike) -> float | np.ndarray:
    eta = np.asarray(eta, dtype=float)
    if np.any((eta <= 0) | (eta >= 1)) or np.any(np.isnan(eta)):
        raise ValueError("r_of_eta requires 0 < eta < 1")
    return _as_float(eta / (1.0 - eta))


def small_eta_ratio_error(eta: ArrayLike, p: ModelParams) -> np.ndarray:
    """Relative error of eta^2/g^2 against its leading term eta^2/Z*^2."""
    eta = np.asarray(eta, dtype=float)
    ratio = (p.z_star / np.asarray(g(eta, p))) ** 2
    return np.abs(ratio - 1.0)
