"""Grid certification of the barrier inequalities that bound winding numbers.

Each check evaluates a margin that is positive exactly when the inequality
holds, on a grid that is logarithmically dense towards both ends of its
interval, then refines the grid a hundredfold around the worst point.
Margins are normalized so that physical parameters (Z* near 1e-24) do not
drown in rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .metric import g as metric_g
from .params import ALPHA_DEFAULT, G_RATIO_DEFAULT, ModelParams

DELTA = 1.01
NU = 3.0
ETA0 = 3e-4
REFINE = 100
DEFAULT_GRID = 100_000
DEFAULT_K_MAX = 10


@dataclass(frozen=True)
class BarrierReport:
    """Outcome of one barrier check.

    ``passed`` is true exactly when ``min_margin > 0``. ``in_hypotheses``
    records whether the parameters satisfy the assumptions under which the
    inequality is a theorem.
    """

    name: str
    grid_size: int
    min_margin: float
    passed: bool
    in_hypotheses: bool = True
    argmin: float = math.nan
    note: str = ""

    def line(self) -> str:
        return f"{self.name},{self.grid_size},{self.min_margin!r},{str(self.passed).lower()}"


def _end_grid(lo: float, hi: float, n: int, pad: float = 1e-12) -> np.ndarray:
    """Points in [lo, hi] clustered geometrically towards both ends."""
    if hi <= lo:
        return np.array([lo])
    width = hi - lo
    half = max(n // 2, 2)
    s = np.geomspace(max(pad, width * 1e-12), 0.5 * width, half)
    pts = np.concatenate([[lo, hi], lo + s, hi - s, np.linspace(lo, hi, max(n // 10, 2))])
    return np.unique(np.clip(pts, lo, hi))


def _certify(
    name: str,
    margin: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    grid: int,
    in_hyp: bool,
    note: str = "",
    include_lo: bool = True,
    include_hi: bool = True,
) -> BarrierReport:
    x = _end_grid(lo, hi, grid)
    if not include_lo:
        x = x[x > lo]
    if not include_hi:
        x = x[x < hi]
    m = margin(x)
    i = int(np.nanargmin(m))
    j0, j1 = max(i - 1, 0), min(i + 1, len(x) - 1)
    fine = np.linspace(x[j0], x[j1], 2 * REFINE + 1)
    if not include_lo:
        fine = fine[fine > lo]
    if not include_hi:
        fine = fine[fine < hi]
    total = len(x)
    best, where = float(m[i]), float(x[i])
    if len(fine):
        mf = margin(fine)
        total += len(fine)
        jf = int(np.nanargmin(mf))
        if mf[jf] < best:
            best, where = float(mf[jf]), float(fine[jf])
    if np.any(np.isnan(m)):
        best = math.nan
    return BarrierReport(name, total, best, bool(best > 0), in_hyp, where, note)


# --- the five checks --------------------------------------------------------


def check_upper_barrier(p: ModelParams, grid: int = DEFAULT_GRID) -> BarrierReport:
    """Omega = pi is crossed downwards at eps = -1 for every eta in (0, 1).

    Margin: [g - gamma (1 - eta) - eta] / (1 - eta), positive iff the angular
    velocity at Omega = pi is negative.
    """
    in_hyp = p.g_ratio == 0.0 or p.a_star < p.z_star

    def margin(x):
        if p.g_ratio == 0.0:
            g = x
        else:
            g = np.asarray(metric_g(x, p))
        return (g - x) / (1.0 - x) - p.gamma

    return _certify("upper", margin, 0.0, 1.0, grid, in_hyp, include_lo=False, include_hi=False)


def lower_neg_k_polynomial(eta: np.ndarray, z_star: float, gamma: float) -> np.ndarray:
    """The worst-case polynomial p (k = -1, lambda = 3Z*/2, A* = Z*/2)."""
    zs = z_star
    g2 = (1 + zs + zs * zs) * eta**2 - (zs + 2 * zs * zs) * eta + zs * zs
    return g2 * (eta + 1.5 * zs * (1 - eta)) ** 2 - gamma**2 * eta**4


def p1_coefficients(z_star: float) -> tuple[float, float, float, float]:
    """Coefficients (a3, a2, a1, a0) of the cubic factor of p - p(Z*=0)."""
    z = z_star
    return (
        -9 * z**3 + 3 * z**2 - z + 8,
        z * (27 * z**2 - 6 * z + 1),
        3 * z**2 * (-9 * z + 1),
        9 * z**3,
    )


def check_lower_barrier_neg_k(p: ModelParams, grid: int = DEFAULT_GRID) -> BarrierReport:
    """Omega = -pi/2 is a lower barrier at eps = 0 for k <= -1.

    The margin is the smaller of two relative slacks: the worst-case
    polynomial (k = -1, lambda = 3Z*/2, A* = Z*/2) and the inequality with the
    actual k, lambda and A*.
    """
    zs, gam = p.z_star, p.gamma
    in_hyp = -1.0 <= gam < 0.0 and p.a_star <= 0.5 * zs and p.lam >= 1.5 * zs and p.k <= -1
    k = p.k if p.k <= -1 else -1

    def margin(x):
        g2w = (1 + zs + zs * zs) * x**2 - (zs + 2 * zs * zs) * x + zs * zs
        worst = 1.0 - gam**2 * x**4 / (g2w * (x + 1.5 * zs * (1 - x)) ** 2)
        g2 = x * x if p.g_ratio == 0.0 else np.asarray(metric_g(x, p)) ** 2
        actual = 1.0 - gam**2 * x**4 / (g2 * (-k * x + p.lam * (1 - x)) ** 2)
        return np.minimum(worst, actual)

    return _certify("lower_neg_k", margin, 0.0, 1.0, grid, in_hyp, include_lo=False, include_hi=False)


def barrier_nodes(k: int, p: ModelParams, delta: float = DELTA) -> tuple[float, float]:
    """Ends (a_k, b_k) of the horizontal barrier pieces.

    Raises
    ------
    ValueError
        If gamma <= -1/delta (b_k would leave (0, 1)) or k < 1.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not -1.0 / delta < p.gamma < 0.0:
        raise ValueError(f"gamma={p.gamma} outside (-1/delta, 0)")
    a = p.lam / (k + p.lam - delta * p.gamma)
    b = p.lam / (k + p.lam + delta * p.gamma)
    return a, b


def _g_array(x: np.ndarray, p: ModelParams) -> np.ndarray:
    return x if p.g_ratio == 0.0 else np.asarray(metric_g(x, p))


def check_horizontal_barriers(
    p: ModelParams, grid: int = DEFAULT_GRID, k_max: int = DEFAULT_K_MAX, delta: float = DELTA
) -> BarrierReport:
    """Both horizontal pieces, for k = 1..k_max, at eps = 0.

    Margins are the reduced inequalities -k eta + lambda (1 - eta) +
    eta^2 gamma / g on [0, a_k] and k eta - lambda (1 - eta) + eta^2 gamma / g
    on [b_k, 1], each divided by lambda.
    """
    script_a = p.z_star * math.sqrt(delta - 1.0)
    in_hyp = p.a_star < script_a and -1.0 / delta < p.gamma < 0.0
    if not -1.0 / delta < p.gamma < 0.0:
        return BarrierReport("horizontal", 0, math.nan, False, False, note="gamma outside (-1/delta, 0)")
    worst: BarrierReport | None = None
    total = 0
    for k in range(1, k_max + 1):
        a, b = barrier_nodes(k, p, delta)

        def m_a(x, k=k):
            return (-k * x + p.lam * (1 - x) + x * x * p.gamma / _g_array(x, p)) / p.lam

        def m_b(x, k=k):
            return (k * x - p.lam * (1 - x) + x * x * p.gamma / _g_array(x, p)) / p.lam

        ra = _certify("horizontal", m_a, 0.0, a, grid // 2, in_hyp, include_lo=p.g_ratio != 0.0)
        rb = _certify("horizontal", m_b, b, 1.0, grid // 2, in_hyp)
        total += ra.grid_size + rb.grid_size
        for r in (ra, rb):
            if worst is None or not r.min_margin >= worst.min_margin:
                worst = r
    assert worst is not None
    return BarrierReport("horizontal", total, worst.min_margin, worst.passed, in_hyp, worst.argmin)


def slanted_terms(x: np.ndarray, k: int, p: ModelParams, delta: float = DELTA):
    """The quantities A, B, C whose combination A cos + B sin + C must stay positive."""
    a, b = barrier_nodes(k, p, delta)
    g = _g_array(x, p)
    q = 1.0 - x
    A = 2.0 * x * x / g
    B = (2.0 / g) * (k * x * q - p.lam * q * q)
    C = 2.0 * x * x / (g * g) * p.gamma * q + x * q * q * math.pi / (b - a)
    return A, B, C


def slanted_lambda_max(alpha: float = ALPHA_DEFAULT, nu: float = NU, delta: float = DELTA) -> float:
    return alpha / (2.0 * math.pi) / (nu * delta)


def check_slanted_barrier(
    k: int, p: ModelParams, grid: int = DEFAULT_GRID, alpha: float = ALPHA_DEFAULT
) -> BarrierReport:
    """The slanted piece between (a_k, -pi/2) and (b_k, -3pi/2).

    Margin: min of 1 - (A^2 + B^2)/C^2 and (A + C)/(|A| + |C|).
    """
    lam_max = slanted_lambda_max(alpha)
    in_hyp = (
        p.a_star < 0.1 * p.z_star
        and -1.0 / (NU * DELTA) < p.gamma < 0.0
        and 1.5 * p.z_star <= p.lam <= lam_max
    )
    if not -1.0 / DELTA < p.gamma < 0.0:
        return BarrierReport(f"slanted_k{k}", 0, math.nan, False, False, note="gamma outside (-1/delta, 0)")
    a, b = barrier_nodes(k, p)

    def margin(x):
        A, B, C = slanted_terms(x, k, p)
        return np.minimum(1.0 - (A * A + B * B) / (C * C), (A + C) / (np.abs(A) + np.abs(C)))

    r = _certify("slanted", margin, a, b, grid, in_hyp)
    return r


def slanted_u(k: float, delta: float = DELTA, nu: float = NU, lam_max: float | None = None) -> float:
    """Upper bound on A^2 + B^2 from the slanted-barrier proof."""
    L = slanted_lambda_max() if lam_max is None else lam_max
    return 4 * delta**2 * (L / (1 + L)) ** 2 + 4 * delta**2 * (4 * k / nu + 1 / nu**2)


def slanted_v(k: float, delta: float = DELTA, nu: float = NU, lam_max: float | None = None) -> float:
    """Lower bound on C^2 from the slanted-barrier proof."""
    L = slanted_lambda_max() if lam_max is None else lam_max
    return (-2 / (nu * delta**2) - math.pi / 2 + math.pi * nu * k / 2) ** 2 * ((nu - 1) / (nu + L - 1)) ** 2


def eta_crossing_bound(alpha: float = ALPHA_DEFAULT, g_ratio: float = G_RATIO_DEFAULT) -> float:
    """Lower bound for the root below which Omega' < 0 on Omega = 0, at Z* = alpha sqrt(G)/2."""
    one = 1.0 - g_ratio
    num = -0.25 * alpha**2 * one + 0.5 * alpha * math.sqrt(one)
    den = 1.0 + 0.1 * alpha * math.sqrt(g_ratio) - 0.25 * alpha**2 * one
    return num / den


def eta0_h_bound(x: np.ndarray, alpha: float = ALPHA_DEFAULT, g_ratio: float = G_RATIO_DEFAULT, eta0: float = ETA0):
    """Term-by-term upper bound h(eta) of Omega' along the slanted line."""
    sg = math.sqrt(g_ratio)
    eta1 = 0.5 * (1.0 + eta0)
    om = -math.pi / (1.0 - eta0) * (x - eta0)
    c, s = np.cos(om), np.sin(om)
    first = np.where(x <= eta1, 2.02 * x * c, 2.0 * x * x / (x + sg) * c)
    return (
        first
        + 2.0 / (x + sg) * x * (1.0 - x) * s
        - 2.02 / x * alpha / (2.0 * math.pi) * (1.0 - x) ** 2 * s
        - x * x / (x + sg) ** 2 * alpha * (1.0 - x)
    )


def eta0_j(x: np.ndarray, alpha: float = ALPHA_DEFAULT, g_ratio: float = G_RATIO_DEFAULT, eta0: float = ETA0):
    return eta0_h_bound(x, alpha, g_ratio, eta0) + math.pi / (1.0 - eta0) * x * (1.0 - x) ** 2


def check_eta0_barrier(
    p: ModelParams, grid: int = DEFAULT_GRID, alpha: float = ALPHA_DEFAULT, eta0: float = ETA0
) -> BarrierReport:
    """The line from (eta0, 0) to (1, -pi) is an upper barrier at eps = 0.

    Margin: min of -j(eta) (the proof's bound) and the negated slack of the
    actual field along the line with k = 1, the worst case.
    """
    sg = math.sqrt(p.g_ratio)
    in_hyp = (
        p.a_star < 0.1 * p.z_star
        and 0.5 * alpha * sg <= p.z_star < sg
        and 1.5 * p.z_star <= p.lam <= alpha / (2.0 * math.pi)
    )
    g_ratio = p.g_ratio if p.g_ratio > 0 else G_RATIO_DEFAULT
    slope = math.pi / (1.0 - eta0)

    def margin(x):
        bound = -eta0_j(x, alpha, g_ratio, eta0)
        om = -slope * (x - eta0)
        g = _g_array(x, p)
        q = 1.0 - x
        k = max(1, p.k)
        dom = (
            2 * x * x / g * np.cos(om)
            + 2 / g * (k * x * q - p.lam * q * q) * np.sin(om)
            + 2 * x * x / (g * g) * p.gamma * q
        )
        actual = -(dom + slope * x * q * q)
        return np.minimum(bound, actual)

    return _certify("eta0", margin, eta0, 1.0, grid, in_hyp, include_hi=False)


def verify_all(p: ModelParams, grid: int = DEFAULT_GRID, k_max: int = DEFAULT_K_MAX) -> list[BarrierReport]:
    """Run all five checks; the slanted one reports the worst k in 1..k_max."""
    reports = [
        check_upper_barrier(p, grid),
        check_lower_barrier_neg_k(p, grid),
        check_horizontal_barriers(p, grid, k_max),
    ]
    slanted = [check_slanted_barrier(k, p, grid) for k in range(1, k_max + 1)]
    worst = min(slanted, key=lambda r: r.min_margin if r.min_margin == r.min_margin else -math.inf)
    reports.append(
        BarrierReport(
            "slanted",
            sum(r.grid_size for r in slanted),
            worst.min_margin,
            all(r.passed for r in slanted),
            worst.in_hypotheses,
            worst.argmin,
            worst.note,
        )
    )
    reports.append(check_eta0_barrier(p, grid))
    return reports
