"""Radial spinor reconstruction along a computed connector."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .dynsys import make_tau_field, tau_of_r
from .integrator import Trajectory, integrate
from .metric import eta_of_r, r_of_eta
from .metric import f as metric_f
from .params import ModelParams
from .shooting import ShootingOptions
from .table import EigenvalueRecord

RADIAL_HEADER = ("r", "u", "v", "R", "omega")
MAX_FIT_EXPONENT = 1e3
_SEPARATED = 0.5


class NotAConnector(ValueError):
    """The orbit's amplitude grows at large r, so it is not square integrable."""


@dataclass
class RadialSolution:
    """Samples of the reduced radial spinor.

    Arrays share one length. ``norm`` is the L2 norm with weight f^-2 over the
    sampled range, in the gauge R(r_ref) = 1.
    """

    r: np.ndarray
    u: np.ndarray
    v: np.ndarray
    R: np.ndarray
    omega: np.ndarray
    norm: float
    eps: float
    params: Optional[ModelParams] = None
    log_R: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.log_R is None:
            with np.errstate(divide="ignore"):
                self.log_R = np.log(self.R)

    @classmethod
    def from_arrays(
        cls, r, R, omega=None, eps: float = math.nan, params: Optional[ModelParams] = None
    ) -> "RadialSolution":
        """Assemble a solution from raw samples (mainly for tests)."""
        r = np.asarray(r, dtype=float)
        R = np.asarray(R, dtype=float)
        omega = np.zeros_like(r) if omega is None else np.asarray(omega, dtype=float)
        u, v = R * np.cos(0.5 * omega), R * np.sin(0.5 * omega)
        return cls(r, u, v, R, omega, _norm(r, R, params), eps, params)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RADIAL_HEADER)
        for row in zip(self.r, self.u, self.v, self.R, self.omega):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def _norm(r: np.ndarray, R: np.ndarray, p: Optional[ModelParams]) -> float:
    if len(r) < 2:
        return 0.0
    w = 1.0 if p is None or p.g_ratio == 0.0 else np.asarray(metric_f(r, p)) ** -2
    return float(math.sqrt(np.trapezoid(R * R * w, r)))


def reconstruct(
    orbit: Trajectory,
    eps: float,
    p: ModelParams,
    r_ref: float = 1.0,
    check: bool = True,
) -> RadialSolution:
    """Rebuild (u, v, R) from an orbit integrated with the log-amplitude channel.

    Parameters
    ----------
    orbit
        Trajectory with state columns (eta, omega, log R).
    eps
        Energy of the orbit.
    p
        Model parameters used for the orbit.
    r_ref
        Gauge point where R = 1; must lie inside the sampled range.
    check
        Reject orbits whose amplitude grows at the far end.

    Raises
    ------
    NotAConnector
        If ``check`` is set and the tail of log R has positive slope in r.
    """
    if orbit.y.shape[1] < 3:
        raise ValueError("orbit lacks the log-amplitude channel; launch with with_amplitude=True")
    t = orbit.t
    eta, om, logr = orbit.y[:, 0], orbit.y[:, 1], orbit.y[:, 2]
    if np.any(eta >= 1.0):
        keep = eta < 1.0
        t, eta, om, logr = t[keep], eta[keep], om[keep], logr[keep]
    r = eta / (1.0 - eta)
    if not r[0] <= r_ref <= r[-1]:
        raise ValueError(f"r_ref={r_ref} outside sampled range [{r[0]:.3g}, {r[-1]:.3g}]")
    fld = make_tau_field(eps, p, with_amplitude=True)
    d = np.array([fld(ti, yi) for ti, yi in zip(t, zip(eta, om, logr))])
    eta_s = CubicHermiteSpline(t, eta, d[:, 0])
    logr_s = CubicHermiteSpline(t, logr, d[:, 2])
    target = eta_of_r(r_ref)
    i = int(np.searchsorted(eta, target))
    if i == 0:
        t_ref = t[0]
    elif eta[i - 1] == target:
        t_ref = t[i - 1]
    else:
        t_ref = brentq(lambda s: float(eta_s(s)) - target, t[i - 1], t[i], xtol=1e-14)
    log_R = logr - float(logr_s(t_ref))
    if check and len(r) > 8:
        tail = slice(int(0.9 * len(r)), None)
        slope = np.polyfit(r[tail], log_R[tail], 1)[0] if np.ptp(r[tail]) > 0 else 0.0
        if slope > 0.0:
            raise NotAConnector(f"log R grows with slope {slope:.3g} at large r")
    R = np.exp(log_R)
    u, v = R * np.cos(0.5 * om), R * np.sin(0.5 * om)
    return RadialSolution(r, u, v, R, om.copy(), _norm(r, R, p), eps, p, log_R)


def residual(sol: RadialSolution, p: Optional[ModelParams] = None) -> float:
    """Sup-norm residual of the coupled first-order radial system.

    Derivatives of (u, v) come from the integrated cylinder field; they are
    substituted into the original (u, v) equations in r. The result is scaled
    by max(|u|, |v|).
    """
    p = p or sol.params
    if p is None:
        raise ValueError("parameters required")
    r, om, R = sol.r, sol.omega, sol.R
    eta = r / (1.0 + r)
    fld = make_tau_field(sol.eps, p, with_amplitude=True)
    speed = eta * eta if p.g_ratio == 0.0 else eta
    d = np.array([fld(0.0, (e, o, 0.0)) for e, o in zip(eta, om)])
    dom = d[:, 1] / speed
    dlog = d[:, 2] / speed
    ch, sh = np.cos(0.5 * om), np.sin(0.5 * om)
    du = R * (dlog * ch - 0.5 * sh * dom)
    dv = R * (dlog * sh + 0.5 * ch * dom)
    fr = np.asarray(metric_f(r, p)) * np.ones_like(r)
    a = (p.k / r - p.lam / (r * r)) / fr
    res_u = du + a * sol.u - (fr - p.gamma / r + sol.eps) / fr**2 * sol.v
    res_v = dv - a * sol.v - (fr + p.gamma / r - sol.eps) / fr**2 * sol.u
    scale = max(np.max(np.abs(sol.u)), np.max(np.abs(sol.v)))
    return float(max(np.max(np.abs(res_u)), np.max(np.abs(res_v))) / scale)


def small_r_behaviour(p: ModelParams) -> tuple[float, str]:
    """Leading small-r behaviour of the amplitude.

    Returns ``(lambda/Z*, "power")`` in curved space, where R ~ r**(lambda/Z*),
    and ``(lambda, "exponential")`` in flat space, where R ~ exp(-lambda/r).
    """
    if p.z_star > 0.0 and p.g_ratio > 0.0:
        return p.lam / p.z_star, "power"
    return p.lam, "exponential"


def small_r_exponent(p: ModelParams) -> float:
    return small_r_behaviour(p)[0]


def fit_small_r_exponent(sol: RadialSolution, decades: float = 1.0) -> float:
    """Least-squares slope of log R against log r over the smallest decade(s).

    Raises
    ------
    ValueError
        With fewer than three samples in the window, or when the analytic
        exponent exceeds 1e3 (the power law then lives below resolution).
    """
    if sol.params is not None:
        value, kind = small_r_behaviour(sol.params)
        if kind == "power" and value > MAX_FIT_EXPONENT:
            raise ValueError(f"exponent {value:.3g} is too large to resolve numerically")
    r = np.asarray(sol.r)
    sel = r <= r[0] * 10.0**decades
    if np.count_nonzero(sel) < 3:
        raise ValueError("fewer than three samples in the fit window")
    return float(np.polyfit(np.log(r[sel]), sol.log_R[sel], 1)[0])


def far_field_rate(sol: RadialSolution, r_lo: Optional[float] = None, r_hi: Optional[float] = None) -> float:
    """Extrapolated large-r limit of d(log R)/dr.

    The local slope is fitted as ``c0 + c1 / r`` over the window and ``c0``
    returned. Default window: the last half of the sampled r range.
    """
    p = sol.params
    if p is None:
        raise ValueError("parameters required")
    slope = local_log_slope(sol)
    r = sol.r
    r_hi = r[-1] if r_hi is None else r_hi
    r_lo = 0.5 * r_hi if r_lo is None else r_lo
    sel = (r >= r_lo) & (r <= r_hi)
    if np.count_nonzero(sel) < 3:
        raise ValueError("fewer than three samples in the far-field window")
    A = np.column_stack([np.ones(np.count_nonzero(sel)), 1.0 / r[sel]])
    coef, *_ = np.linalg.lstsq(A, slope[sel], rcond=None)
    return float(coef[0])


def local_log_slope(sol: RadialSolution) -> np.ndarray:
    """d(log R)/dr at every sample, from the amplitude equation."""
    p = sol.params
    if p is None:
        raise ValueError("parameters required")
    r, om = sol.r, sol.omega
    fr = np.asarray(metric_f(r, p)) * np.ones_like(r)
    return (np.sin(om) + (-p.k / r + p.lam / (r * r)) * np.cos(om)) / fr


@dataclass
class Connector:
    """Orbit shadowing the connector, cut where the bracket orbits separate."""

    solution: RadialSolution
    r_split: float
    trajectory: Trajectory


def connector_solution(
    record: EigenvalueRecord,
    p: ModelParams,
    opts: ShootingOptions = ShootingOptions(),
    split_tol: float = 1e-6,
    r_ref: float = 1.0,
) -> Connector:
    """Reconstruct the eigenfunction belonging to a bracketed eigenvalue.

    The orbits at both bracket ends are integrated on a shared eta. Up to the
    radius where their angles finally separate by more than ``split_tol``
    both follow the connector; the lower-end orbit is kept up to there.
    """
    if not record.found:
        raise ValueError("record carries no eigenvalue")
    p = p.with_k(record.k)
    lo = record.eps_lo if math.isfinite(record.eps_lo) else record.eps
    hi = record.eps_hi if math.isfinite(record.eps_hi) else record.eps
    f_lo = make_tau_field(lo, p, with_amplitude=True)
    f_hi = make_tau_field(hi, p)

    # one shared eta, two angles: the gap is exact at every accepted step
    def pair(t, y):
        d_lo = f_lo(t, (y[0], y[1], y[2]))
        return (d_lo[0], d_lo[1], d_lo[2], f_hi(t, (y[0], y[3]))[1])

    eta0 = eta_of_r(opts.r0)
    t0 = tau_of_r(opts.r0, p)
    t_end = t0 + 2.0 * abs(tau_of_r(r_of_eta(opts.eta_max), p) - t0) + 10.0
    eta_max = opts.eta_max
    tr = integrate(
        pair,
        (eta0, 0.0, 0.0, 0.0),
        t0,
        t_end,
        opts.integrator,
        event=lambda t, y: y[0] - eta_max,
        stop=lambda t, y: abs(y[3] - y[1]) > _SEPARATED,
    )
    # the gap can spike where R is small (radial nodes); cut at the last
    # point before the final separation
    gap = np.abs(tr.y[:, 3] - tr.y[:, 1])
    above = np.nonzero(gap > split_tol)[0]
    keep = len(tr.t)
    if len(above) and tr.status == "stopped":
        below = np.nonzero(gap <= split_tol)[0]
        keep = int(below[-1]) + 1 if len(below) else 1
    keep = max(keep, 4)
    cut = Trajectory(tr.t[:keep], tr.y[:keep, :3], "truncated", info={"eps": lo})
    sol = reconstruct(cut, lo, p, r_ref=r_ref, check=False)
    return Connector(sol, float(sol.r[-1]), cut)
