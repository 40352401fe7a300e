"""Adaptive explicit Runge-Kutta integration with an 8(5,3) embedded pair.

The tableau is the Dormand-Prince 8(5,3) pair as tabulated by SciPy. The
stepper works on tuples of Python floats, which is faster than numpy for the
two- and three-dimensional flows used in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate._ivp import dop853_coefficients as _dop

Field = Callable[[float, Sequence[float]], Sequence[float]]
Event = Callable[[float, Sequence[float]], float]
Stop = Callable[[float, Sequence[float]], bool]

ORDER = 8
_S = _dop.N_STAGES
_A = tuple(tuple(float(x) for x in _dop.A[i, :i]) for i in range(_S))
_B = tuple(float(x) for x in _dop.B)
_C = tuple(float(x) for x in _dop.C[:_S])
_E3 = tuple(float(x) for x in _dop.E3)
_E5 = tuple(float(x) for x in _dop.E5)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
# PI controller exponents (Gustafsson form)
_BETA1 = 0.7 / ORDER
_BETA2 = 0.4 / ORDER
_EVENT_ITERS = 60


class IntegrationError(RuntimeError):
    """Base class for integration failures."""


class StepLimitExceeded(IntegrationError):
    def __init__(self, t: float, y: Sequence[float], steps: int) -> None:
        super().__init__(f"step limit {steps} exceeded at t={t:.6g}")
        self.t, self.y, self.steps = t, tuple(y), steps


class StepSizeUnderflow(IntegrationError):
    """Raised when the accepted step would fall below floating resolution."""

    def __init__(self, t: float, y: Sequence[float], h: float) -> None:
        super().__init__(f"step size underflow h={h:.3e} at t={t:.6g}, y={tuple(y)}")
        self.t, self.y, self.h = t, tuple(y), h


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and limits for :func:`integrate`.

    ``fixed_step`` switches off error control; it exists for order checks.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_steps: int = 10_000_000
    initial_step: Optional[float] = None
    fixed_step: Optional[float] = None
    max_step: float = math.inf

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.initial_step is not None and not self.initial_step > 0:
            raise ValueError("initial_step must be positive")
        if self.fixed_step is not None and not self.fixed_step > 0:
            raise ValueError("fixed_step must be positive")


@dataclass
class Trajectory:
    """Accepted steps of one integration.

    ``t`` has shape (n,), ``y`` has shape (n, dim). ``status`` is one of
    ``completed``, ``event-hit``, ``stopped`` or ``step-limit``.
    """

    t: np.ndarray
    y: np.ndarray
    status: str
    nfev: int = 0
    rejected: int = 0
    info: dict = field(default_factory=dict)

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    @property
    def y_end(self) -> np.ndarray:
        return self.y[-1]

    def __len__(self) -> int:
        return len(self.t)


def rk_step(fun: Field, t: float, y: Sequence[float], f0: Sequence[float], h: float):
    """One step of the pair.

    Returns ``(y_new, f_new, err5, err3)`` where the error vectors are the
    raw embedded differences (not yet scaled by h).
    """
    dim = len(y)
    K = [f0]
    rng = range(dim)
    for i in range(1, _S):
        ai = _A[i]
        yi = [y[d] + h * sum(ai[j] * K[j][d] for j in range(i)) for d in rng]
        K.append(fun(t + _C[i] * h, yi))
    y_new = tuple(y[d] + h * sum(_B[j] * K[j][d] for j in range(_S)) for d in rng)
    f_new = fun(t + h, y_new)
    K.append(f_new)
    e5 = [sum(_E5[j] * K[j][d] for j in range(_S + 1)) for d in rng]
    e3 = [sum(_E3[j] * K[j][d] for j in range(_S + 1)) for d in rng]
    return y_new, f_new, e5, e3


def _error_norm(h, y, y_new, e5, e3, atol, rtol) -> float:
    s5 = s3 = 0.0
    for d in range(len(y)):
        sc = atol + rtol * max(abs(y[d]), abs(y_new[d]))
        a = e5[d] / sc
        b = e3[d] / sc
        s5 += a * a
        s3 += b * b
    if s5 == 0.0:
        return 0.0
    return abs(h) * s5 / math.sqrt((s5 + 0.01 * s3) * len(y))


def _initial_step(fun, t0, y0, f0, atol, rtol) -> float:
    # Hairer-Norsett-Wanner starting step heuristic
    dim = len(y0)
    sc = [atol + rtol * abs(v) for v in y0]
    d0 = math.sqrt(sum((y0[i] / sc[i]) ** 2 for i in range(dim)) / dim)
    d1 = math.sqrt(sum((f0[i] / sc[i]) ** 2 for i in range(dim)) / dim)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = [y0[i] + h0 * f0[i] for i in range(dim)]
    f1 = fun(t0 + h0, y1)
    d2 = math.sqrt(sum(((f1[i] - f0[i]) / sc[i]) ** 2 for i in range(dim)) / dim) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / (ORDER + 1))
    return min(100 * h0, h1)


def integrate(
    fun: Field,
    y0: Sequence[float],
    t0: float,
    t_end: float,
    cfg: IntegratorConfig = IntegratorConfig(),
    event: Optional[Event] = None,
    stop: Optional[Stop] = None,
    record: bool = True,
) -> Trajectory:
    """Integrate ``y' = fun(t, y)`` from ``t0`` towards ``t_end``.

    Parameters
    ----------
    fun
        Vector field returning a sequence of floats.
    y0
        Initial state.
    t0, t_end
        Integration span, ``t_end > t0``.
    cfg
        Tolerances and limits.
    event
        Scalar function; integration ends at its first sign change, located
        by bisection on the step size to within ``cfg.abs_tol`` in t.
    stop
        Predicate checked after every accepted step; ends the run with status
        ``stopped`` when true.
    record
        Keep every accepted step; otherwise only the endpoints.

    Raises
    ------
    StepSizeUnderflow
        When the step falls below the floating resolution of t.
    """
    if not t_end > t0:
        raise ValueError("t_end must exceed t0")
    atol, rtol = cfg.abs_tol, cfg.rel_tol
    t = float(t0)
    y = tuple(float(v) for v in y0)
    f0 = tuple(fun(t, y))
    nfev = 1
    ts = [t]
    ys = [y]
    ev0 = event(t, y) if event is not None else None
    fixed = cfg.fixed_step
    if fixed is not None:
        h = fixed
    elif cfg.initial_step is not None:
        h = cfg.initial_step
    else:
        h = _initial_step(fun, t, y, f0, atol, rtol)
        nfev += 1
    h = min(h, cfg.max_step)
    err_prev = 1.0
    steps = rejected = 0
    status = "completed"
    rejected_last = False

    while t < t_end:
        if steps >= cfg.max_steps:
            status = "step-limit"
            break
        h_try = min(h, t_end - t)
        if fixed is None and h_try < 16.0 * math.ulp(max(abs(t), 1.0)) and t_end - t > h_try:
            raise StepSizeUnderflow(t, y, h_try)
        y_new, f_new, e5, e3 = rk_step(fun, t, y, f0, h_try)
        nfev += _S
        if fixed is None:
            err = _error_norm(h_try, y, y_new, e5, e3, atol, rtol)
            if not math.isfinite(err):
                err = 1e10
            if err > 1.0:
                rejected += 1
                rejected_last = True
                h = h_try * max(_MIN_FACTOR, _SAFETY * err ** (-1.0 / ORDER))
                continue
        else:
            err = 0.0
        t_new = t + h_try if t_end - t > h_try else t_end

        if event is not None:
            ev1 = event(t_new, y_new)
            if ev0 == 0.0 or (ev1 == 0.0) or (ev0 < 0.0) != (ev1 < 0.0):
                t_hit, y_hit, n_extra = _locate_event(fun, event, t, y, f0, h_try, ev0, atol)
                nfev += n_extra
                ts.append(t_hit)
                ys.append(y_hit)
                status = "event-hit"
                steps += 1
                break
            ev0 = ev1

        t, y, f0 = t_new, y_new, f_new
        steps += 1
        if record:
            ts.append(t)
            ys.append(y)
        if stop is not None and stop(t, y):
            status = "stopped"
            break
        if fixed is None:
            if err == 0.0:
                fac = _MAX_FACTOR
            else:
                fac = _SAFETY * err ** (-_BETA1) * err_prev ** _BETA2
                fac = min(_MAX_FACTOR, max(_MIN_FACTOR, fac))
            if rejected_last:
                fac = min(fac, 1.0)
            err_prev = max(err, 1e-4)
            rejected_last = False
            h = min(h_try * fac, cfg.max_step)

    if not record and (len(ts) == 1 or ts[-1] != t):
        if status != "event-hit":
            ts.append(t)
            ys.append(y)
    return Trajectory(
        t=np.asarray(ts, dtype=float),
        y=np.asarray(ys, dtype=float),
        status=status,
        nfev=nfev,
        rejected=rejected,
        info={"steps": steps},
    )


def _locate_event(fun, event, t, y, f0, h, ev0, atol):
    """Bisect on the step length for the first sign change of ``event``."""
    if ev0 == 0.0:
        return t, y, 0
    lo, hi = 0.0, h
    y_hi = None
    n = 0
    for _ in range(_EVENT_ITERS):
        if hi - lo <= atol:
            break
        mid = 0.5 * (lo + hi)
        ym, _, _, _ = rk_step(fun, t, y, f0, mid)
        n += _S
        em = event(t + mid, ym)
        if em == 0.0:
            return t + mid, ym, n
        if (em < 0.0) == (ev0 < 0.0):
            lo = mid
        else:
            hi, y_hi = mid, ym
    if y_hi is None:
        y_hi, _, _, _ = rk_step(fun, t, y, f0, hi)
        n += _S
    return t + hi, y_hi, n
