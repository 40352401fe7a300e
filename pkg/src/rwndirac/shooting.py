"""Shooting in the energy parameter: winding numbers and bisection.

An orbit is launched from Omega = 0 at a small radius and followed on the
lifted cylinder. Its winding number counts how many half-turns the Prufer
angle loses relative to the attracting node at infinity. Eigenvalues sit at
the jumps of the winding number as a function of eps.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Sequence

from scipy.optimize import brentq

from .dynsys import make_tau_field, omega_prime_r, tau_of_r
from .integrator import IntegratorConfig, Trajectory, integrate
from .metric import eta_of_r, r_of_eta
from .oracle import sommerfeld_za
from .params import (
    ALPHA_DEFAULT,
    ModelParams,
    PhysicalInput,
    SelfAdjointnessWarning,
    derive_params,
)
from .table import EigenvalueRecord, SpectralTable

TWO_PI = 2.0 * math.pi


class ShootingError(RuntimeError):
    """Base class for eigenvalue-search failures."""


class BracketNotFound(ShootingError):
    """No eps in the admissible range straddles the requested winding jump."""


class UndecidedOrbit(ShootingError):
    """An orbit could not be assigned to a node at the current tolerances."""


@dataclass(frozen=True)
class ShootingOptions:
    """Knobs for orbit launching and the eigenvalue search.

    ``early_exit`` ends an orbit once a barrier test proves which node it
    will reach; without it the run continues to ``eta_max``.
    """

    r0: float = 1e-6
    eta_max: float = 1.0 - 1e-9
    band_tol: float = 1e-6
    eps_tol: float = 1e-13
    edge_guard: float = 1e-6
    grid: float = 1e-3
    margin: float = 1e-4
    max_iterations: int = 200
    early_exit: bool = True
    use_oracle_seed: bool = True
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self) -> None:
        if not 0.0 < self.r0 < 1.0:
            raise ValueError("r0 must lie in (0, 1)")
        if not eta_of_r(self.r0) < self.eta_max < 1.0:
            raise ValueError("eta_max must lie between eta(r0) and 1")
        if not (self.eps_tol > 0 and self.grid > 0 and self.margin > 0):
            raise ValueError("eps_tol, grid and margin must be positive")
        if not 0.0 < self.edge_guard < 0.5:
            raise ValueError("edge_guard must lie in (0, 0.5)")


@dataclass
class OrbitOutcome:
    """Summary of one shooting orbit.

    ``terminal_*`` refer to the state at ``eta_max``. When the run ends early
    on a proven node approach, the terminal angle is the slow-manifold value
    at ``eta_max`` and ``exit_*`` hold the last integrated state.
    """

    winding: int
    terminal_omega_lift: float
    terminal_eta: float
    classification: str
    reason: str
    exit_eta: float
    exit_omega_lift: float
    steps: int
    trajectory: Optional[Trajectory] = None

    @property
    def decided(self) -> bool:
        return self.classification != "undecided"


# --- orbit launching --------------------------------------------------------


def _commit_test(eps: float, p: ModelParams, eta_start: float) -> Callable:
    """Build a stop predicate that proves the terminal node of an orbit.

    In the radial variable the angle obeys
    Omega' = 2(cos Omega - eps) + P, where |P| is bounded by a quantity that
    decreases in r beyond ``r_mono``. With phi the lift reduced into
    (-theta, 2 pi - theta], the band [min(phi, 0), max(phi, pi)] is trapping
    for all later r once its two edges satisfy strict barrier inequalities.
    The only equilibrium inside is the node, so the winding is final.
    """
    theta = math.acos(eps)
    k, lam, gam = abs(p.k), p.lam, abs(p.gamma)
    a_eps = abs(eps)
    zs, As = p.z_star, p.a_star
    r_mono = max(1.0, zs * zs / As if As > 0 else 0.0)
    eta_min = max(eta_start, r_mono / (1.0 + r_mono))
    flat = p.g_ratio == 0.0
    cos, sin = math.cos, math.sin

    def perturbation(phi: float, r: float) -> float:
        if flat:
            fi, big = 1.0, 1.0
        else:
            fr = math.sqrt(1.0 - 2.0 * As / r + (zs / r) ** 2)
            fi = 1.0 / fr
            big = max(1.0, fi)
        return (
            2.0 * abs(fi - 1.0) * abs(cos(phi))
            + 2.0 * big * (k / r + lam / (r * r)) * abs(sin(phi))
            + 2.0 * gam * big * big / r
            + 2.0 * a_eps * abs(fi * fi - 1.0)
        )

    def stop(t: float, y: Sequence[float]) -> bool:
        eta = y[0]
        if eta < eta_min or eta >= 1.0:
            return False
        r = eta / (1.0 - eta)
        om = y[1]
        w = math.floor((TWO_PI - theta - om) / TWO_PI)
        phi = om + TWO_PI * w
        lo = min(phi, 0.0)
        hi = max(phi, math.pi)
        if 2.0 * (cos(lo) - eps) <= perturbation(lo, r):
            return False
        return 2.0 * (cos(hi) - eps) + perturbation(hi, r) < 0.0

    return stop


def _slow_manifold(eps: float, p: ModelParams, r: float) -> float:
    """Root of the angular velocity near the node at radius r."""
    fun = lambda om: omega_prime_r(r, om, eps, p)  # noqa: E731
    try:
        if fun(0.0) > 0.0 > fun(math.pi):
            return brentq(fun, 0.0, math.pi, xtol=1e-15, rtol=4e-16)
    except ValueError:
        pass
    return math.acos(eps)


def launch_orbit(
    eps: float,
    p: ModelParams,
    opts: ShootingOptions = ShootingOptions(),
    keep_trajectory: bool = False,
    with_amplitude: bool = False,
) -> OrbitOutcome:
    """Integrate the orbit leaving Omega = 0 at ``opts.r0`` for energy ``eps``.

    Parameters
    ----------
    eps
        Energy in units of the rest energy, strictly inside (-1, 1).
    p
        Model parameters; the flat field is used when ``p.g_ratio == 0``.
    opts
        Launch and cutoff options.
    keep_trajectory
        Attach every accepted step to the outcome.
    with_amplitude
        Integrate log R alongside (needed for wavefunction reconstruction).

    Returns
    -------
    OrbitOutcome
    """
    if not -1.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (-1, 1), got {eps}")
    theta = math.acos(eps)
    eta0 = eta_of_r(opts.r0)
    r_max = r_of_eta(opts.eta_max)
    t0 = tau_of_r(opts.r0, p)
    t_end = t0 + 2.0 * abs(tau_of_r(r_max, p) - t0) + 10.0
    y0 = (eta0, 0.0, 0.0) if with_amplitude else (eta0, 0.0)
    fld = make_tau_field(eps, p, with_amplitude=with_amplitude)
    eta_max = opts.eta_max
    stop = _commit_test(eps, p, eta0) if opts.early_exit else None
    tr = integrate(
        fld,
        y0,
        t0,
        t_end,
        opts.integrator,
        event=lambda t, y: y[0] - eta_max,
        stop=stop,
        record=keep_trajectory,
    )
    eta_x, om_x = float(tr.y[-1, 0]), float(tr.y[-1, 1])
    steps = int(tr.info.get("steps", len(tr) - 1))
    if tr.status == "stopped":
        w = math.floor((TWO_PI - theta - om_x) / TWO_PI)
        phi = om_x + TWO_PI * w
        cls = "node-above" if phi <= theta else "node-below"
        om_end = _slow_manifold(eps, p, r_max) - TWO_PI * w
        return OrbitOutcome(
            winding=int(w),
            terminal_omega_lift=om_end,
            terminal_eta=eta_max,
            classification=cls,
            reason="committed",
            exit_eta=eta_x,
            exit_omega_lift=om_x,
            steps=steps,
            trajectory=tr if keep_trajectory else None,
        )
    w = int(round((theta - om_x) / TWO_PI))
    # distance to the nearest lifted saddle -theta - 2 pi j
    j = round((-theta - om_x) / TWO_PI)
    near_saddle = abs(om_x - (-theta - TWO_PI * j)) < opts.band_tol
    if near_saddle or tr.status == "step-limit":
        cls = "undecided"
    else:
        cls = "node-above" if om_x + TWO_PI * w <= theta else "node-below"
    return OrbitOutcome(
        winding=w,
        terminal_omega_lift=om_x,
        terminal_eta=eta_x,
        classification=cls,
        reason="cutoff" if tr.status == "event-hit" else tr.status,
        exit_eta=eta_x,
        exit_omega_lift=om_x,
        steps=steps,
        trajectory=tr if keep_trajectory else None,
    )


# --- eigenvalue search ------------------------------------------------------


def oracle_seed(k: int, N: int, p: ModelParams) -> Optional[float]:
    """Sommerfeld value when it is a sensible starting point, else None."""
    n = N + abs(k)
    if k > 0 and N == 0:
        return None
    if p.lam > 1e-2 or p.z_star > 1e-3:
        return None
    val = sommerfeld_za(n, k, -p.gamma)
    return val.eps if val.valid else None


class _WindingCache:
    def __init__(self, p: ModelParams, opts: ShootingOptions) -> None:
        self.p, self.opts = p, opts
        self.cache: dict[float, OrbitOutcome] = {}
        self.calls = 0

    def __call__(self, eps: float) -> OrbitOutcome:
        out = self.cache.get(eps)
        if out is None:
            out = launch_orbit(eps, self.p, self.opts)
            self.cache[eps] = out
            self.calls += 1
        return out


def scan_bracket(
    k: int,
    N: int,
    p: ModelParams,
    opts: ShootingOptions = ShootingOptions(),
    seed: Optional[float] = None,
    _wind: Optional[_WindingCache] = None,
) -> tuple[float, float]:
    """Find ``(lo, hi)`` with winding(lo) <= N and winding(hi) >= N + 1.

    With a seed the bracket grows geometrically around it. Without one, the
    jump is located on a uniform grid by binary search over grid indices,
    which finds the same grid cell as a linear scan because the winding is
    monotone in eps.

    Raises
    ------
    BracketNotFound
    """
    p = p.with_k(k)
    wind = _wind or _WindingCache(p, opts)
    lo_edge, hi_edge = -1.0 + opts.edge_guard, 1.0 - opts.edge_guard
    target = N + 1
    if seed is None and opts.use_oracle_seed:
        seed = oracle_seed(k, N, p)
    if seed is not None and lo_edge < seed < hi_edge:
        m = opts.margin
        lo = max(lo_edge, seed - m)
        while wind(lo).winding >= target:
            if lo == lo_edge:
                raise BracketNotFound(f"winding >= {target} already at eps={lo_edge}")
            m *= 4.0
            lo = max(lo_edge, seed - m)
        m = opts.margin
        hi = min(hi_edge, seed + m)
        while wind(hi).winding < target:
            if hi == hi_edge:
                raise BracketNotFound(f"winding < {target} up to eps={hi_edge}")
            m *= 4.0
            hi = min(hi_edge, seed + m)
        return lo, hi

    n_cells = max(1, int(math.ceil((hi_edge - lo_edge) / opts.grid)))
    grid = lambda i: lo_edge + (hi_edge - lo_edge) * i / n_cells  # noqa: E731
    if wind(hi_edge).winding < target:
        raise BracketNotFound(f"winding < {target} up to eps={hi_edge}")
    if wind(lo_edge).winding >= target:
        raise BracketNotFound(f"winding >= {target} already at eps={lo_edge}")
    i_lo, i_hi = 0, n_cells
    while i_hi - i_lo > 1:
        mid = (i_lo + i_hi) // 2
        if wind(grid(mid)).winding >= target:
            i_hi = mid
        else:
            i_lo = mid
    return grid(i_lo), grid(i_hi)


def find_eigenvalue(
    k: int,
    N: int,
    p: ModelParams,
    seed: Optional[float] = None,
    opts: ShootingOptions = ShootingOptions(),
    bracket: Optional[tuple[float, float]] = None,
) -> EigenvalueRecord:
    """Bisect for the eigenvalue with spin-orbit number k and winding N.

    Parameters
    ----------
    k
        Nonzero spin-orbit eigenvalue.
    N
        Winding number of the connector, N >= 0.
    p
        Model parameters (its ``k`` is replaced by the argument).
    seed
        Optional starting guess, e.g. the eigenvalue at a nearby Z.
    opts
        Search options.
    bracket
        Optional initial bracket; it is verified before use.

    Raises
    ------
    BracketNotFound
        If no admissible eps straddles the winding jump.
    """
    if k == 0:
        raise ValueError("k must be nonzero")
    if N < 0:
        raise ValueError("N must be non-negative")
    p = p.with_k(k)
    wind = _WindingCache(p, opts)
    target = N + 1
    if bracket is not None:
        lo, hi = bracket
        if not (wind(lo).winding < target <= wind(hi).winding):
            raise BracketNotFound(f"supplied bracket {bracket} does not straddle the jump")
    else:
        lo, hi = scan_bracket(k, N, p, opts, seed=seed, _wind=wind)
    iterations = 0
    last = None
    while hi - lo > opts.eps_tol and iterations < opts.max_iterations:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        last = wind(mid)
        iterations += 1
        if last.winding >= target:
            hi = mid
        else:
            lo = mid
    status = "ok"
    if last is not None and not last.decided:
        status = "undecided"
    eps = 0.5 * (lo + hi)
    if k > 0 and N == 0 and eps >= 0.0:
        warnings.warn("connector with k >= 1 and N = 0 found in [0, 1)", RuntimeWarning, stacklevel=2)
    n = N + abs(k)
    oracle = None
    if not (k > 0 and N == 0):
        val = sommerfeld_za(n, k, -p.gamma)
        oracle = val.eps if val.valid else None
    return EigenvalueRecord(
        k=k,
        N=N,
        n=n,
        eps=eps,
        bracket_width=hi - lo,
        iterations=iterations,
        oracle_eps=oracle,
        status=status,
        eps_lo=lo,
        eps_hi=hi,
        orbits=wind.calls,
    )


# --- sweeps -----------------------------------------------------------------


def curve_labels(k_values: Iterable[int], n_max: int) -> list[tuple[int, int]]:
    """All (k, N) with n = N + |k| <= n_max, N >= 1 when k > 0."""
    out = []
    for k in sorted(set(int(k) for k in k_values)):
        if k == 0:
            continue
        for N in range(1 if k > 0 else 0, n_max - abs(k) + 1):
            out.append((k, N))
    return out


@dataclass(frozen=True)
class _CurveTask:
    k: int
    N: int
    z_values: tuple[float, ...]
    template: PhysicalInput
    opts: ShootingOptions
    done: tuple[EigenvalueRecord, ...] = ()


def _params_for(template: PhysicalInput, z: float, k: int) -> ModelParams:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SelfAdjointnessWarning)
        return derive_params(replace(template, Z=z), k)


def _run_curve(task: _CurveTask, on_record: Optional[Callable[[EigenvalueRecord], None]] = None):
    done = {r.z: r for r in task.done}
    out: list[EigenvalueRecord] = []
    seed: Optional[float] = None
    terminated = False
    for z in task.z_values:
        if z in done:
            rec = done[z]
            out.append(rec)
            if rec.status in ("ok", "undecided"):
                seed = rec.eps
            elif rec.status == "absent" and seed is not None:
                terminated = True
            continue
        if terminated:
            rec = EigenvalueRecord.absent(task.k, task.N, z, "curve terminated at lower Z")
        else:
            try:
                p = _params_for(task.template, z, task.k)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    rec = find_eigenvalue(task.k, task.N, p, seed=seed, opts=task.opts)
                rec = replace(rec, z=z)
                seed = rec.eps
            except BracketNotFound as exc:
                rec = EigenvalueRecord.absent(task.k, task.N, z, str(exc))
                if seed is not None:
                    terminated = True
            except Exception as exc:  # recorded, never aborts the sweep
                rec = EigenvalueRecord.failed(task.k, task.N, z, f"{type(exc).__name__}: {exc}")
        out.append(rec)
        if on_record is not None:
            on_record(rec)
    return out


def spectrum_sweep(
    z_values: Sequence[float],
    k_values: Iterable[int],
    n_max: int,
    template: PhysicalInput,
    opts: ShootingOptions = ShootingOptions(),
    jobs: int = 1,
    done: Iterable[EigenvalueRecord] = (),
    on_record: Optional[Callable[[EigenvalueRecord], None]] = None,
) -> SpectralTable:
    """Compute every (k, N) curve with n <= n_max over ascending Z.

    Within a curve the previous eigenvalue seeds the next bracket. Curves are
    independent and run in parallel when ``jobs > 1``. ``done`` supplies
    records from an earlier interrupted run; they are reused verbatim.
    Once a curve has been found and then lost, the remaining cells are marked
    absent without further search.
    """
    zs = tuple(sorted(float(z) for z in z_values))
    done_by_curve: dict[tuple[int, int], list[EigenvalueRecord]] = {}
    for r in done:
        done_by_curve.setdefault((r.k, r.N), []).append(r)
    tasks = [
        _CurveTask(k, N, zs, template, opts, tuple(done_by_curve.get((k, N), ())))
        for k, N in curve_labels(k_values, n_max)
    ]
    records: list[EigenvalueRecord] = []
    if jobs <= 1 or len(tasks) <= 1:
        for task in tasks:
            records.extend(_run_curve(task, on_record))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_curve, task) for task in tasks]
            for fut in futures:
                curve = fut.result()
                if on_record is not None:
                    for rec in curve:
                        on_record(rec)
                records.extend(curve)
    return SpectralTable.sorted(records)


def z_of_params(p: ModelParams, alpha: float = ALPHA_DEFAULT) -> float:
    return -p.gamma / alpha
