"""Prufer flow on the compactified cylinder.

Two formulations are provided. The radial form is non-autonomous in r.
The cylinder form is autonomous in a time variable tau with dr/dtau = eta
(curved space) or dr/dtau = eta**2 (flat space, where g(0) = 0 would make
the eta-scaled field singular).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .metric import f as metric_f
from .metric import g_coefficients
from .params import ModelParams

VectorField = Callable[[float, Sequence[float]], tuple]


@dataclass(frozen=True)
class CylinderState:
    """Point (eta, lifted Omega) on the universal cover of the cylinder."""

    eta: float
    omega_lift: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta={self.eta} outside [0, 1]")

    def reduced(self) -> float:
        """Omega reduced to (-pi, pi] for presentation."""
        return reduce_angle(self.omega_lift)


def reduce_angle(omega: float) -> float:
    w = math.remainder(omega, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


class EquilibriumId(str, Enum):
    S_MINUS = "s_minus"
    N_MINUS = "n_minus"
    S_PLUS = "s_plus"
    N_PLUS = "n_plus"


@dataclass(frozen=True)
class Equilibria:
    s_minus: CylinderState
    n_minus: CylinderState
    s_plus: CylinderState
    n_plus: CylinderState

    def __getitem__(self, which: EquilibriumId | str) -> CylinderState:
        return getattr(self, EquilibriumId(which).value)


def _check_eps(eps: float) -> None:
    if not -1.0 <= eps <= 1.0:
        raise ValueError(f"|eps| must not exceed 1, got {eps}")


def equilibria(eps: float) -> Equilibria:
    _check_eps(eps)
    th = math.acos(eps)
    return Equilibria(
        s_minus=CylinderState(0.0, 0.0),
        n_minus=CylinderState(0.0, -math.pi),
        s_plus=CylinderState(1.0, -th),
        n_plus=CylinderState(1.0, th),
    )


def omega_prime_r(r: float, omega: float, eps: float, p: ModelParams) -> float:
    """dOmega/dr of the Prufer angle in the radial variable."""
    if r <= 0:
        raise ValueError("omega_prime_r requires r > 0")
    fr = metric_f(r, p)
    s, c = math.sin(omega), math.cos(omega)
    return (
        (2.0 / fr) * c
        + (2.0 / fr) * (p.k / r - p.lam / (r * r)) * s
        + (2.0 / (fr * fr)) * (p.gamma / r - eps)
    )


def log_amplitude_prime_r(r: float, omega: float, p: ModelParams) -> float:
    """d(log R)/dr of the Prufer amplitude."""
    fr = metric_f(r, p)
    return (math.sin(omega) + (-p.k / r + p.lam / (r * r)) * math.cos(omega)) / fr


def make_tau_field(eps: float, p: ModelParams, with_amplitude: bool = False) -> VectorField:
    """Return the cylinder vector field ``field(tau, y)`` as a fast closure.

    The state is ``(eta, omega)`` or ``(eta, omega, log_R)`` when
    ``with_amplitude`` is set. The curved or flat variant is chosen from
    ``p.g_ratio``.
    """
    k, lam, gam = float(p.k), float(p.lam), float(p.gamma)
    sin, cos = math.sin, math.cos

    if p.g_ratio == 0.0:
        # time rescaled so that dr/dtau = eta**2

        def flat2(t, y):
            eta, om = y[0], y[1]
            q = 1.0 - eta
            return (
                eta * eta * q * q,
                2.0 * eta * eta * cos(om)
                + 2.0 * (k * eta * q - lam * q * q) * sin(om)
                + 2.0 * eta * (gam * q - eps * eta),
            )

        def flat3(t, y):
            eta, om = y[0], y[1]
            q = 1.0 - eta
            s, c = sin(om), cos(om)
            e2 = eta * eta
            a = k * eta * q
            b = lam * q * q
            return (
                e2 * q * q,
                2.0 * e2 * c + 2.0 * (a - b) * s + 2.0 * eta * (gam * q - eps * eta),
                e2 * s + (b - a) * c,
            )

        return flat3 if with_amplitude else flat2

    c2, c1, c0 = g_coefficients(p)
    sqrt = math.sqrt

    def curved2(t, y):
        eta, om = y[0], y[1]
        q = 1.0 - eta
        gi = 1.0 / sqrt((c2 * eta + c1) * eta + c0)
        e2g = eta * eta * gi
        return (
            eta * q * q,
            2.0 * e2g * cos(om)
            + 2.0 * gi * (k * eta * q - lam * q * q) * sin(om)
            + 2.0 * e2g * gi * (gam * q - eps * eta),
        )

    def curved3(t, y):
        eta, om = y[0], y[1]
        q = 1.0 - eta
        gi = 1.0 / sqrt((c2 * eta + c1) * eta + c0)
        e2g = eta * eta * gi
        s, c = sin(om), cos(om)
        a = k * eta * q
        b = lam * q * q
        return (
            eta * q * q,
            2.0 * e2g * c + 2.0 * gi * (a - b) * s + 2.0 * e2g * gi * (gam * q - eps * eta),
            e2g * s + gi * (b - a) * c,
        )

    return curved3 if with_amplitude else curved2


def rhs_tau(state: CylinderState, eps: float, p: ModelParams) -> tuple[float, float]:
    """Evaluate the cylinder field at a state.

    The endpoints use the simplified limits g(0) = Z* and g(1) = 1.
    """
    eta, om = state.eta, state.omega_lift
    if p.g_ratio != 0.0:
        if eta == 0.0:
            if p.z_star == 0.0:
                raise ValueError("curved field at eta=0 needs Z* > 0")
            return 0.0, -2.0 * p.lam / p.z_star * math.sin(om)
        if eta == 1.0:
            return 0.0, 2.0 * math.cos(om) - 2.0 * eps
    dy = make_tau_field(eps, p)(0.0, (eta, om))
    return float(dy[0]), float(dy[1])


def dr_dtau(eta: float, p: ModelParams) -> float:
    """Radial speed of the cylinder time variable."""
    return eta * eta if p.g_ratio == 0.0 else eta


def tau_of_r(r: float, p: ModelParams) -> float:
    """A primitive of dtau/dr, used to label trajectory samples."""
    if p.g_ratio == 0.0:
        return r + 2.0 * math.log(r) - 1.0 / r
    return r + math.log(r)


def jacobian(which: EquilibriumId | str, eps: float, p: ModelParams) -> np.ndarray:
    """Exact Jacobian of the cylinder field at an equilibrium.

    At the eta=1 equilibria the entries are obtained by differentiating the
    field directly. The Omega-Omega entry is -2 sin(Omega) there, which is
    +-2 sqrt(1 - eps^2).
    """
    which = EquilibriumId(which)
    _check_eps(eps)
    if which in (EquilibriumId.S_MINUS, EquilibriumId.N_MINUS):
        if p.z_star <= 0.0 or p.g_ratio == 0.0:
            raise ValueError("Jacobian at eta=0 needs Z* > 0 (curved space)")
        sign = -1.0 if which is EquilibriumId.S_MINUS else 1.0
        return np.array([[1.0, 0.0], [0.0, sign * 2.0 * p.lam / p.z_star]])
    root = math.sqrt(max(0.0, 1.0 - eps * eps))
    sgn = 1.0 if which is EquilibriumId.S_PLUS else -1.0
    # the A* term is absent in the flat field
    c = 2.0 * p.a_star * eps - 2.0 * p.gamma + sgn * 2.0 * p.k * root
    return np.array([[0.0, 0.0], [c, sgn * 2.0 * root]])


def jacobian_stated(which: EquilibriumId | str, eps: float, p: ModelParams) -> np.ndarray:
    """Jacobian entries in the form quoted in the source derivation.

    Kept for comparison only; :func:`jacobian` is the exact one.
    """
    which = EquilibriumId(which)
    if which in (EquilibriumId.S_MINUS, EquilibriumId.N_MINUS):
        return jacobian(which, eps, p)
    root = math.sqrt(max(0.0, 1.0 - eps * eps))
    sgn = 1.0 if which is EquilibriumId.S_PLUS else -1.0
    c = 2.0 * (1.0 - p.a_star + sgn * p.k) * root + 2.0 * eps * (2.0 * p.a_star - 1.0) - 2.0 * p.gamma
    return np.array([[0.0, 0.0], [c, sgn * root]])


def numerical_jacobian(state: CylinderState, eps: float, p: ModelParams, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian; one-sided in eta at the boundary."""
    field = make_tau_field(eps, p)

    def F(eta: float, om: float) -> np.ndarray:
        if p.g_ratio != 0.0 and (eta == 0.0 or eta == 1.0):
            return np.array(rhs_tau(CylinderState(eta, om), eps, p))
        return np.array(field(0.0, (eta, om)), dtype=float)

    eta, om = state.eta, state.omega_lift
    J = np.empty((2, 2))
    if eta <= 0.0:
        J[:, 0] = (-3 * F(eta, om) + 4 * F(eta + h, om) - F(eta + 2 * h, om)) / (2 * h)
    elif eta >= 1.0:
        J[:, 0] = (3 * F(eta, om) - 4 * F(eta - h, om) + F(eta - 2 * h, om)) / (2 * h)
    else:
        J[:, 0] = (F(eta + h, om) - F(eta - h, om)) / (2 * h)
    J[:, 1] = (F(eta, om + h) - F(eta, om - h)) / (2 * h)
    return J


def unstable_direction_s_minus(p: ModelParams) -> np.ndarray:
    """Unstable eigenvector of the Jacobian at S-.

    The Jacobian there is diagonal, so the eigenvector belonging to the
    unstable eigenvalue 1 is (1, 0). The tangent quoted in the source
    derivation is returned by :func:`stated_direction_s_minus`.
    """
    if p.z_star <= 0.0:
        raise ValueError("S- direction needs Z* > 0")
    return np.array([1.0, 0.0])


def stated_direction_s_minus(p: ModelParams) -> np.ndarray:
    """The tangent (1, -2 lambda/Z*) as quoted in the source derivation."""
    if p.z_star <= 0.0:
        raise ValueError("S- direction needs Z* > 0")
    return np.array([1.0, -2.0 * p.lam / p.z_star])


def manifold_curvature_s_minus(eps: float, p: ModelParams) -> float:
    """Coefficient c in the unstable-manifold expansion Omega ~ c * eta**2 at S-.

    Negative for physical inputs, so the manifold leaves S- below Omega = 0.
    """
    if p.z_star <= 0.0:
        raise ValueError("needs Z* > 0")
    zs = p.z_star
    return (1.0 / zs + p.gamma / (zs * zs)) / (1.0 + p.lam / zs)


def lift_winding(omega_end: float, eps: float) -> int:
    """Winding number read off a terminal lifted angle near the node."""
    _check_eps(eps)
    return int(round((math.acos(eps) - omega_end) / (2.0 * math.pi)))
