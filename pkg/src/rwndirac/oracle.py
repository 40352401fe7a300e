"""Closed-form reference spectra used as test oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import ALPHA_DEFAULT


@dataclass(frozen=True)
class OracleValue:
    """A reference energy with its validity flag.

    ``eps`` is ``nan`` when ``valid`` is false.
    """

    eps: float
    valid: bool

    @property
    def validity(self) -> str:
        return "in-range" if self.valid else "out-of-range"


def _check_indices(n: int, k: int) -> None:
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if k == 0 or int(k) != k:
        raise ValueError(f"k must be a nonzero integer, got {k!r}")
    if abs(k) > n:
        raise ValueError(f"|k|={abs(k)} exceeds n={n}")
    if k == n:
        raise ValueError("k = n > 0 is not a bound-state label")


def sommerfeld_za(n: int, k: int, za: float) -> OracleValue:
    """Fine-structure energy in units of the electron rest energy, given Z*alpha."""
    _check_indices(n, k)
    if za < 0:
        raise ValueError("Z*alpha must be non-negative")
    za2 = za * za
    if za2 >= k * k:
        return OracleValue(math.nan, False)
    den = n - abs(k) + math.sqrt(k * k - za2)
    return OracleValue(1.0 / math.sqrt(1.0 + za2 / (den * den)), True)


def sommerfeld(n: int, k: int, z: float, alpha: float = ALPHA_DEFAULT) -> OracleValue:
    """Sommerfeld fine-structure energy for principal number n and spin-orbit k.

    Raises
    ------
    ValueError
        For labels outside the bound-state index set.
    """
    if z <= 0:
        raise ValueError("z must be positive")
    return sommerfeld_za(n, k, z * alpha)


def bohr(n: int, z: float, alpha: float = ALPHA_DEFAULT, grav_term: float = 0.0) -> float:
    """Nonrelativistic binding energy -(Z alpha + grav)^2 / (2 n^2)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if grav_term < 0:
        raise ValueError("grav_term must be non-negative")
    return -0.5 * (z * alpha + grav_term) ** 2 / (n * n)


@dataclass(frozen=True)
class Landmark:
    curve: str
    z: float
    eps: float
    z_tol: float


def fig1_landmarks() -> list[Landmark]:
    """Qualitative landmarks of the low-lying curves as functions of Z.

    Tolerances in Z are our choice; the reference values are approximate.
    """
    return [
        Landmark("1S-crossing", 145.0, 0.0, 2.0),
        Landmark("1S-continuum", 147.0, -1.0, 3.0),
        Landmark("2P-continuum", 160.0, -1.0, 5.0),
    ]
