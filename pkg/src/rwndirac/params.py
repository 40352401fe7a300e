"""Physical inputs and the dimensionless model parameters derived from them."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

ALPHA_DEFAULT = 1.0 / 137.036
G_RATIO_DEFAULT = 2.40e-43
MASS_RATIO_DEFAULT = 1836.0
AMM_DEFAULT = ALPHA_DEFAULT / (2.0 * math.pi)

# relative tolerance for the invariant z_star = -sqrt(g)*gamma
_CONSISTENCY_RTOL = 1e-12


class ParameterError(ValueError):
    """Raised when inputs lie outside the supported parameter sector."""


class NonNakedError(ParameterError):
    """Raised when A* >= Z* with gravity on (the metric factor would vanish)."""


class SelfAdjointnessWarning(UserWarning):
    """Emitted when lambda falls below (3/2) Z*."""


@dataclass(frozen=True)
class PhysicalInput:
    """Physical configuration of nucleus, electron and gravity strength.

    Parameters
    ----------
    Z : float
        Nuclear charge in units of e. Real values allowed.
    A : float
        Nuclear mass number.
    a : float
        Anomalous magnetic moment in Bohr magnetons.
    g_ratio : float
        Dimensionless gravity strength; 0 switches gravity off.
    mass_ratio : float
        Proton-to-electron mass ratio.
    alpha : float
        Fine structure constant.
    lam : float or None
        Direct override of the dimensionless moment coupling.
    """

    Z: float
    A: float = 0.0
    a: float = AMM_DEFAULT
    g_ratio: float = G_RATIO_DEFAULT
    mass_ratio: float = MASS_RATIO_DEFAULT
    alpha: float = ALPHA_DEFAULT
    lam: float | None = None

    def __post_init__(self) -> None:
        checks = {
            "Z": self.Z > 0,
            "A": self.A >= 0,
            "a": self.a >= 0,
            "g_ratio": self.g_ratio >= 0,
            "mass_ratio": self.mass_ratio > 0,
            "alpha": self.alpha > 0,
        }
        for name, ok in checks.items():
            if not (ok and math.isfinite(getattr(self, name))):
                raise ParameterError(f"invalid {name}={getattr(self, name)!r}")
        if self.lam is not None and not self.lam > 0:
            raise ParameterError(f"lambda override must be positive, got {self.lam!r}")


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless parameters of the radial Dirac problem.

    ``lam`` is the anomalous-moment coupling (``lambda`` is a Python keyword).
    The two boolean flags record the naked-singularity and self-adjointness
    conditions at construction time.
    """

    z_star: float
    a_star: float
    gamma: float
    lam: float
    g_ratio: float
    k: int = -1
    naked: bool = field(default=True, compare=False)
    self_adjoint: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        if self.k == 0 or int(self.k) != self.k:
            raise ParameterError(f"k must be a nonzero integer, got {self.k!r}")
        if not self.lam > 0:
            raise ParameterError("lambda must be positive")
        if not self.gamma < 0:
            raise ParameterError("gamma must be negative")
        if self.z_star < 0 or self.a_star < 0 or self.g_ratio < 0:
            raise ParameterError("z_star, a_star and g_ratio must be non-negative")

    @property
    def flat(self) -> bool:
        """True when gravity is switched off."""
        return self.g_ratio == 0.0

    def with_k(self, k: int) -> "ModelParams":
        return replace(self, k=int(k))

    def with_lambda(self, lam: float) -> "ModelParams":
        return replace(self, lam=float(lam), self_adjoint=lam >= 1.5 * self.z_star)


def derive_params(inp: PhysicalInput, k: int = -1) -> ModelParams:
    """Map physical inputs to dimensionless model parameters.

    Raises
    ------
    NonNakedError
        If gravity is on and A* >= Z*.

    Warns
    -----
    SelfAdjointnessWarning
        If lambda < (3/2) Z*. This is legitimate for validation runs.
    """
    sqrt_g = math.sqrt(inp.g_ratio)
    z_star = sqrt_g * inp.alpha * inp.Z
    a_star = inp.g_ratio * inp.alpha * inp.mass_ratio * inp.A
    gamma = -inp.Z * inp.alpha
    lam = inp.lam if inp.lam is not None else 0.5 * inp.a * inp.Z * inp.alpha
    if not lam > 0:
        raise ParameterError("lambda vanishes; supply a > 0 or a lambda override")
    naked = inp.g_ratio == 0.0 or a_star < z_star
    if not naked:
        raise NonNakedError(
            f"A*={a_star:.3e} >= Z*={z_star:.3e}: horizon sector is not supported"
        )
    self_adjoint = lam >= 1.5 * z_star
    if not self_adjoint:
        warnings.warn(
            f"lambda={lam:.3e} below (3/2)Z*={1.5 * z_star:.3e}",
            SelfAdjointnessWarning,
            stacklevel=2,
        )
    return ModelParams(
        z_star=z_star,
        a_star=a_star,
        gamma=gamma,
        lam=lam,
        g_ratio=inp.g_ratio,
        k=int(k),
        naked=naked,
        self_adjoint=self_adjoint,
    )


def self_adjointness_margin(p: ModelParams) -> float:
    """Return (3/2) Z* / lambda; values below 1 satisfy the threshold."""
    return 1.5 * p.z_star / p.lam


def consistency_error(p: ModelParams) -> float:
    """Relative mismatch in z_star = -sqrt(g_ratio) * gamma."""
    ref = -math.sqrt(p.g_ratio) * p.gamma
    if ref == 0.0:
        return abs(p.z_star)
    return abs(p.z_star - ref) / abs(ref)


def is_consistent(p: ModelParams, rtol: float = _CONSISTENCY_RTOL) -> bool:
    return consistency_error(p) <= rtol


# --- config ingestion -------------------------------------------------------

_FIELD_ALIASES = {
    "z": "Z",
    "charge": "Z",
    "mass_number": "A",
    "amm": "a",
    "anomalous_moment": "a",
    "g": "g_ratio",
    "gravity": "g_ratio",
    "lambda": "lam",
}


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParameterError(f"config line {lineno}: empty key")
        out[key] = value
    return out


def load_config(path: str | Path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def physical_input_from_mapping(values: Mapping[str, Any], **overrides: Any) -> PhysicalInput:
    """Build a :class:`PhysicalInput` from a mapping plus keyword overrides.

    Unknown keys are ignored so a single config file can also carry run options.
    """
    merged: dict[str, Any] = {}
    known = {"Z", "A", "a", "g_ratio", "mass_ratio", "alpha", "lam"}
    for key, value in list(values.items()) + list(overrides.items()):
        if value is None:
            continue
        name = _FIELD_ALIASES.get(key.lower(), key)
        if name in known:
            merged[name] = float(value)
    if "Z" not in merged:
        raise ParameterError("Z is required")
    return PhysicalInput(**merged)
