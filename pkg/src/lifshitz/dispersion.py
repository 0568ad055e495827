"""Material response functions on the imaginary frequency axis.

All parameters and arguments are dimensionless, normalized by a reference
angular frequency ``omega_ref`` (see :class:`FrequencyScale`). A model is a
small frozen dataclass that is called with an imaginary frequency ``x`` (a
float or an array) and returns ``eps(i x)`` or ``mu(i x)``.

Sign conventions follow the causal response ``1 - W^2 / (w^2 - w0^2 + i g w)``
at real frequency ``w``; on the imaginary axis every term becomes real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

__all__ = [
    "FrequencyScale",
    "ModelDomainError",
    "Vacuum",
    "Drude",
    "Lorentz",
    "Composite",
    "Srr",
    "IdealConductor",
    "IdealPermeable",
    "DispersionModel",
    "eval_drude",
    "eval_lorentz",
    "eval_composite",
    "eval_srr",
    "has_drude_term",
]


class ModelDomainError(ValueError):
    """Raised when a model is evaluated outside its domain (e.g. Drude at x <= 0)."""


@dataclass(frozen=True)
class FrequencyScale:
    """Reference angular frequency ``omega_ref`` (rad/s) and length ``2 pi c / omega_ref``."""

    omega_ref: float

    def __post_init__(self):
        if not (self.omega_ref > 0 and math.isfinite(self.omega_ref)):
            raise ValueError(f"omega_ref must be positive and finite, got {self.omega_ref}")

    @property
    def lambda_ref(self) -> float:
        return 2 * math.pi * SPEED_OF_LIGHT / self.omega_ref


def _check_positive(x, strict=True):
    x = np.asarray(x, dtype=float)
    bad = x <= 0 if strict else x < 0
    if np.any(bad):
        raise ModelDomainError(
            f"imaginary frequency must be {'> 0' if strict else '>= 0'}, got min {x.min()}"
        )
    return x


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class Vacuum:
    def __call__(self, x):
        return np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Drude:
    """Free-carrier response ``1 + plasma_freq^2 / (x^2 + damping x)``."""

    plasma_freq: float
    damping: float = 0.0

    def __post_init__(self):
        _require(self.plasma_freq > 0, f"plasma_freq must be > 0, got {self.plasma_freq}")
        _require(self.damping >= 0, f"damping must be >= 0, got {self.damping}")

    def __call__(self, x):
        return eval_drude(self, x)


@dataclass(frozen=True)
class Lorentz:
    """Resonant response ``1 + strength^2 / (x^2 + resonance^2 + damping x)``.

    Used for both the resonant permittivity and the resonant permeability.
    """

    oscillator_strength: float
    resonance_freq: float
    damping: float = 0.0

    def __post_init__(self):
        _require(self.oscillator_strength >= 0,
                 f"oscillator_strength must be >= 0, got {self.oscillator_strength}")
        _require(self.resonance_freq > 0, f"resonance_freq must be > 0, got {self.resonance_freq}")
        _require(self.damping >= 0, f"damping must be >= 0, got {self.damping}")

    def __call__(self, x):
        return eval_lorentz(self, x)


@dataclass(frozen=True)
class Composite:
    """Metallic-background metamaterial permittivity.

    A fraction ``filling_factor`` of Drude metal plus ``1 - filling_factor``
    of the resonant (Lorentz) part.
    """

    filling_factor: float
    drude: Drude
    lorentz: Lorentz

    def __post_init__(self):
        _require(0 <= self.filling_factor <= 1,
                 f"filling_factor must lie in [0, 1], got {self.filling_factor}")

    def __call__(self, x):
        return eval_composite(self, x)


@dataclass(frozen=True)
class Srr:
    """Split-ring-resonator permeability ``1 - C x^2 / (x^2 + w_m^2 + g_m x)``."""

    geometry_factor: float
    resonance_freq: float
    damping: float = 0.0

    def __post_init__(self):
        _require(0 < self.geometry_factor < 1,
                 f"geometry_factor must lie in (0, 1), got {self.geometry_factor}")
        _require(self.resonance_freq > 0, f"resonance_freq must be > 0, got {self.resonance_freq}")
        _require(self.damping >= 0, f"damping must be >= 0, got {self.damping}")

    def __call__(self, x):
        return eval_srr(self, x)


@dataclass(frozen=True)
class IdealConductor:
    """Perfect electric conductor. Only meaningful as a reflection limit."""

    def __call__(self, x):
        raise TypeError("IdealConductor has no finite response; use it as a reflection limit")


@dataclass(frozen=True)
class IdealPermeable:
    """Infinitely permeable medium. Only meaningful as a reflection limit."""

    def __call__(self, x):
        raise TypeError("IdealPermeable has no finite response; use it as a reflection limit")


def eval_drude(p: Drude, x):
    x = _check_positive(x)
    return 1.0 + p.plasma_freq**2 / (x * x + p.damping * x)


def eval_lorentz(p: Lorentz, x):
    x = _check_positive(x, strict=False)
    return 1.0 + p.oscillator_strength**2 / (x * x + p.resonance_freq**2 + p.damping * x)


def eval_composite(p: Composite, x):
    f = p.filling_factor
    if f == 0.0:
        return eval_lorentz(p.lorentz, x)
    if f == 1.0:
        return eval_drude(p.drude, x)
    x = _check_positive(x)
    d, r = p.drude, p.lorentz
    return (1.0
            + f * d.plasma_freq**2 / (x * x + d.damping * x)
            + (1.0 - f) * r.oscillator_strength**2 / (x * x + r.resonance_freq**2 + r.damping * x))


def eval_srr(p: Srr, x):
    x = _check_positive(x, strict=False)
    # 1 - C x^2/(x^2 + w^2 + g x), arranged so every rounded step is monotone in x
    with np.errstate(divide="ignore", invalid="ignore"):
        growth = x / (p.resonance_freq**2 / x + p.damping)
    growth = np.where(x == 0, 0.0, growth)
    out = (1.0 - p.geometry_factor) + p.geometry_factor / (1.0 + growth)
    return out if np.ndim(out) else float(out)


def has_drude_term(model) -> bool:
    """True when ``model`` diverges as x -> 0 (x = 0 is then out of domain)."""
    if isinstance(model, Drude):
        return True
    if isinstance(model, Composite):
        return model.filling_factor > 0
    from .kramers_kronig import Tabulated
    if isinstance(model, Tabulated):
        return model.uses_drude_tail
    return False


# Tabulated (Kramers-Kronig) models live in ``kramers_kronig``; the union is
# completed there to avoid a circular import at module load.
DispersionModel = Union[Vacuum, Drude, Lorentz, Composite, Srr, IdealConductor, IdealPermeable]
