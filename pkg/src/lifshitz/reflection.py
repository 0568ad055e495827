"""Specular reflection of a vacuum/half-space interface at imaginary frequency.

Only media whose reflection matrix stays diagonal are supported: isotropic
magnetodielectrics and uniaxial media with the optical axis normal to the
interface. All quantities are real on the imaginary axis.

Sign convention: for an electric mirror ``r_ss -> -1`` and ``r_pp -> +1``;
for a magnetic mirror the signs swap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .dispersion import DispersionModel, IdealConductor, IdealPermeable, has_drude_term

__all__ = [
    "TransverseMode",
    "ReflectionMatrix",
    "Isotropic",
    "Uniaxial",
    "MediumSpec",
    "fresnel_isotropic",
    "fresnel_uniaxial",
    "reflection_for",
    "diagonal_coefficients",
    "medium_has_drude_term",
]


@dataclass(frozen=True)
class TransverseMode:
    """Imaginary frequency ``x`` and transverse wavenumber ``u`` (both in units of omega_ref)."""

    x: float
    u: float

    def __post_init__(self):
        if np.any(np.asarray(self.x) < 0) or np.any(np.asarray(self.u) < 0):
            raise ValueError("x and u must be non-negative")
        if np.any(np.asarray(self.x) + np.asarray(self.u) <= 0):
            raise ValueError("k3 = sqrt(x^2 + u^2) must be positive")

    @property
    def k3(self):
        return np.sqrt(np.asarray(self.x) ** 2 + np.asarray(self.u) ** 2)


@dataclass(frozen=True)
class ReflectionMatrix:
    r_ss: float
    r_pp: float
    r_sp: float = 0.0
    r_ps: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([[self.r_ss, self.r_sp], [self.r_ps, self.r_pp]])


@dataclass(frozen=True)
class Isotropic:
    eps: DispersionModel
    mu: DispersionModel


@dataclass(frozen=True)
class Uniaxial:
    """Permittivity and permeability tensors ``diag(par, par, perp)``."""

    eps_par: DispersionModel
    eps_perp: DispersionModel
    mu_par: DispersionModel
    mu_perp: DispersionModel


MediumSpec = Union[Isotropic, Uniaxial, IdealConductor, IdealPermeable]


def _root(radicand):
    # passive media on the imaginary axis never produce a negative radicand
    assert np.all(radicand >= 0), "negative radicand: non-passive response value"
    return np.sqrt(radicand)


def _iso(eps, mu, x, u, k3):
    km = _root(u * u + mu * eps * x * x)
    mk = mu * k3
    ek = eps * k3
    return (mk - km) / (mk + km), (ek - km) / (ek + km)


def _uni(eps_par, eps_perp, mu_par, mu_perp, x, u, k3):
    # same operation order as _iso so that par == perp reproduces it bit for bit
    u2 = u * u
    common = mu_par * eps_par * x * x
    ks = _root((mu_par / mu_perp) * u2 + common)
    kp = _root((eps_par / eps_perp) * u2 + common)
    mk = mu_par * k3
    ek = eps_par * k3
    return (mk - ks) / (mk + ks), (ek - kp) / (ek + kp)


def fresnel_isotropic(eps, mu, mode: TransverseMode) -> ReflectionMatrix:
    """Fresnel coefficients of an isotropic medium with response values ``eps``, ``mu``."""
    x, u = np.asarray(mode.x, dtype=float), np.asarray(mode.u, dtype=float)
    if np.any(np.isinf(eps)) or np.any(np.isinf(mu)):
        return _ideal(eps, mu, x)
    r_ss, r_pp = _iso(np.asarray(eps, dtype=float), np.asarray(mu, dtype=float), x, u, mode.k3)
    return ReflectionMatrix(r_ss, r_pp)


def fresnel_uniaxial(eps_par, eps_perp, mu_par, mu_perp, mode: TransverseMode) -> ReflectionMatrix:
    """Fresnel coefficients of a uniaxial medium, optical axis along the interface normal."""
    x, u = np.asarray(mode.x, dtype=float), np.asarray(mode.u, dtype=float)
    r_ss, r_pp = _uni(*(np.asarray(v, dtype=float) for v in (eps_par, eps_perp, mu_par, mu_perp)),
                      x, u, mode.k3)
    return ReflectionMatrix(r_ss, r_pp)


def _ideal(eps, mu, x):
    ones = np.ones_like(np.asarray(x, dtype=float))
    if np.any(np.isinf(eps)) and np.any(np.isinf(mu)):
        raise ValueError("eps and mu cannot both be infinite")
    if np.any(np.isinf(eps)):
        return ReflectionMatrix(-ones, ones)
    return ReflectionMatrix(ones, -ones)


def medium_has_drude_term(medium) -> bool:
    if isinstance(medium, Isotropic):
        return has_drude_term(medium.eps) or has_drude_term(medium.mu)
    if isinstance(medium, Uniaxial):
        return any(has_drude_term(m) for m in
                   (medium.eps_par, medium.eps_perp, medium.mu_par, medium.mu_perp))
    return False


def diagonal_coefficients(medium, x, u, k3):
    """Vectorized ``(r_ss, r_pp)`` of ``medium`` on arrays of modes.

    ``k3`` is passed in so callers working in polar coordinates can supply
    the radius directly.
    """
    if isinstance(medium, IdealConductor):
        ones = np.ones_like(k3)
        return -ones, ones
    if isinstance(medium, IdealPermeable):
        ones = np.ones_like(k3)
        return ones, -ones
    if isinstance(medium, Isotropic):
        eps_ideal = isinstance(medium.eps, IdealConductor)
        mu_ideal = isinstance(medium.mu, IdealPermeable)
        if eps_ideal and mu_ideal:
            raise ValueError("a medium cannot be both an ideal conductor and ideal permeable")
        if eps_ideal:
            return diagonal_coefficients(IdealConductor(), x, u, k3)
        if mu_ideal:
            return diagonal_coefficients(IdealPermeable(), x, u, k3)
        return _iso(medium.eps(x), medium.mu(x), x, u, k3)
    if isinstance(medium, Uniaxial):
        return _uni(medium.eps_par(x), medium.eps_perp(x), medium.mu_par(x), medium.mu_perp(x),
                    x, u, k3)
    raise TypeError(f"unsupported medium {medium!r}")


def reflection_for(medium: MediumSpec, mode: TransverseMode) -> ReflectionMatrix:
    """Reflection matrix of ``medium`` for a single mode (or broadcastable arrays)."""
    x = np.asarray(mode.x, dtype=float)
    u = np.asarray(mode.u, dtype=float)
    r_ss, r_pp = diagonal_coefficients(medium, x, u, mode.k3)
    if r_ss.ndim == 0:
        return ReflectionMatrix(float(r_ss), float(r_pp))
    return ReflectionMatrix(r_ss, r_pp)
