"""Casimir-Lifshitz force and energy per unit area between two half-spaces.

Everything is dimensionless. With ``x = xi / omega_ref``,
``u = c k_par / omega_ref`` and ``D = omega_ref d / c`` the force is

    f = (F/A) 2 pi^2 c^3 / (hbar omega_ref^4)
      = int_0^inf dx int_0^inf du  u k3 sum_p R_p e^{-2 k3 D} / (1 - R_p e^{-2 k3 D})

and the energy

    e = (E/A) 2 pi^2 c^2 / (hbar omega_ref^3)
      = 1/2 int_0^inf dx int_0^inf du  u sum_p ln(1 - R_p e^{-2 k3 D})

where ``R_p = r1_p r2_p`` for p in (ss, pp) and ``k3 = sqrt(x^2 + u^2)``.
Positive force means attraction, and ``f = +de/dD``.

The quarter plane is mapped to polar coordinates ``(rho, phi)`` with
``rho = k3``, then ``s = exp(-2 rho D)`` maps ``rho`` onto ``(0, 1)``. The
outer integral runs over ``s``, the inner over ``phi``, both by adaptive
Gauss-Kronrod with open endpoints, so ``x = 0`` is never sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import gausskronrod as gk
from .dispersion import FrequencyScale
from .reflection import MediumSpec, diagonal_coefficients, medium_has_drude_term

__all__ = [
    "SILVER_PLASMA_FREQUENCY",
    "CavityConfig",
    "QuadratureSettings",
    "Sign",
    "ForceResult",
    "EnergyResult",
    "SpectralRow",
    "force_integrand",
    "energy_integrand",
    "force_per_area",
    "energy_per_area",
    "spectral_profile",
    "ideal_force",
    "ideal_energy",
]

SILVER_PLASMA_FREQUENCY = 1.37e16  # rad/s, default reference scale

IDEAL_FORCE_COEFF = math.pi**4 / 120
IDEAL_ENERGY_COEFF = math.pi**4 / 360


def ideal_force(gap: float) -> float:
    """Normalized force between two perfect electric mirrors."""
    return IDEAL_FORCE_COEFF / gap**4


def ideal_energy(gap: float) -> float:
    """Normalized energy between two perfect electric mirrors."""
    return -IDEAL_ENERGY_COEFF / gap**3


@dataclass(frozen=True)
class CavityConfig:
    """Two half-spaces separated by a vacuum gap ``D = omega_ref d / c``."""

    medium1: MediumSpec
    medium2: MediumSpec
    gap: float
    scale: FrequencyScale = field(default_factory=lambda: FrequencyScale(SILVER_PLASMA_FREQUENCY))

    def __post_init__(self):
        if not (self.gap > 0 and math.isfinite(self.gap)):
            raise ValueError(f"gap must be positive and finite, got {self.gap}")

    @classmethod
    def from_d_over_lambda(cls, medium1, medium2, d_over_lambda: float, scale=None):
        scale = scale or FrequencyScale(SILVER_PLASMA_FREQUENCY)
        return cls(medium1, medium2, 2 * math.pi * d_over_lambda, scale)

    @property
    def d_over_lambda(self) -> float:
        return self.gap / (2 * math.pi)

    @property
    def needs_open_x(self) -> bool:
        return medium_has_drude_term(self.medium1) or medium_has_drude_term(self.medium2)


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances for the nested integration.

    ``tail_cut`` is the largest ``k3`` integrated; ``None`` picks
    ``max(30, ln(1/abs_tol)/2 + 5) / D`` so that the neglected tail is far
    below both tolerances. Its bound is added to the error estimate.
    """

    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    max_subdivisions: int = 400
    inner_max_subdivisions: int = 100
    tail_cut: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be > 0")
        if self.max_subdivisions < 1 or self.inner_max_subdivisions < 1:
            raise ValueError("subdivision limits must be >= 1")
        if self.tail_cut is not None and not self.tail_cut > 0:
            raise ValueError("tail_cut must be > 0")

    def tail_product(self, gap: float) -> float:
        """``tail_cut * D``."""
        if self.tail_cut is not None:
            return self.tail_cut * gap
        return max(30.0, 0.5 * math.log(1 / self.abs_tol) + 5.0)


class Sign(str, Enum):
    ATTRACTIVE = "attractive"
    REPULSIVE = "repulsive"
    INDETERMINATE = "indeterminate"

    @classmethod
    def classify(cls, value: float, error: float, converged: bool = True) -> "Sign":
        if not converged or abs(value) <= error:
            return cls.INDETERMINATE
        return cls.ATTRACTIVE if value > 0 else cls.REPULSIVE


@dataclass(frozen=True)
class ForceResult:
    value: float
    error_estimate: float
    sign: Sign
    evaluations: int
    converged: bool = True

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "sign": self.sign.value,
            "evaluations": self.evaluations,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForceResult":
        return cls(float(d["value"]), float(d["error_estimate"]), Sign(d["sign"]),
                   int(d["evaluations"]), bool(d["converged"]))


@dataclass(frozen=True)
class EnergyResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool = True


def _products(cfg: CavityConfig, x, u, k3):
    r1s, r1p = diagonal_coefficients(cfg.medium1, x, u, k3)
    r2s, r2p = diagonal_coefficients(cfg.medium2, x, u, k3)
    return r1s * r2s, r1p * r2p


def force_integrand(cfg: CavityConfig, x, u):
    """``u k3 Tr[R e / (1 - R e)]`` at modes ``(x, u)``; integrate over the quarter plane."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    x, u = np.broadcast_arrays(x, u)
    if cfg.needs_open_x and np.any(x <= 0):
        raise ValueError("x must be > 0 when a medium has a Drude term")
    k3 = np.sqrt(x * x + u * u)
    e = np.exp(-2 * k3 * cfg.gap)
    total = 0.0
    for prod in _products(cfg, x, u, k3):
        denom = 1.0 - prod * e
        if np.any(denom <= 0):
            raise ZeroDivisionError("|r1 r2| >= 1: reflection products violate passivity")
        total = total + prod * e / denom
    return u * k3 * total


def energy_integrand(cfg: CavityConfig, x, u):
    """``1/2 u sum_p ln(1 - R_p e^{-2 k3 D})``."""
    x, u = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(u, dtype=float))
    k3 = np.sqrt(x * x + u * u)
    e = np.exp(-2 * k3 * cfg.gap)
    total = 0.0
    for prod in _products(cfg, x, u, k3):
        total = total + np.log1p(-prod * e)
    return 0.5 * u * total


# -- polar scheme -----------------------------------------------------------

def _polar_kernel(cfg: CavityConfig, s, phi, kind):
    # s and phi broadcast to the same shape; returns the integrand in (s, phi)
    two_d = 2.0 * cfg.gap
    rho = -np.log(s) / two_d
    sin_phi = np.sin(phi)
    x = rho * np.cos(phi)
    u = rho * sin_phi
    shape = x.shape
    rs, rp = _products(cfg, x.ravel(), u.ravel(), np.broadcast_to(rho, shape).ravel())
    s_flat = np.broadcast_to(s, shape).ravel()
    if kind == "force":
        acc = rs / (1.0 - rs * s_flat) + rp / (1.0 - rp * s_flat)
        return (rho**3 * sin_phi * acc.reshape(shape)) / two_d
    acc = (np.log1p(-rs * s_flat) + np.log1p(-rp * s_flat)) / s_flat
    return 0.5 * rho**2 * sin_phi * acc.reshape(shape) / two_d


def _tail_bound(cfg: CavityConfig, rho_max: float, kind: str) -> float:
    z = 2 * rho_max * cfg.gap
    s_min = math.exp(-z)
    if kind == "force":
        # int_{rho_max}^inf 2 rho^3 e / (1 - e)
        gamma = math.exp(-z) * (z**3 + 3 * z**2 + 6 * z + 6)
        return 2 * gamma / (1 - s_min) / (2 * cfg.gap) ** 4
    # 1/2 int rho^2 * 2 |ln(1 - e)|  <=  int rho^2 e / (1 - e)
    gamma = math.exp(-z) * (z**2 + 2 * z + 2)
    return gamma / (1 - s_min) / (2 * cfg.gap) ** 3


def _s_breakpoints(tail_product):
    return [math.exp(-2 * t) for t in (16, 8, 4, 2, 1, 0.5) if t < tail_product]


def _polar_integral(cfg: CavityConfig, q: QuadratureSettings, kind: str):
    tail_product = q.tail_product(cfg.gap)
    s_min = math.exp(-2 * tail_product)
    inner_rel = 0.1 * q.rel_tol
    counter = {"inner": 0}

    def outer(s):
        def inner(rows, phi):
            return _polar_kernel(cfg, s[rows][:, None], phi, kind)

        res = gk.integrate_batch(inner, 0.0, 0.5 * math.pi, s.size,
                                 rel_tol=inner_rel, abs_tol=0.1 * q.abs_tol,
                                 limit=q.inner_max_subdivisions)
        counter["inner"] += res.evaluations
        counter.setdefault("unconverged", 0)
        counter["unconverged"] += int((~res.converged).sum())
        return res.values, res.errors

    res = gk.integrate(outer, s_min, 1.0, rel_tol=q.rel_tol, abs_tol=q.abs_tol,
                       limit=q.max_subdivisions, breakpoints=_s_breakpoints(tail_product),
                       relative_to="l1")
    error = res.error + _tail_bound(cfg, tail_product / cfg.gap, kind)
    converged = res.converged and counter.get("unconverged", 0) == 0
    return res.value, error, counter["inner"], converged


def force_per_area(cfg: CavityConfig, q: QuadratureSettings | None = None) -> ForceResult:
    """Normalized Casimir force; positive is attraction."""
    q = q or QuadratureSettings()
    value, error, neval, converged = _polar_integral(cfg, q, "force")
    return ForceResult(value, error, Sign.classify(value, error, converged), neval, converged)


def energy_per_area(cfg: CavityConfig, q: QuadratureSettings | None = None) -> EnergyResult:
    """Normalized Casimir interaction energy (negative for binding)."""
    q = q or QuadratureSettings()
    value, error, neval, converged = _polar_integral(cfg, q, "energy")
    return EnergyResult(value, error, neval, converged)


# -- spectral decomposition ---------------------------------------------------

@dataclass(frozen=True)
class SpectralRow:
    x: float
    density: float
    density_error: float
    cumulative: float


def _frequency_density(cfg: CavityConfig, q: QuadratureSettings, x):
    """``int_0^inf du u k3 Tr[...]`` at each imaginary frequency in ``x``."""
    x = np.asarray(x, dtype=float)
    two_d = 2.0 * cfg.gap
    tail_product = q.tail_product(cfg.gap)
    t_min = math.exp(-2 * tail_product)

    def inner(rows, t):
        xr = x[rows][:, None]
        delta = -np.log(t) / two_d          # k3 - x
        k3 = xr + delta
        u = np.sqrt(delta * (delta + 2 * xr))
        shape = k3.shape
        xb = np.broadcast_to(xr, shape)
        rs, rp = _products(cfg, xb.ravel(), u.ravel(), k3.ravel())
        qf = (t * np.exp(-two_d * xr)).ravel()
        acc = rs / (1.0 - rs * qf) + rp / (1.0 - rp * qf)
        return k3**2 * np.exp(-two_d * xr) * acc.reshape(shape) / two_d

    res = gk.integrate_batch(inner, t_min, 1.0, x.size, rel_tol=0.1 * q.rel_tol,
                             abs_tol=0.1 * q.abs_tol,
                             limit=q.inner_max_subdivisions,
                             breakpoints=_s_breakpoints(tail_product))
    return res


def spectral_profile(cfg: CavityConfig, q: QuadratureSettings | None, x_grid) -> list[SpectralRow]:
    """Frequency-resolved force and its cumulative fraction.

    Returns one row per ``x`` in ``x_grid`` and a final row at ``x = inf``.
    ``density`` is the inner integral over ``u`` at that ``x``; ``cumulative``
    is ``int_0^x density / f`` where ``f`` comes from :func:`force_per_area`,
    an independent (polar) evaluation, so the last row checks normalization.
    """
    q = q or QuadratureSettings()
    grid = [float(v) for v in x_grid]
    if not grid or any(v <= 0 for v in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("x_grid must be non-empty, positive and strictly increasing")

    total = force_per_area(cfg, q).value

    def density(xs):
        r = _frequency_density(cfg, q, xs)
        return r.values, r.errors

    pieces = []
    edges = [0.0, *grid]
    for a, b in zip(edges[:-1], edges[1:]):
        pieces.append(gk.integrate(density, a, b, rel_tol=q.rel_tol, abs_tol=q.abs_tol,
                                   limit=q.max_subdivisions).value)
    # (x_last, inf) through x = x_last - ln(v) / 2D
    two_d = 2.0 * cfg.gap
    x_last = grid[-1]

    def mapped(v):
        vals, errs = density(x_last - np.log(v) / two_d)
        return vals / (two_d * v), errs / (two_d * v)

    tail_product = q.tail_product(cfg.gap)
    pieces.append(gk.integrate(mapped, math.exp(-2 * tail_product), 1.0, rel_tol=q.rel_tol,
                               abs_tol=q.abs_tol, limit=q.max_subdivisions,
                               breakpoints=_s_breakpoints(tail_product)).value)

    dens = density(np.array(grid))
    cumulative = np.cumsum(pieces) / total
    rows = [SpectralRow(xv, float(dv), float(ev), float(cv))
            for xv, dv, ev, cv in zip(grid, dens[0], dens[1], cumulative[:-1])]
    rows.append(SpectralRow(math.inf, 0.0, 0.0, float(cumulative[-1])))
    return rows
