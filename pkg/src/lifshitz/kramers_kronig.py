"""Imaginary-axis response from tabulated real-frequency absorption.

Evaluates

    response(i x) = 1 + (2/pi) * int_0^inf  w Im(w) / (w^2 + x^2) dw

for a table of ``(w, Im(w))`` samples. The numerator ``g(w) = w Im(w)`` is
interpolated linearly between samples, and each linear piece is integrated in
closed form, so the only approximation inside the table range is the
interpolation itself.

Outside the table:

* low side, ``"zero"``: no absorption below the first sample.
* low side, ``"drude"``: a Drude tail ``g = A / (w^2 + g_D^2)`` fitted through
  the two lowest samples.
* low side, ``"auto"``: ``"drude"`` when ``g`` increases towards ``w -> 0``
  (metallic data), otherwise ``"zero"``.
* high side, ``"power-law"``: ``Im ~ w^-3`` continued from the last sample.
* high side, ``"zero"``: no absorption above the last sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from .dispersion import ModelDomainError

__all__ = [
    "IllConditionedTableError",
    "Tabulated",
    "KKBreakdown",
    "kk_to_imaginary_axis",
    "kk_breakdown",
    "load_table",
]

LOW_TAILS = ("auto", "zero", "drude")
HIGH_TAILS = ("power-law", "zero")


class IllConditionedTableError(ValueError):
    """More than half of the transform comes from the extrapolated tails."""


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Tabulated absorption ``Im eps(w)`` or ``Im mu(w)`` at real frequencies."""

    omega: np.ndarray
    im_response: np.ndarray
    low_tail: str = "auto"
    high_tail: str = "power-law"
    source: str | None = None
    _drude_fit: tuple | None = field(init=False, repr=False, default=None)

    def __post_init__(self):
        w = np.array(self.omega, dtype=float)
        im = np.array(self.im_response, dtype=float)
        if w.ndim != 1 or w.shape != im.shape or w.size == 0:
            raise ValueError("omega and im_response must be non-empty 1-D arrays of equal length")
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(im)):
            raise ValueError("table contains non-finite values")
        if np.any(w <= 0):
            raise ValueError("table frequencies must be > 0")
        if np.any(np.diff(w) <= 0):
            i = int(np.argmax(np.diff(w) <= 0))
            raise ValueError(f"table frequencies must be strictly increasing (row {i + 1})")
        if np.any(im < 0):
            raise ValueError("absorption must be >= 0 for a passive medium")
        if self.low_tail not in LOW_TAILS:
            raise ValueError(f"low_tail must be one of {LOW_TAILS}, got {self.low_tail!r}")
        if self.high_tail not in HIGH_TAILS:
            raise ValueError(f"high_tail must be one of {HIGH_TAILS}, got {self.high_tail!r}")
        w.flags.writeable = False
        im.flags.writeable = False
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "im_response", im)
        object.__setattr__(self, "_drude_fit", _fit_drude_tail(w, im, self.low_tail))

    def __eq__(self, other):
        if not isinstance(other, Tabulated):
            return NotImplemented
        return (np.array_equal(self.omega, other.omega)
                and np.array_equal(self.im_response, other.im_response)
                and self.low_tail == other.low_tail
                and self.high_tail == other.high_tail
                and self.source == other.source)

    __hash__ = None

    @property
    def uses_drude_tail(self) -> bool:
        return self._drude_fit is not None

    @property
    def resolved_low_tail(self) -> str:
        return "drude" if self.uses_drude_tail else "zero"

    def __call__(self, x):
        return kk_to_imaginary_axis(self, x, strict=False)


def _fit_drude_tail(w, im, policy):
    if policy == "zero" or w.size < 2:
        if policy == "drude":
            raise ValueError("a Drude low-frequency tail needs at least two samples")
        return None
    g1, g2 = w[0] * im[0], w[1] * im[1]
    metallic = g1 > g2
    if policy == "auto" and not metallic:
        return None
    if not metallic:
        raise ValueError("Drude tail requested but w*Im(w) does not increase towards w -> 0")
    gamma2 = (g2 * w[1] ** 2 - g1 * w[0] ** 2) / (g1 - g2)
    if not gamma2 > 0:
        if policy == "auto":
            return None
        raise ValueError("lowest two samples do not fit a damped Drude tail")
    amplitude = g1 * (w[0] ** 2 + gamma2)
    return amplitude, math.sqrt(gamma2)


@dataclass(frozen=True)
class KKBreakdown:
    """Contributions (already multiplied by 2/pi) to ``response - 1``."""

    body: np.ndarray
    low_tail: np.ndarray
    high_tail: np.ndarray

    @property
    def response(self):
        return 1.0 + self.body + self.low_tail + self.high_tail

    @property
    def tail_fraction(self):
        total = self.body + self.low_tail + self.high_tail
        tails = self.low_tail + self.high_tail
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(total > 0, tails / total, 0.0)


def _body(w, g, x, chunk=256):
    # exact integral of the piecewise-linear g(w) against 1 / (w^2 + x^2)
    w0, w1 = w[:-1], w[1:]
    g0, g1 = g[:-1], g[1:]
    slope = (g1 - g0) / (w1 - w0)
    intercept = g0 - slope * w0
    out = np.empty(x.size)
    for start in range(0, x.size, chunk):
        xs = x[start:start + chunk, None]
        x2 = xs * xs
        datan = np.arctan(xs * (w1 - w0) / (x2 + w0 * w1))
        dlog = np.log1p((w1 * w1 - w0 * w0) / (w0 * w0 + x2))
        out[start:start + chunk] = (intercept * datan / xs + 0.5 * slope * dlog).sum(axis=1)
    return out


def _power_law_tail(w_last, im_last, x):
    # int_{w_last}^inf w * im_last (w_last/w)^3 / (w^2 + x^2) dw
    y = x / w_last
    small = y < 1e-2
    h = np.empty_like(y)
    ys = y[small]
    h[small] = 1 / 3 - ys**2 / 5 + ys**4 / 7 - ys**6 / 9
    yl = y[~small]
    h[~small] = (1 - np.arctan(yl) / yl) / yl**2
    return im_last * h


def _drude_tail(fit, w_first, x):
    amplitude, gamma = fit
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        if abs(xi - gamma) > 1e-6 * (xi + gamma):
            out[i] = amplitude / (xi * xi - gamma * gamma) * (
                math.atan(w_first / gamma) / gamma - math.atan(w_first / xi) / xi)
        else:
            out[i] = quad(lambda w: amplitude / ((w * w + gamma * gamma) * (w * w + xi * xi)),
                          0.0, w_first, epsabs=0, epsrel=1e-12)[0]
    return out


def kk_breakdown(t: Tabulated, x) -> KKBreakdown:
    """Split the transform at ``x`` into table body and tail contributions."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise ModelDomainError("Kramers-Kronig evaluation requires x > 0")
    w, im = t.omega, t.im_response
    scale = 2.0 / math.pi
    body = _body(w, w * im, x) if w.size > 1 else np.zeros_like(x)
    low = np.zeros_like(x)
    if t._drude_fit is not None:
        low = _drude_tail(t._drude_fit, w[0], x)
    high = np.zeros_like(x)
    if t.high_tail == "power-law" and im[-1] > 0:
        high = _power_law_tail(w[-1], im[-1], x)
    return KKBreakdown(scale * body, scale * low, scale * high)


def kk_to_imaginary_axis(t: Tabulated, x, strict: bool = True):
    """Response at imaginary frequency ``x`` from tabulated absorption.

    With ``strict`` set, raises :class:`IllConditionedTableError` when the
    extrapolated tails carry more than half of ``response - 1`` at any ``x``.
    """
    scalar = np.ndim(x) == 0
    b = kk_breakdown(t, x)
    if strict and np.any(b.tail_fraction > 0.5):
        i = int(np.argmax(b.tail_fraction))
        raise IllConditionedTableError(
            f"{100 * b.tail_fraction[i]:.1f}% of the transform at x={np.atleast_1d(x)[i]:g} "
            "comes from extrapolated tails; extend the table")
    r = b.response
    return float(r[0]) if scalar else r


TABLE_COLUMNS = ("omega_normalized", "im_response")


def load_table(path, low_tail: str = "auto", high_tail: str = "power-law") -> Tabulated:
    """Read a two-column CSV ``omega_normalized, im_response``.

    '#' starts a comment. A first row naming the two columns is allowed.
    """
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    if lines and [c.strip() for c in lines[0].split(",")] == list(TABLE_COLUMNS):
        lines = lines[1:]
    data = np.loadtxt(lines, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected 2 columns, found {data.shape[1]}")
    return Tabulated(data[:, 0], data[:, 1], low_tail=low_tail, high_tail=high_tail,
                     source=str(path))
