"""Parameter sweeps, sign-crossing search and the metamaterial studies.

Reference parameters (in units of the silver plasma frequency):

* metal half-space: Drude, plasma 0.96, damping 0.004
* metamaterial: Drude background (plasma 1, damping 0.006) with filling
  factor ``f``; electric resonance strength 0.04, frequency 0.1, damping
  0.005; magnetic resonance strength 0.1, frequency 0.1, damping 0.005.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import __version__
from .dispersion import Composite, Drude, Lorentz, Srr, Vacuum
from .quadrature import CavityConfig, ForceResult, QuadratureSettings, Sign, force_per_area
from .reflection import Isotropic, Uniaxial
from .serialize import cavity_to_dict, settings_to_dict

__all__ = [
    "METAL", "BACKGROUND_DRUDE", "ELECTRIC", "MAGNETIC",
    "gold", "metamaterial", "fig1_cavity", "uniaxial_metamaterial",
    "SweepSpec", "SweepRow", "SweepResult", "run_sweep", "set_parameter",
    "CrossingResult", "bisect_sign", "find_sign_crossing",
    "StudyResult", "fig1_study", "dissipation_study", "srr_study",
    "anisotropy_study", "fig2a_study",
]

METAL = Drude(plasma_freq=0.96, damping=0.004)
BACKGROUND_DRUDE = Drude(plasma_freq=1.0, damping=0.006)
ELECTRIC = Lorentz(oscillator_strength=0.04, resonance_freq=0.1, damping=0.005)
MAGNETIC = Lorentz(oscillator_strength=0.1, resonance_freq=0.1, damping=0.005)
SRR_GEOMETRY = 0.25


def gold() -> Isotropic:
    return Isotropic(METAL, Vacuum())


def metamaterial(filling_factor: float = 0.0, *, electric: Lorentz = ELECTRIC,
                 magnetic=MAGNETIC, drude: Drude = BACKGROUND_DRUDE) -> Isotropic:
    return Isotropic(Composite(filling_factor, drude, electric), magnetic)


def fig1_cavity(filling_factor: float, d_over_lambda: float, **kwargs) -> CavityConfig:
    return CavityConfig.from_d_over_lambda(gold(), metamaterial(filling_factor, **kwargs),
                                           d_over_lambda)


def _scaled(osc: Lorentz, ratio: float) -> Lorentz:
    return dataclasses.replace(osc, oscillator_strength=osc.oscillator_strength * ratio)


def uniaxial_metamaterial(electric_ratio: float = 1.0, magnetic_ratio: float = 1.0, *,
                          f_par: float = 0.0, f_perp: float = 0.0) -> Uniaxial:
    """Uniaxial metamaterial with in-plane strengths scaled relative to the normal ones.

    The normal (perp) components keep the reference oscillator strengths;
    resonance frequencies and dampings are never changed.
    """
    return Uniaxial(
        eps_par=Composite(f_par, BACKGROUND_DRUDE, _scaled(ELECTRIC, electric_ratio)),
        eps_perp=Composite(f_perp, BACKGROUND_DRUDE, ELECTRIC),
        mu_par=_scaled(MAGNETIC, magnetic_ratio),
        mu_perp=MAGNETIC,
    )


# -- sweeps ------------------------------------------------------------------

def _replace_path(obj, parts: Sequence[str], value):
    head, rest = parts[0], parts[1:]
    if not dataclasses.is_dataclass(obj) or head not in {f.name for f in dataclasses.fields(obj)}:
        raise KeyError(head)
    if not rest:
        current = getattr(obj, head)
        if dataclasses.is_dataclass(current):
            raise KeyError(head)
        return dataclasses.replace(obj, **{head: value})
    return dataclasses.replace(obj, **{head: _replace_path(getattr(obj, head), rest, value)})


def _resolve(template, path: str):
    obj = template
    for part in path.split("."):
        if not dataclasses.is_dataclass(obj) or part not in {f.name for f in dataclasses.fields(obj)}:
            raise ValueError(f"parameter path {path!r} does not resolve (at {part!r})")
        obj = getattr(obj, part)
    if dataclasses.is_dataclass(obj) or not isinstance(obj, (int, float)):
        raise ValueError(f"parameter path {path!r} does not name a scalar")
    return obj


def set_parameter(template: CavityConfig, path: str, value: float) -> CavityConfig:
    """Copy of ``template`` with the scalar at ``path`` replaced.

    ``path`` is ``gap`` (in units of c/omega_ref), ``d_over_lambda``, or a
    dotted field path such as ``medium2.eps.filling_factor`` or
    ``medium2.mu.damping``.
    """
    if path == "d_over_lambda":
        return dataclasses.replace(template, gap=2 * math.pi * value)
    try:
        return _replace_path(template, path.split("."), value)
    except KeyError as exc:
        raise ValueError(f"parameter path {path!r} does not resolve (at {exc.args[0]!r})") from None


@dataclass(frozen=True)
class SweepSpec:
    parameter_path: str
    values: Sequence[float]
    template: CavityConfig
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("sweep needs at least one value")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("sweep values must be finite")
        if self.parameter_path != "d_over_lambda":
            _resolve(self.template, self.parameter_path)


@dataclass(frozen=True)
class SweepRow:
    parameter: float
    result: ForceResult
    message: str | None = None


@dataclass
class SweepResult:
    parameter_path: str
    rows: list[SweepRow]
    metadata: dict

    def to_dict(self) -> dict:
        return {
            "parameter_path": self.parameter_path,
            "rows": [{"parameter": r.parameter, **r.result.to_dict(), "message": r.message}
                     for r in self.rows],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepResult":
        rows = [SweepRow(float(r["parameter"]), ForceResult.from_dict(r), r.get("message"))
                for r in d["rows"]]
        return cls(d["parameter_path"], rows, d["metadata"])


def _failed() -> ForceResult:
    return ForceResult(math.nan, math.inf, Sign.INDETERMINATE, 0, False)


def _evaluate_point(spec: SweepSpec, value: float) -> SweepRow:
    try:
        cfg = set_parameter(spec.template, spec.parameter_path, value)
        return SweepRow(value, force_per_area(cfg, spec.quadrature))
    except (ValueError, ArithmeticError, AssertionError) as exc:
        return SweepRow(value, _failed(), f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Force at every value of ``spec.parameter_path``; rows keep the input order.

    Points that fail (invalid parameter, quadrature trouble) become flagged
    rows with ``value = nan`` rather than aborting the sweep.
    """
    values = [float(v) for v in spec.values]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: _evaluate_point(spec, v), values))
    else:
        rows = [_evaluate_point(spec, v) for v in values]
    metadata = {
        "tool": "lifshitz",
        "version": __version__,
        "parameter_path": spec.parameter_path,
        "template": cavity_to_dict(spec.template),
        "quadrature": settings_to_dict(spec.quadrature),
    }
    return SweepResult(spec.parameter_path, rows, metadata)


# -- sign crossings ------------------------------------------------------------

@dataclass(frozen=True)
class CrossingResult:
    """Outcome of a crossing search.

    ``status`` is ``"found"``, ``"none"`` (same sign at both ends) or
    ``"resolution-limited"`` (signs could not be resolved).
    """

    status: str
    gap: float | None
    bracket: tuple[float, float]
    force: ForceResult | None
    evaluations: int
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def d_over_lambda(self) -> float | None:
        return None if self.gap is None else self.gap / (2 * math.pi)


def bisect_sign(evaluate: Callable[[float], ForceResult], lo: float, hi: float, *,
                xtol: float = 1e-4, abs_tol: float = 0.0, max_iter: int = 80) -> CrossingResult:
    """Sign-based bisection on ``evaluate``, which returns a :class:`ForceResult`.

    Stops once the bracket is narrower than ``xtol * mid`` and the midpoint
    force is within ``max(abs_tol, error_estimate)`` of zero. An
    indeterminate midpoint shrinks the bracket from both ends via the
    quarter points.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got ({lo}, {hi})")
    count = 0

    def ev(d):
        nonlocal count
        count += 1
        return evaluate(d)

    f_lo, f_hi = ev(lo), ev(hi)
    if Sign.INDETERMINATE in (f_lo.sign, f_hi.sign):
        return CrossingResult("resolution-limited", None, (lo, hi), None, count)
    if f_lo.sign == f_hi.sign:
        return CrossingResult("none", None, (lo, hi), None, count)
    s_lo = f_lo.sign

    def small(r):
        return abs(r.value) <= max(abs_tol, r.error_estimate)

    def update(d, r):
        nonlocal lo, hi
        if r.sign == s_lo:
            lo = d
        else:
            hi = d

    mid, f_mid = None, None
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = ev(mid)
        if hi - lo < xtol * mid and small(f_mid):
            return CrossingResult("found", mid, (lo, hi), f_mid, count)
        if f_mid.sign is not Sign.INDETERMINATE:
            update(mid, f_mid)
            continue
        moved = False
        for probe in (0.5 * (lo + mid), 0.5 * (mid + hi)):
            if not lo < probe < hi:
                continue
            r = ev(probe)
            if r.sign is not Sign.INDETERMINATE:
                update(probe, r)
                moved = True
        if not moved:
            return CrossingResult("resolution-limited", mid, (lo, hi), f_mid, count)
    return CrossingResult("resolution-limited", mid, (lo, hi), f_mid, count)


def find_sign_crossing(template: CavityConfig, d_lo: float, d_hi: float,
                       q: QuadratureSettings | None = None, xtol: float = 1e-4) -> CrossingResult:
    """Gap ``D*`` in ``[d_lo, d_hi]`` (units of c/omega_ref) where the force changes sign."""
    q = q or QuadratureSettings()
    return bisect_sign(lambda d: force_per_area(dataclasses.replace(template, gap=d), q),
                       d_lo, d_hi, xtol=xtol, abs_tol=q.abs_tol)


# -- studies -----------------------------------------------------------------

@dataclass
class StudyResult:
    """Rows of named scalars and :class:`ForceResult` columns."""

    name: str
    rows: list[dict]
    metadata: dict

    def column(self, key: str) -> list:
        return [row[key] for row in self.rows]


def _map(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _meta(name, q, **extra):
    return {"tool": "lifshitz", "version": __version__, "study": name,
            "quadrature": settings_to_dict(q), **extra}


def fig1_study(filling_factors: Sequence[float], d_over_lambda: Sequence[float],
               q: QuadratureSettings | None = None, workers: int = 1) -> StudyResult:
    """Force between the metal and the metamaterial versus gap, per filling factor."""
    q = q or QuadratureSettings()
    points = [(f, d) for f in filling_factors for d in d_over_lambda]
    forces = _map(lambda p: force_per_area(fig1_cavity(*p), q), points, workers)
    rows = [{"filling_factor": f, "d_over_lambda": d, "force": r}
            for (f, d), r in zip(points, forces)]
    return StudyResult("fig1", rows, _meta("fig1", q, template=cavity_to_dict(fig1_cavity(0.0, 1.0))))


def dissipation_study(ratios: Sequence[float], d_over_lambda: float = 1.0,
                      filling_factor: float = 1e-4, q: QuadratureSettings | None = None,
                      workers: int = 1) -> StudyResult:
    """Force versus resonance damping, with ``gamma_e/W_e = gamma_m/W_m = ratio``."""
    q = q or QuadratureSettings()
    if any(not r > 0 for r in ratios):
        raise ValueError("damping ratios must be positive")

    def one(ratio):
        el = dataclasses.replace(ELECTRIC, damping=ratio * ELECTRIC.oscillator_strength)
        mag = dataclasses.replace(MAGNETIC, damping=ratio * MAGNETIC.oscillator_strength)
        return force_per_area(fig1_cavity(filling_factor, d_over_lambda, electric=el, magnetic=mag), q)

    forces = _map(one, list(ratios), workers)
    rows = [{"ratio": r, "force": f} for r, f in zip(ratios, forces)]
    return StudyResult("dissipation", rows, _meta(
        "dissipation", q, d_over_lambda=d_over_lambda, filling_factor=filling_factor,
        template=cavity_to_dict(fig1_cavity(filling_factor, d_over_lambda))))


def srr_study(d_over_lambda: Sequence[float], geometry_factor: float = SRR_GEOMETRY,
              filling_factor: float = 1e-4, q: QuadratureSettings | None = None,
              workers: int = 1) -> StudyResult:
    """Resonant versus split-ring permeability at each gap."""
    q = q or QuadratureSettings()
    srr = Srr(geometry_factor, MAGNETIC.resonance_freq, MAGNETIC.damping)

    def one(d):
        return (force_per_area(fig1_cavity(filling_factor, d), q),
                force_per_area(fig1_cavity(filling_factor, d, magnetic=srr), q))

    pairs = _map(one, list(d_over_lambda), workers)
    rows = [{"d_over_lambda": d, "force_res": a, "force_srr": b}
            for d, (a, b) in zip(d_over_lambda, pairs)]
    return StudyResult("fig3", rows, _meta(
        "fig3", q, geometry_factor=geometry_factor, filling_factor=filling_factor,
        template=cavity_to_dict(fig1_cavity(filling_factor, 1.0, magnetic=srr))))


def anisotropy_study(electric_ratios: Sequence[float], magnetic_ratios: Sequence[float],
                     d_over_lambda: float = 1.0, filling_factor: float = 0.0,
                     q: QuadratureSettings | None = None, workers: int = 1) -> StudyResult:
    """Force surface over in-plane/normal oscillator-strength ratios."""
    q = q or QuadratureSettings()
    if any(not r > 0 for r in (*electric_ratios, *magnetic_ratios)):
        raise ValueError("anisotropy ratios must be positive")
    points = [(e, m) for e in electric_ratios for m in magnetic_ratios]

    def one(p):
        medium = uniaxial_metamaterial(p[0], p[1], f_par=filling_factor, f_perp=filling_factor)
        return force_per_area(CavityConfig.from_d_over_lambda(gold(), medium, d_over_lambda), q)

    forces = _map(one, points, workers)
    rows = [{"electric_ratio": e, "magnetic_ratio": m, "force": f}
            for (e, m), f in zip(points, forces)]
    return StudyResult("fig2b", rows, _meta("fig2b", q, d_over_lambda=d_over_lambda,
                                            filling_factor=filling_factor))


def fig2a_study(f_par: Sequence[float], f_perp: Sequence[float], d_over_lambda: float = 1.0,
                q: QuadratureSettings | None = None, workers: int = 1) -> StudyResult:
    """Force over per-axis filling factors with an isotropic resonant permeability."""
    q = q or QuadratureSettings()
    points = [(a, b) for a in f_par for b in f_perp]

    def one(p):
        medium = uniaxial_metamaterial(f_par=p[0], f_perp=p[1])
        return force_per_area(CavityConfig.from_d_over_lambda(gold(), medium, d_over_lambda), q)

    forces = _map(one, points, workers)
    rows = [{"f_par": a, "f_perp": b, "force": f} for (a, b), f in zip(points, forces)]
    return StudyResult("fig2a", rows, _meta("fig2a", q, d_over_lambda=d_over_lambda))
