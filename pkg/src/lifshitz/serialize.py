"""Plain-dict descriptions of models, media and settings.

The dotted keys (``drude.plasma_freq``) are the same names accepted by the
configuration file and by sweep parameter paths.
"""

from __future__ import annotations

import dataclasses
import math

from .dispersion import Composite, Drude, IdealConductor, IdealPermeable, Lorentz, Srr, Vacuum
from .kramers_kronig import Tabulated
from .reflection import Isotropic, Uniaxial

MODEL_NAMES = {
    Vacuum: "vacuum",
    Drude: "drude",
    Lorentz: "lorentz",
    Composite: "composite",
    Srr: "srr",
    Tabulated: "tabulated",
    IdealConductor: "ideal-conductor",
    IdealPermeable: "ideal-permeable",
}

MEDIUM_SLOTS = {
    "isotropic": ("eps", "mu"),
    "uniaxial": ("eps_par", "eps_perp", "mu_par", "mu_perp"),
    "ideal-conductor": (),
    "ideal-permeable": (),
}


def model_to_dict(model) -> dict:
    out = {"model": MODEL_NAMES[type(model)]}
    if isinstance(model, Composite):
        out["filling_factor"] = model.filling_factor
        for name, sub in (("drude", model.drude), ("lorentz", model.lorentz)):
            for f in dataclasses.fields(sub):
                out[f"{name}.{f.name}"] = getattr(sub, f.name)
    elif isinstance(model, Tabulated):
        out["file"] = model.source
        out["low_tail"] = model.low_tail
        out["high_tail"] = model.high_tail
        out["resolved_low_tail"] = model.resolved_low_tail
    else:
        for f in dataclasses.fields(model):
            out[f.name] = getattr(model, f.name)
    return out


def medium_kind(medium) -> str:
    if isinstance(medium, Isotropic):
        return "isotropic"
    if isinstance(medium, Uniaxial):
        return "uniaxial"
    return MODEL_NAMES[type(medium)]


def medium_to_dict(medium) -> dict:
    kind = medium_kind(medium)
    out = {"kind": kind}
    for slot in MEDIUM_SLOTS[kind]:
        out[slot] = model_to_dict(getattr(medium, slot))
    return out


def cavity_to_dict(cfg) -> dict:
    return {
        "medium1": medium_to_dict(cfg.medium1),
        "medium2": medium_to_dict(cfg.medium2),
        "gap": cfg.gap,
        "d_over_lambda": cfg.d_over_lambda,
        "omega_ref": cfg.scale.omega_ref,
        "lambda_ref": cfg.scale.lambda_ref,
    }


def settings_to_dict(q) -> dict:
    return dataclasses.asdict(q)


def jsonable(value):
    """Recursively convert tuples to lists and non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if hasattr(value, "item") and callable(value.item):
        return jsonable(value.item())
    return value
