"""Run configuration files.

Grammar (UTF-8, line oriented)::

    # comment                      (also after a value, preceded by whitespace)
    [section]                      section header
    key = value                    entry; keys may contain dots

Sections and their keys:

``[cavity]``
    ``d_over_lambda`` (gap d/Lambda), ``omega_ref`` (rad/s, default 1.37e16).
``[medium1]``, ``[medium2]``
    ``kind`` = isotropic | uniaxial | ideal-conductor | ideal-permeable.
``[mediumN.SLOT]``
    one per response slot: ``eps``/``mu`` (isotropic) or ``eps_par``,
    ``eps_perp``, ``mu_par``, ``mu_perp`` (uniaxial). ``model`` selects
    vacuum | drude | lorentz | composite | srr | tabulated; the remaining keys
    are the model's fields (see ``MODEL_KEYS``).
``[quadrature]``
    ``rel_tol``, ``abs_tol``, ``max_subdivisions``, ``inner_max_subdivisions``,
    ``tail_cut`` (a number, or ``auto``).
``[sweep]``
    ``parameter`` (``d_over_lambda``, ``gap`` or a dotted path such as
    ``medium2.eps.filling_factor``) and ``values`` (comma separated).
``[crossing]``
    ``d_lo``, ``d_hi`` (both d/Lambda), ``xtol``.
``[study]``
    ``name`` = fig1 | fig2a | fig2b | fig3 | dissipation, plus that study's
    grid keys (see ``STUDY_KEYS``).
``[output]``
    ``format`` = csv | json, ``timestamp`` = true | false.

Unknown sections or keys are errors.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .dispersion import (Composite, Drude, FrequencyScale, IdealConductor, IdealPermeable,
                         Lorentz, Srr, Vacuum)
from .kramers_kronig import HIGH_TAILS, LOW_TAILS, load_table
from .quadrature import SILVER_PLASMA_FREQUENCY, CavityConfig, QuadratureSettings
from .reflection import Isotropic, Uniaxial
from .serialize import MEDIUM_SLOTS, medium_kind

__all__ = [
    "ConfigError", "CavitySection", "SweepSection", "CrossingSection", "StudySection",
    "OutputSection", "RunConfig", "parse_config", "load_config", "dump_config",
    "MODEL_KEYS", "STUDY_KEYS", "STUDY_DEFAULTS",
]

MODEL_KEYS = {
    "vacuum": (),
    "drude": ("plasma_freq", "damping"),
    "lorentz": ("oscillator_strength", "resonance_freq", "damping"),
    "composite": ("filling_factor", "drude.plasma_freq", "drude.damping",
                  "lorentz.oscillator_strength", "lorentz.resonance_freq", "lorentz.damping"),
    "srr": ("geometry_factor", "resonance_freq", "damping"),
    "tabulated": ("file", "low_tail", "high_tail"),
}
_OPTIONAL = {"damping", "drude.damping", "lorentz.damping", "low_tail", "high_tail"}

STUDY_KEYS = {
    "fig1": {"filling_factors": "list", "d_over_lambda": "list"},
    "fig2a": {"f_par": "list", "f_perp": "list", "d_over_lambda": "float"},
    "fig2b": {"electric_ratios": "list", "magnetic_ratios": "list",
              "d_over_lambda": "float", "filling_factor": "float"},
    "fig3": {"d_over_lambda": "list", "geometry_factor": "float", "filling_factor": "float"},
    "dissipation": {"ratios": "list", "d_over_lambda": "float", "filling_factor": "float"},
}

_LOG_GAPS = (0.1, 0.15, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0, 7.0, 10.0)
STUDY_DEFAULTS = {
    "fig1": {"filling_factors": (0.0, 1e-4, 1e-3, 1e-2, 0.1), "d_over_lambda": _LOG_GAPS},
    "fig2a": {"f_par": (0.0, 1e-4, 1e-3, 1e-2), "f_perp": (0.0, 1e-4, 1e-3, 1e-2),
              "d_over_lambda": 1.0},
    "fig2b": {"electric_ratios": (0.5, 1.0, 1.5, 2.0),
              "magnetic_ratios": (0.25, 0.5, 0.75, 1.0, 1.5, 2.0),
              "d_over_lambda": 1.0, "filling_factor": 0.0},
    "fig3": {"d_over_lambda": (0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0),
             "geometry_factor": 0.25, "filling_factor": 1e-4},
    "dissipation": {"ratios": (0.01, 0.1, 0.3, 1.0), "d_over_lambda": 1.0,
                    "filling_factor": 1e-4},
}


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class CavitySection:
    medium1: object
    medium2: object
    d_over_lambda: float
    omega_ref: float = SILVER_PLASMA_FREQUENCY

    def cavity(self) -> CavityConfig:
        return CavityConfig.from_d_over_lambda(self.medium1, self.medium2, self.d_over_lambda,
                                               FrequencyScale(self.omega_ref))


@dataclass(frozen=True)
class SweepSection:
    parameter: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class CrossingSection:
    d_lo: float
    d_hi: float
    xtol: float = 1e-4


@dataclass(frozen=True)
class StudySection:
    name: str
    grids: tuple[tuple[str, object], ...] = ()

    def resolved(self) -> dict:
        """Study parameters with defaults filled in."""
        out = dict(STUDY_DEFAULTS[self.name])
        out.update(dict(self.grids))
        return out


@dataclass(frozen=True)
class OutputSection:
    format: str = "csv"
    timestamp: bool = True


@dataclass(frozen=True)
class RunConfig:
    cavity: CavitySection | None = None
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    sweep: SweepSection | None = None
    crossing: CrossingSection | None = None
    study: StudySection | None = None
    output: OutputSection = field(default_factory=OutputSection)


# -- lexing --------------------------------------------------------------------

_SECTION = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\-]+)\s*\]\s*$")
_ENTRY = re.compile(r"^(\s*)([A-Za-z0-9_.\-]+)\s*=\s*(.*?)\s*$")


@dataclass
class _Entry:
    value: str
    line: int
    column: int
    key_column: int


@dataclass
class _Section:
    name: str
    line: int
    entries: dict = field(default_factory=dict)


def _strip_comment(raw: str) -> str:
    if raw.lstrip().startswith("#"):
        return ""
    m = re.search(r"\s#", raw)
    return raw[:m.start()] if m else raw


def _lex(text: str) -> dict:
    sections: dict[str, _Section] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        m = _SECTION.match(line)
        if m:
            name = m.group(1)
            if name in sections:
                raise ConfigError(f"duplicate section [{name}]", lineno, line.index("[") + 1)
            current = sections[name] = _Section(name, lineno)
            continue
        m = _ENTRY.match(line)
        if not m:
            raise ConfigError("expected '[section]' or 'key = value'", lineno,
                              len(line) - len(line.lstrip()) + 1)
        if current is None:
            raise ConfigError("entry outside of any section", lineno, len(m.group(1)) + 1)
        key, value = m.group(2), m.group(3)
        key_col = len(m.group(1)) + 1
        if key in current.entries:
            raise ConfigError(f"duplicate key {key!r} in [{current.name}]", lineno, key_col)
        current.entries[key] = _Entry(value, lineno, m.start(3) + 1, key_col)
    return sections


# -- value conversion ------------------------------------------------------------

def _float(entry: _Entry, key: str) -> float:
    try:
        v = float(entry.value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {entry.value!r}",
                          entry.line, entry.column) from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: value must be finite", entry.line, entry.column)
    return v


def _int(entry: _Entry, key: str) -> int:
    try:
        return int(entry.value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {entry.value!r}",
                          entry.line, entry.column) from None


def _floats(entry: _Entry, key: str) -> tuple[float, ...]:
    parts = [p.strip() for p in entry.value.split(",")]
    if not parts or any(p == "" for p in parts):
        raise ConfigError(f"{key}: expected a comma-separated list of numbers",
                          entry.line, entry.column)
    return tuple(_float(_Entry(p, entry.line, entry.column, entry.key_column), key) for p in parts)


def _bool(entry: _Entry, key: str) -> bool:
    v = entry.value.lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise ConfigError(f"{key}: expected true or false, got {entry.value!r}",
                      entry.line, entry.column)


def _check_keys(section: _Section, allowed, required=()):
    for key, entry in section.entries.items():
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in [{section.name}] "
                              f"(allowed: {', '.join(sorted(allowed))})",
                              entry.line, entry.key_column)
    for key in required:
        if key not in section.entries:
            raise ConfigError(f"[{section.name}] is missing required key {key!r}", section.line, 1)


def _validated(build, section: _Section):
    try:
        return build()
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(f"[{section.name}] invalid: {exc}", section.line, 1) from None


# -- sections ----------------------------------------------------------------------

def _model(section: _Section, base_dir: Path | None):
    if "model" not in section.entries:
        raise ConfigError(f"[{section.name}] is missing required key 'model'", section.line, 1)
    name_entry = section.entries["model"]
    name = name_entry.value
    if name not in MODEL_KEYS:
        raise ConfigError(f"unknown model {name!r} (choose from {', '.join(MODEL_KEYS)})",
                          name_entry.line, name_entry.column)
    keys = MODEL_KEYS[name]
    _check_keys(section, {"model", *keys}, [k for k in keys if k not in _OPTIONAL])
    e = section.entries

    def num(key, default=0.0):
        return _float(e[key], key) if key in e else default

    def build():
        if name == "vacuum":
            return Vacuum()
        if name == "drude":
            return Drude(num("plasma_freq"), num("damping"))
        if name == "lorentz":
            return Lorentz(num("oscillator_strength"), num("resonance_freq"), num("damping"))
        if name == "srr":
            return Srr(num("geometry_factor"), num("resonance_freq"), num("damping"))
        if name == "composite":
            return Composite(num("filling_factor"),
                             Drude(num("drude.plasma_freq"), num("drude.damping")),
                             Lorentz(num("lorentz.oscillator_strength"),
                                     num("lorentz.resonance_freq"), num("lorentz.damping")))
        low = e["low_tail"].value if "low_tail" in e else "auto"
        high = e["high_tail"].value if "high_tail" in e else "power-law"
        if low not in LOW_TAILS:
            raise ConfigError(f"low_tail must be one of {LOW_TAILS}", e["low_tail"].line,
                              e["low_tail"].column)
        if high not in HIGH_TAILS:
            raise ConfigError(f"high_tail must be one of {HIGH_TAILS}", e["high_tail"].line,
                              e["high_tail"].column)
        path = e["file"].value
        resolved = Path(path) if base_dir is None or Path(path).is_absolute() else base_dir / path
        table = load_table(resolved, low, high)
        # keep the path as written so dumping reproduces the original text
        return dataclasses.replace(table, source=path)

    return _validated(build, section)


def _medium(sections, name, base_dir):
    if name not in sections:
        raise ConfigError(f"missing section [{name}]")
    sec = sections[name]
    _check_keys(sec, {"kind"}, ["kind"])
    kind_entry = sec.entries["kind"]
    kind = kind_entry.value
    if kind not in MEDIUM_SLOTS:
        raise ConfigError(f"unknown medium kind {kind!r} (choose from {', '.join(MEDIUM_SLOTS)})",
                          kind_entry.line, kind_entry.column)
    if kind == "ideal-conductor":
        return IdealConductor()
    if kind == "ideal-permeable":
        return IdealPermeable()
    models = {}
    for slot in MEDIUM_SLOTS[kind]:
        sub = f"{name}.{slot}"
        if sub not in sections:
            raise ConfigError(f"{kind} medium [{name}] needs a [{sub}] section", sec.line, 1)
        models[slot] = _model(sections[sub], base_dir)
    return Isotropic(**models) if kind == "isotropic" else Uniaxial(**models)


def parse_config(text: str, base_dir: str | Path | None = None) -> RunConfig:
    """Parse configuration text; relative table paths resolve against ``base_dir``."""
    base = Path(base_dir) if base_dir is not None else None
    sections = _lex(text)

    known = {"cavity", "medium1", "medium2", "quadrature", "sweep", "crossing", "study", "output"}
    for name, sec in sections.items():
        head = name.split(".")[0]
        if name in known:
            continue
        if head in ("medium1", "medium2") and name.count(".") == 1:
            kind = sections.get(head)
            slot = name.split(".")[1]
            allowed = MEDIUM_SLOTS.get(kind.entries["kind"].value, ()) if kind and \
                "kind" in kind.entries else ()
            if slot in allowed:
                continue
        raise ConfigError(f"unknown section [{name}]", sec.line, 1)

    cavity = None
    if "cavity" in sections:
        sec = sections["cavity"]
        _check_keys(sec, {"d_over_lambda", "omega_ref"}, ["d_over_lambda"])
        d = _float(sec.entries["d_over_lambda"], "d_over_lambda")
        omega = (_float(sec.entries["omega_ref"], "omega_ref") if "omega_ref" in sec.entries
                 else SILVER_PLASMA_FREQUENCY)
        m1 = _medium(sections, "medium1", base)
        m2 = _medium(sections, "medium2", base)
        cavity = _validated(lambda: _checked_cavity(CavitySection(m1, m2, d, omega)), sec)
    elif "medium1" in sections or "medium2" in sections:
        raise ConfigError("media are defined but the [cavity] section is missing")

    quad = QuadratureSettings()
    if "quadrature" in sections:
        sec = sections["quadrature"]
        allowed = {f.name for f in dataclasses.fields(QuadratureSettings)}
        _check_keys(sec, allowed)
        kwargs = {}
        for key, entry in sec.entries.items():
            if key in ("max_subdivisions", "inner_max_subdivisions"):
                kwargs[key] = _int(entry, key)
            elif key == "tail_cut" and entry.value == "auto":
                kwargs[key] = None
            else:
                kwargs[key] = _float(entry, key)
        quad = _validated(lambda: QuadratureSettings(**kwargs), sec)

    sweep = None
    if "sweep" in sections:
        sec = sections["sweep"]
        _check_keys(sec, {"parameter", "values"}, ["parameter", "values"])
        sweep = SweepSection(sec.entries["parameter"].value, _floats(sec.entries["values"], "values"))

    crossing = None
    if "crossing" in sections:
        sec = sections["crossing"]
        _check_keys(sec, {"d_lo", "d_hi", "xtol"}, ["d_lo", "d_hi"])
        e = sec.entries
        crossing = CrossingSection(_float(e["d_lo"], "d_lo"), _float(e["d_hi"], "d_hi"),
                                   _float(e["xtol"], "xtol") if "xtol" in e else 1e-4)
        if not 0 < crossing.d_lo < crossing.d_hi:
            raise ConfigError("crossing bracket must satisfy 0 < d_lo < d_hi", sec.line, 1)

    study = None
    if "study" in sections:
        sec = sections["study"]
        if "name" not in sec.entries:
            raise ConfigError("[study] is missing required key 'name'", sec.line, 1)
        name_entry = sec.entries["name"]
        sname = name_entry.value
        if sname not in STUDY_KEYS:
            raise ConfigError(f"unknown study {sname!r} (choose from {', '.join(STUDY_KEYS)})",
                              name_entry.line, name_entry.column)
        _check_keys(sec, {"name", *STUDY_KEYS[sname]})
        grids = []
        for key, kind in STUDY_KEYS[sname].items():
            if key in sec.entries:
                conv = _floats if kind == "list" else _float
                grids.append((key, conv(sec.entries[key], key)))
        study = StudySection(sname, tuple(grids))

    output = OutputSection()
    if "output" in sections:
        sec = sections["output"]
        _check_keys(sec, {"format", "timestamp"})
        e = sec.entries
        fmt = e["format"].value if "format" in e else "csv"
        if fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {fmt!r}", e["format"].line,
                              e["format"].column)
        output = OutputSection(fmt, _bool(e["timestamp"], "timestamp") if "timestamp" in e else True)

    return RunConfig(cavity, quad, sweep, crossing, study, output)


def _checked_cavity(section: CavitySection) -> CavitySection:
    section.cavity()  # raises on an invalid gap or scale
    return section


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent)


# -- dumping -------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def _model_lines(model) -> list[str]:
    from .serialize import model_to_dict
    d = model_to_dict(model)
    lines = [f"model = {d.pop('model')}"]
    d.pop("resolved_low_tail", None)
    for key, value in d.items():
        lines.append(f"{key} = {_fmt(value)}")
    return lines


def dump_config(cfg: RunConfig) -> str:
    """Canonical text for ``cfg``; ``parse_config(dump_config(c)) == c``."""
    out = []
    if cfg.cavity is not None:
        c = cfg.cavity
        out += ["[cavity]", f"d_over_lambda = {_fmt(c.d_over_lambda)}",
                f"omega_ref = {_fmt(c.omega_ref)}", ""]
        for name, medium in (("medium1", c.medium1), ("medium2", c.medium2)):
            kind = medium_kind(medium)
            out += [f"[{name}]", f"kind = {kind}", ""]
            for slot in MEDIUM_SLOTS[kind]:
                out += [f"[{name}.{slot}]", *_model_lines(getattr(medium, slot)), ""]
    q = cfg.quadrature
    out += ["[quadrature]"]
    for f in dataclasses.fields(q):
        v = getattr(q, f.name)
        out.append(f"{f.name} = {'auto' if v is None else _fmt(v)}")
    out.append("")
    if cfg.sweep is not None:
        out += ["[sweep]", f"parameter = {cfg.sweep.parameter}",
                f"values = {_fmt(cfg.sweep.values)}", ""]
    if cfg.crossing is not None:
        x = cfg.crossing
        out += ["[crossing]", f"d_lo = {_fmt(x.d_lo)}", f"d_hi = {_fmt(x.d_hi)}",
                f"xtol = {_fmt(x.xtol)}", ""]
    if cfg.study is not None:
        out += ["[study]", f"name = {cfg.study.name}"]
        out += [f"{k} = {_fmt(v)}" for k, v in cfg.study.grids]
        out.append("")
    out += ["[output]", f"format = {cfg.output.format}",
            f"timestamp = {_fmt(cfg.output.timestamp)}", ""]
    return "\n".join(out)


def config_to_dict(cfg: RunConfig) -> dict:
    """Resolved configuration (defaults included) for output metadata."""
    from .serialize import cavity_to_dict, settings_to_dict
    d: dict = {"quadrature": settings_to_dict(cfg.quadrature),
               "output": dataclasses.asdict(cfg.output)}
    if cfg.cavity is not None:
        d["cavity"] = cavity_to_dict(cfg.cavity.cavity())
    if cfg.sweep is not None:
        d["sweep"] = {"parameter": cfg.sweep.parameter, "values": list(cfg.sweep.values)}
    if cfg.crossing is not None:
        d["crossing"] = dataclasses.asdict(cfg.crossing)
    if cfg.study is not None:
        d["study"] = {"name": cfg.study.name,
                      **{k: list(v) if isinstance(v, tuple) else v
                         for k, v in cfg.study.resolved().items()}}
    return d
