"""Machine-readable writers and SI unit conversion.

CSV layout (RFC 4180 quoting, CRLF line ends)::

    # lifshitz-output/1 <kind>
    # metadata: {...compact JSON...}
    <header row>
    <data rows>

Metadata lives in ``#`` comment lines so that a result with no rows is a
header-only table. Floats are written with ``repr`` (shortest round-trip
form), booleans as ``true``/``false``, missing values as empty fields.

Columns per kind:

* ``force``: d_over_lambda, gap, value, error_estimate, sign, evaluations,
  converged, value_si (N/m^2)
* ``energy``: d_over_lambda, gap, value, error_estimate, evaluations,
  converged, value_si (J/m^2)
* ``sweep``: parameter, value, error_estimate, sign, evaluations, converged,
  message
* ``crossing``: status, gap, d_over_lambda, bracket_lo, bracket_hi, value,
  error_estimate, sign, evaluations
* ``study``: the study's scalar columns, then for every force column ``k``
  the five columns ``k_value, k_error_estimate, k_sign, k_evaluations,
  k_converged`` (see ``STUDY_COLUMNS``)
* ``table``: whatever a :class:`Table` declares (used by ``kk`` and
  ``limits``)

JSON documents carry ``"schema": "lifshitz-output/1"`` and ``"kind"``; rows
are objects, force results nest as objects. :func:`load_json` rebuilds
sweep and study results.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from scipy.constants import c, hbar

from .analysis import CrossingResult, StudyResult, SweepResult
from .dispersion import FrequencyScale
from .quadrature import EnergyResult, ForceResult
from .serialize import jsonable

SCHEMA = "lifshitz-output/1"
FORMATS = ("csv", "json")

FORCE_FIELDS = ("value", "error_estimate", "sign", "evaluations", "converged")

STUDY_COLUMNS = {
    "fig1": (("filling_factor", "d_over_lambda"), ("force",)),
    "fig2a": (("f_par", "f_perp"), ("force",)),
    "fig2b": (("electric_ratio", "magnetic_ratio"), ("force",)),
    "fig3": (("d_over_lambda",), ("force_res", "force_srr")),
    "dissipation": (("ratio",), ("force",)),
}


# -- units ---------------------------------------------------------------------

def force_unit(scale: FrequencyScale) -> float:
    """Pressure in N/m^2 represented by a normalized force of 1."""
    return hbar * scale.omega_ref**4 / (2 * math.pi**2 * c**3)


def energy_unit(scale: FrequencyScale) -> float:
    """Energy per area in J/m^2 represented by a normalized energy of 1."""
    return hbar * scale.omega_ref**3 / (2 * math.pi**2 * c**2)


def convert_to_si(f_tilde: float, scale: FrequencyScale) -> float:
    return f_tilde * force_unit(scale)


def convert_from_si(pressure: float, scale: FrequencyScale) -> float:
    return pressure / force_unit(scale)


def energy_to_si(e_tilde: float, scale: FrequencyScale) -> float:
    return e_tilde * energy_unit(scale)


# -- generic single results ------------------------------------------------------

@dataclass
class Table:
    kind: str
    columns: tuple[str, ...]
    rows: list[dict]
    metadata: dict = field(default_factory=dict)


@dataclass
class PointResult:
    """A force or energy at one gap, with the scale needed for SI output."""

    result: ForceResult | EnergyResult
    gap: float
    scale: FrequencyScale
    metadata: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return "force" if isinstance(self.result, ForceResult) else "energy"

    def as_row(self) -> dict:
        r = self.result
        row = {"d_over_lambda": self.gap / (2 * math.pi), "gap": self.gap,
               "value": r.value, "error_estimate": r.error_estimate}
        if isinstance(r, ForceResult):
            row["sign"] = r.sign.value
            si = convert_to_si(r.value, self.scale)
        else:
            si = energy_to_si(r.value, self.scale)
        row.update(evaluations=r.evaluations, converged=r.converged, value_si=si)
        return row


# -- dispatch ------------------------------------------------------------------------

def _flatten_force(prefix: str, r: ForceResult) -> dict:
    d = r.to_dict()
    return {f"{prefix}_{k}": d[k] for k in FORCE_FIELDS}


def _tabulate(result) -> Table:
    if isinstance(result, Table):
        return result
    if isinstance(result, PointResult):
        row = result.as_row()
        return Table(result.kind, tuple(row), [row], result.metadata)
    if isinstance(result, SweepResult):
        d = result.to_dict()
        cols = ("parameter", *FORCE_FIELDS, "message")
        return Table("sweep", cols, d["rows"], d["metadata"])
    if isinstance(result, CrossingResult):
        f = result.force
        row = {"status": result.status, "gap": result.gap, "d_over_lambda": result.d_over_lambda,
               "bracket_lo": result.bracket[0], "bracket_hi": result.bracket[1],
               "value": None if f is None else f.value,
               "error_estimate": None if f is None else f.error_estimate,
               "sign": None if f is None else f.sign.value,
               "evaluations": result.evaluations}
        return Table("crossing", tuple(row), [row], result.metadata)
    if isinstance(result, StudyResult):
        scalars, forces = STUDY_COLUMNS[result.name]
        cols = (*scalars, *(f"{k}_{f}" for k in forces for f in FORCE_FIELDS))
        rows = []
        for r in result.rows:
            flat = {k: r[k] for k in scalars}
            for k in forces:
                flat.update(_flatten_force(k, r[k]))
            rows.append(flat)
        return Table("study", cols, rows, result.metadata)
    raise TypeError(f"cannot emit {type(result).__name__}")


def _json_doc(result, metadata) -> dict:
    if isinstance(result, SweepResult):
        d = result.to_dict()
        return {"schema": SCHEMA, "kind": "sweep", "parameter_path": d["parameter_path"],
                "rows": d["rows"], "metadata": metadata}
    if isinstance(result, StudyResult):
        rows = [{k: v.to_dict() if isinstance(v, ForceResult) else v for k, v in r.items()}
                for r in result.rows]
        return {"schema": SCHEMA, "kind": "study", "name": result.name, "rows": rows,
                "metadata": metadata}
    table = _tabulate(result)
    return {"schema": SCHEMA, "kind": table.kind, "columns": list(table.columns),
            "rows": table.rows, "metadata": metadata}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit(result, fmt: str = "csv", *, timestamp: str | None = None,
         extra_metadata: dict | None = None) -> bytes:
    """Serialize ``result`` as CSV or JSON bytes (UTF-8).

    ``timestamp`` (if given) and ``extra_metadata`` are merged into a copy of
    the result's metadata; the result itself is not modified.
    """
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    table = _tabulate(result)
    metadata = dict(table.metadata)
    if extra_metadata:
        metadata.update(extra_metadata)
    if timestamp is not None:
        metadata["timestamp"] = timestamp
    metadata = jsonable(metadata)

    if fmt == "json":
        doc = jsonable(_json_doc(result, metadata))
        return (json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n").encode()

    buf = io.StringIO()
    buf.write(f"# {SCHEMA} {table.kind}\r\n")
    buf.write("# metadata: " + json.dumps(metadata, sort_keys=True, separators=(",", ":"),
                                          allow_nan=False) + "\r\n")
    writer = csv.writer(buf)
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(row.get(col)) for col in table.columns])
    return buf.getvalue().encode()


def _force(d: dict) -> ForceResult:
    return ForceResult.from_dict(d)


def load_json(data: bytes | str):
    """Rebuild a result from :func:`emit` JSON output."""
    doc = json.loads(data)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    kind = doc["kind"]
    if kind == "sweep":
        return SweepResult.from_dict(doc)
    if kind == "study":
        rows = [{k: _force(v) if isinstance(v, dict) else v for k, v in r.items()}
                for r in doc["rows"]]
        return StudyResult(doc["name"], rows, doc["metadata"])
    return Table(kind, tuple(doc["columns"]), doc["rows"], doc["metadata"])


def read_csv(data: bytes | str) -> tuple[dict, list[dict]]:
    """Parse CSV output into ``(metadata, rows)`` with string cells."""
    text = data.decode() if isinstance(data, bytes) else data
    metadata = {}
    body = []
    for line in text.splitlines(keepends=True):
        if line.startswith("# metadata: "):
            metadata = json.loads(line[len("# metadata: "):])
        elif not line.startswith("#"):
            body.append(line)
    reader = csv.DictReader(io.StringIO("".join(body)))
    return metadata, list(reader)
