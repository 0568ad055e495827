"""Command-line interface.

Subcommands::

    lifshitz force CONFIG        force at the [cavity] gap
    lifshitz energy CONFIG       interaction energy at the [cavity] gap
    lifshitz sweep CONFIG        force over the [sweep] values
    lifshitz crossing CONFIG     sign crossing inside the [crossing] bracket
    lifshitz study NAME [--config CONFIG]
                                 fig1 | fig2a | fig2b | fig3 | dissipation
    lifshitz kk TABLE --x LIST   imaginary-axis response of a tabulated medium
    lifshitz limits              ideal-mirror and conductor/permeable self-test

Exit status: 0 success, 1 invalid input, 2 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import math
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    SweepSpec,
    anisotropy_study,
    dissipation_study,
    fig1_study,
    fig2a_study,
    find_sign_crossing,
    run_sweep,
    srr_study,
)
from .config import STUDY_KEYS, ConfigError, RunConfig, StudySection, config_to_dict, load_config
from .dispersion import IdealConductor, IdealPermeable
from .kramers_kronig import HIGH_TAILS, LOW_TAILS, IllConditionedTableError, kk_breakdown, load_table
from .output import PointResult, Table, emit
from .quadrature import (
    CavityConfig,
    QuadratureSettings,
    energy_per_area,
    force_per_area,
    ideal_force,
)
from .serialize import settings_to_dict

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED = 0, 1, 2

LIMIT_GAPS = (0.5, 1.0, 2.0, 5.0)
LIMIT_TOLERANCES = {"ideal": 1e-3, "boyer": 5e-3}


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        values = [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError("values must be finite")
    return values


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"),
                        help="output format (default: [output] format, else csv)")
    common.add_argument("--output", "-o", type=Path, help="write to a file instead of stdout")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp so identical inputs give identical bytes")
    common.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1,
                        help="maximum worker threads for sweeps and studies")

    p = argparse.ArgumentParser(prog="lifshitz", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    for name, helptext in (("force", "force per area at the configured gap"),
                           ("energy", "energy per area at the configured gap"),
                           ("sweep", "force over a parameter sweep"),
                           ("crossing", "locate a change of force sign")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("config", type=Path)

    s = sub.add_parser("study", parents=[common], help="scripted parameter studies")
    s.add_argument("name", choices=tuple(STUDY_KEYS))
    s.add_argument("--config", type=Path,
                   help="config with optional [study] grids and [quadrature] settings")

    s = sub.add_parser("kk", parents=[common], help="transform tabulated absorption data")
    s.add_argument("table", type=Path, help="CSV with columns omega_normalized, im_response")
    s.add_argument("--x", type=_floats, required=True, help="imaginary frequencies xi/omega_ref")
    s.add_argument("--low-tail", choices=LOW_TAILS, default="auto")
    s.add_argument("--high-tail", choices=HIGH_TAILS, default="power-law")
    s.add_argument("--allow-ill-conditioned", action="store_true",
                   help="report results even when extrapolated tails dominate")

    s = sub.add_parser("limits", parents=[common], help="ideal-mirror oracle self-test")
    s.add_argument("--gaps", type=_floats, default=list(LIMIT_GAPS), help="gaps as d/Lambda")
    return p


# -- commands -------------------------------------------------------------------

def _config(args) -> RunConfig:
    return load_config(args.config)


def _need(section, name, path):
    if section is None:
        raise UsageError(f"{path}: this command needs a [{name}] section")
    return section


def _status(converged_flags) -> int:
    return EXIT_OK if all(converged_flags) else EXIT_NONCONVERGED


def cmd_point(args, kind):
    cfg = _config(args)
    cav = _need(cfg.cavity, "cavity", args.config).cavity()
    fn = force_per_area if kind == "force" else energy_per_area
    result = fn(cav, cfg.quadrature)
    meta = {"tool": "lifshitz", "version": __version__, "config": config_to_dict(cfg)}
    return PointResult(result, cav.gap, cav.scale, meta), cfg, _status([result.converged])


def cmd_sweep(args):
    cfg = _config(args)
    cav = _need(cfg.cavity, "cavity", args.config).cavity()
    sw = _need(cfg.sweep, "sweep", args.config)
    spec = SweepSpec(sw.parameter, list(sw.values), cav, cfg.quadrature)
    res = run_sweep(spec, workers=args.threads)
    res.metadata["config"] = config_to_dict(cfg)
    if any(r.message and r.message.startswith(("ValueError", "ModelDomainError"))
           for r in res.rows):
        code = EXIT_INVALID
    else:
        code = _status(r.result.converged for r in res.rows)
    return res, cfg, code


def cmd_crossing(args):
    cfg = _config(args)
    cav = _need(cfg.cavity, "cavity", args.config).cavity()
    x = _need(cfg.crossing, "crossing", args.config)
    res = find_sign_crossing(cav, 2 * math.pi * x.d_lo, 2 * math.pi * x.d_hi,
                             cfg.quadrature, xtol=x.xtol)
    res = dataclasses.replace(res, metadata={"tool": "lifshitz", "version": __version__,
                                             "config": config_to_dict(cfg)})
    code = EXIT_NONCONVERGED if res.status == "resolution-limited" else EXIT_OK
    return res, cfg, code


def cmd_study(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    study = cfg.study or StudySection(args.name)
    if study.name != args.name:
        raise UsageError(f"{args.config}: [study] name is {study.name!r}, expected {args.name!r}")
    p = study.resolved()
    q, w = cfg.quadrature, args.threads
    if args.name == "fig1":
        res = fig1_study(p["filling_factors"], p["d_over_lambda"], q, workers=w)
    elif args.name == "fig2a":
        res = fig2a_study(p["f_par"], p["f_perp"], p["d_over_lambda"], q, workers=w)
    elif args.name == "fig2b":
        res = anisotropy_study(p["electric_ratios"], p["magnetic_ratios"], p["d_over_lambda"],
                               p["filling_factor"], q, workers=w)
    elif args.name == "fig3":
        res = srr_study(p["d_over_lambda"], p["geometry_factor"], p["filling_factor"], q, workers=w)
    else:
        res = dissipation_study(p["ratios"], p["d_over_lambda"], p["filling_factor"], q, workers=w)
    res.metadata["config"] = config_to_dict(RunConfig(quadrature=q, study=study, output=cfg.output))
    flags = [v.converged for row in res.rows for v in row.values() if hasattr(v, "converged")]
    return res, cfg, _status(flags)


def cmd_kk(args):
    table = load_table(args.table, args.low_tail, args.high_tail)
    x = [float(v) for v in args.x]
    b = kk_breakdown(table, x)
    frac = b.tail_fraction
    if not args.allow_ill_conditioned and (frac > 0.5).any():
        worst = x[int(frac.argmax())]
        raise IllConditionedTableError(
            f"extrapolated tails carry {frac.max():.0%} of the transform at x={worst!r}; "
            "extend the table or pass --allow-ill-conditioned")
    cols = ("x", "response", "body", "low_tail", "high_tail", "tail_fraction")
    rows = [dict(zip(cols, map(float, vals))) for vals in
            zip(x, b.response, b.body, b.low_tail, b.high_tail, frac)]
    meta = {"tool": "lifshitz", "version": __version__, "table": str(args.table),
            "points": int(table.omega.size), "low_tail": args.low_tail,
            "resolved_low_tail": table.resolved_low_tail, "high_tail": args.high_tail}
    return Table("table", cols, rows, meta), RunConfig(), EXIT_OK


def cmd_limits(args):
    q = QuadratureSettings()
    cols = ("case", "d_over_lambda", "value", "error_estimate", "expected", "rel_error",
            "tolerance", "passed")
    rows = []
    for case, m2, factor in (("ideal", IdealConductor(), 1.0),
                             ("boyer", IdealPermeable(), -7 / 8)):
        for d in args.gaps:
            if not d > 0:
                raise UsageError("gaps must be positive")
            cav = CavityConfig.from_d_over_lambda(IdealConductor(), m2, d)
            r = force_per_area(cav, q)
            expected = factor * ideal_force(cav.gap)
            rel = abs(r.value / expected - 1)
            tol = LIMIT_TOLERANCES[case]
            rows.append({"case": case, "d_over_lambda": d, "value": r.value,
                         "error_estimate": r.error_estimate, "expected": expected,
                         "rel_error": rel, "tolerance": tol,
                         "passed": bool(r.converged and rel <= tol)})
    meta = {"tool": "lifshitz", "version": __version__, "quadrature": settings_to_dict(q)}
    code = EXIT_OK if all(r["passed"] for r in rows) else EXIT_NONCONVERGED
    return Table("table", cols, rows, meta), RunConfig(), code


def _dispatch(args):
    if args.command in ("force", "energy"):
        return cmd_point(args, args.command)
    return {"sweep": cmd_sweep, "crossing": cmd_crossing, "study": cmd_study,
            "kk": cmd_kk, "limits": cmd_limits}[args.command](args)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; map to the invalid-input status
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        result, cfg, code = _dispatch(args)
    except (ConfigError, UsageError, ValueError, OSError) as exc:
        print(f"lifshitz: error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    fmt = args.format or cfg.output.format
    stamp = None
    if cfg.output.timestamp and not args.no_timestamp:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    data = emit(result, fmt, timestamp=stamp)
    if args.output:
        args.output.write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    if code == EXIT_NONCONVERGED:
        print("lifshitz: warning: some results did not reach the requested tolerance",
              file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
