"""Configuration ingestion, command dispatch, and report/grid export.

Subcommands: analyze, scan, core, measures, catalog, eb.  Exit codes:
0 success, 1 configuration error, 2 numeric failure.  Exports are
byte-deterministic: the same config always produces the same files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .analysis import (
    CharTimes,
    CptpGrid,
    characteristic_times,
    extract_pnm_core,
    scan_regions,
    verify_composition_rules,
)
from .errors import (
    CPTPViolation,
    ExprSyntaxError,
    ParseError,
    PnmError,
    SchemaError,
)
from .evolutions import (
    Depolarizing,
    Evolution,
    PRESET_NAMES,
    PauliProbs,
    PauliRates,
    QuasiEternal,
    make_preset,
    t0_alpha,
    validate_spec,
)
from .exprparse import ScalarFn
from .measures import eb_time_qubit, measure_report

DEFAULT_HORIZON = 5.0
DEFAULT_GRID = 400

_CONFIG_FIELDS = {"evolution", "horizon", "grid_points", "tolerances", "outputs", "seed"}
_EVOLUTION_FIELDS = {
    "preset",
    "type",
    "dim",
    "f",
    "alpha",
    "t0",
    "t_unitary",
    "g_x",
    "g_y",
    "g_z",
    "p_x",
    "p_y",
    "p_z",
}


@dataclass(frozen=True)
class AnalysisConfig:
    evolution: Evolution
    evolution_spec: dict
    horizon: float = DEFAULT_HORIZON
    grid_points: int = DEFAULT_GRID
    scan_tol: float = 1e-10
    outputs: tuple = ("report",)
    seed: int = 0


def _expr(spec: dict, key: str, pointer: str) -> ScalarFn:
    text = spec.get(key)
    if not isinstance(text, str):
        raise SchemaError(f"field {key!r} must be an expression string", f"{pointer}/{key}")
    try:
        return ScalarFn.parse(text)
    except ExprSyntaxError as exc:
        raise SchemaError(f"bad expression for {key!r}: {exc}", f"{pointer}/{key}")


def _build_evolution(spec: dict, strict: bool) -> Evolution:
    if not isinstance(spec, dict):
        raise SchemaError("'evolution' must be an object", "/evolution")
    unknown = set(spec) - _EVOLUTION_FIELDS
    if unknown:
        msg = f"unknown evolution fields: {sorted(unknown)}"
        if strict:
            raise SchemaError(msg, "/evolution")
        print(f"warning: {msg}", file=sys.stderr)
    if "preset" in spec:
        name = spec["preset"]
        if name not in PRESET_NAMES:
            raise SchemaError(f"unknown preset {name!r}", "/evolution/preset")
        params = {k: spec[k] for k in ("alpha", "t0", "t_unitary", "dim") if k in spec}
        try:
            return make_preset(name, **params)
        except CPTPViolation as exc:
            raise SchemaError(str(exc), "/evolution")
    kind = spec.get("type")
    if kind == "depolarizing":
        return Depolarizing(_expr(spec, "f", "/evolution"), dim=int(spec.get("dim", 2)))
    if kind == "quasiEternal":
        alpha = float(spec.get("alpha", 0.0))
        t0 = float(spec.get("t0", 0.0))
        if alpha <= 0:
            raise SchemaError("alpha must be positive", "/evolution/alpha")
        if t0 < t0_alpha(alpha) - 1e-12:
            raise SchemaError(
                f"t0 = {t0} below the validity threshold {t0_alpha(alpha):.6f}",
                "/evolution/t0",
            )
        return QuasiEternal(alpha=alpha, t0=t0, t_unitary=float(spec.get("t_unitary", 0.0)))
    if kind == "pauliRates":
        return PauliRates(*(_expr(spec, k, "/evolution") for k in ("g_x", "g_y", "g_z")))
    if kind == "pauliProbs":
        return PauliProbs(*(_expr(spec, k, "/evolution") for k in ("p_x", "p_y", "p_z")))
    raise SchemaError(f"unknown evolution type {kind!r}", "/evolution/type")


def load_config(text_or_path: str, strict: bool = True) -> AnalysisConfig:
    """Parse and validate a JSON config given as text or a file path."""
    text = text_or_path
    if not text.lstrip().startswith("{"):
        try:
            with open(text_or_path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read config file: {exc}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}")
    if not isinstance(raw, dict):
        raise SchemaError("config must be a JSON object", "/")
    unknown = set(raw) - _CONFIG_FIELDS
    if unknown:
        msg = f"unknown config fields: {sorted(unknown)}"
        if strict:
            raise SchemaError(msg, "/")
        print(f"warning: {msg}", file=sys.stderr)
    if "evolution" not in raw:
        raise SchemaError("missing required field 'evolution'", "/evolution")
    horizon = float(raw.get("horizon", DEFAULT_HORIZON))
    if horizon <= 0 or not math.isfinite(horizon):
        raise SchemaError("horizon must be positive and finite", "/horizon")
    grid_points = int(raw.get("grid_points", DEFAULT_GRID))
    if grid_points < 16:
        raise SchemaError("grid_points must be at least 16", "/grid_points")
    tol = raw.get("tolerances", {})
    if not isinstance(tol, dict):
        raise SchemaError("'tolerances' must be an object", "/tolerances")
    outputs = tuple(raw.get("outputs", ["report"]))
    for o in outputs:
        if o not in ("report", "grid", "flux"):
            raise SchemaError(f"unknown output {o!r}", "/outputs")
    return AnalysisConfig(
        evolution=_build_evolution(raw["evolution"], strict),
        evolution_spec=raw["evolution"],
        horizon=horizon,
        grid_points=grid_points,
        scan_tol=float(tol.get("scan", 1e-10)),
        outputs=outputs,
        seed=int(raw.get("seed", 0)),
    )


def _times_dict(ct: CharTimes) -> dict:
    cvt = lambda v: v if math.isfinite(v) else None
    return {
        "T": cvt(ct.T),
        "tau": cvt(ct.tau),
        "t_star": cvt(ct.t_star),
        "horizon_limited": list(ct.horizon_limited),
    }


def run_report(cfg: AnalysisConfig) -> dict:
    """Full deterministic pipeline: validate, scan, times, classify, core,
    measures."""
    e = cfg.evolution
    validation = validate_spec(e, cfg.horizon)
    grid = scan_regions(e, cfg.horizon, cfg.grid_points, cfg.scan_tol)
    ct = characteristic_times(e, cfg.horizon, cfg.grid_points)
    violations = verify_composition_rules(grid, samples=10_000, seed=cfg.seed)
    doc = {
        "tool_version": __version__,
        "seed": cfg.seed,
        "config": {
            "evolution": cfg.evolution_spec,
            "horizon": cfg.horizon,
            "grid_points": cfg.grid_points,
        },
        "classification": ct.classification,
        "times": _times_dict(ct),
        "validation": {
            "valid": validation.valid,
            "notes": list(validation.notes),
        },
        "composition_rule_violations": len(violations),
        "min_choi": dict(zip(("value", "s", "t"), grid.min_value())),
        "regularized_scan": grid.regularized,
    }
    measures = None
    if ct.classification in ("NNM", "PNM"):
        measures = measure_report(e, cfg.horizon, ct.T)
    elif ct.classification == "Markovian":
        measures = measure_report(e, cfg.horizon, math.inf)
    if measures is not None:
        md = dataclasses.asdict(measures)
        md["values_are_lower_bounds"] = not measures.exact
        del md["exact"]
        doc["measures"] = md
    if ct.classification == "NNM":
        core = extract_pnm_core(e, ct.T)
        core_ct = ct.shifted()
        core_grid_h = max(cfg.horizon - ct.T, cfg.horizon / 10)
        doc["core"] = {
            "times": _times_dict(core_ct),
            "recomputed_times": _times_dict(
                characteristic_times(core, core_grid_h, cfg.grid_points)
            ),
        }
        core_measures = measure_report(core, core_grid_h, 0.0)
        cm = dataclasses.asdict(core_measures)
        cm["values_are_lower_bounds"] = not core_measures.exact
        del cm["exact"]
        doc["core"]["measures"] = cm
    return doc


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return f"{x:.11e}"


def export_grid(grid: CptpGrid, fmt: str = "csv") -> str:
    """Serialize the scan grid; CSV rows are (s, t, value, class) in
    row-major order with 12 significant digits."""
    if fmt == "csv":
        lines = ["s,t,value,class"]
        for s, t, v, c in grid.cells():
            lines.append(f"{_fmt(s)},{_fmt(t)},{_fmt(v)},{c}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return (
            json.dumps(
                {
                    "horizon": grid.horizon,
                    "n": grid.n,
                    "regularized": grid.regularized,
                    "cells": [
                        {"s": s, "t": t, "value": None if math.isnan(v) else v, "class": c}
                        for s, t, v, c in grid.cells()
                    ],
                },
                indent=2,
            )
            + "\n"
        )
    raise SchemaError(f"unknown format {fmt!r}", "/format")


def _write(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_doc(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pnmcore",
        description="Analyze one-parameter families of quantum dynamical maps.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("analyze", "full report: scan, characteristic times, core, measures"),
        ("scan", "export the CPTP region grid"),
        ("core", "extract the PNM core and report its times and measures"),
        ("measures", "measure bundle for the configured evolution"),
        ("eb", "entanglement-breaking onset time"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True, help="JSON config text or file path")
        sp.add_argument("--horizon", type=float, default=None)
        sp.add_argument("--grid", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--strict", action="store_true")
    sub.add_parser("catalog", help="list available presets")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "catalog":
        for name in PRESET_NAMES:
            print(name)
        return 0
    try:
        cfg = load_config(args.config, strict=args.strict)
        if args.horizon is not None or args.grid is not None:
            cfg = dataclasses.replace(
                cfg,
                horizon=args.horizon if args.horizon is not None else cfg.horizon,
                grid_points=args.grid if args.grid is not None else cfg.grid_points,
            )
            if cfg.horizon <= 0:
                raise SchemaError("horizon must be positive", "/horizon")
            if cfg.grid_points < 16:
                raise SchemaError("grid_points must be at least 16", "/grid_points")
    except (ParseError, SchemaError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "scan":
            grid = scan_regions(cfg.evolution, cfg.horizon, cfg.grid_points, cfg.scan_tol)
            _write(export_grid(grid, args.format), args.out)
            return 0
        if args.command == "analyze":
            _write(_json_doc(run_report(cfg)), args.out)
            return 0
        if args.command == "measures":
            ct = characteristic_times(cfg.evolution, cfg.horizon, cfg.grid_points)
            rep = measure_report(cfg.evolution, cfg.horizon, ct.T)
            _write(_json_doc(dataclasses.asdict(rep)), args.out)
            return 0
        if args.command == "core":
            ct = characteristic_times(cfg.evolution, cfg.horizon, cfg.grid_points)
            if ct.classification != "NNM" or not math.isfinite(ct.T):
                print(
                    f"no core to extract: classification {ct.classification}",
                    file=sys.stderr,
                )
                return 1
            core = extract_pnm_core(cfg.evolution, ct.T)
            h = max(cfg.horizon - ct.T, cfg.horizon / 10)
            doc = {
                "parent_times": _times_dict(ct),
                "core_times": _times_dict(ct.shifted()),
                "core_measures": dataclasses.asdict(measure_report(core, h, 0.0)),
            }
            _write(_json_doc(doc), args.out)
            return 0
        if args.command == "eb":
            t_eb = eb_time_qubit(cfg.evolution, cfg.horizon, cfg.grid_points)
            _write(_json_doc({"eb_time": t_eb, "horizon": cfg.horizon}), args.out)
            return 0
    except PnmError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
