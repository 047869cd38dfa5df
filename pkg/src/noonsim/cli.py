"""Command-line entry point.

Subcommands:
  run <config.json> [--out-dir D] [--format csv|json]   run one experiment
  list                                                  list built-in experiments
  dump-state <source.json>                              print a source state as JSON

Exit codes: 0 success, 2 config error, 3 runtime error. The default output
directory comes from NOONSIM_OUT_DIR (falling back to ./out). Outputs are
byte-identical across runs for identical configs and seeds.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import jsonschema

from .fock import ZeroNormError
from .pdc import source_from_json
from .runners import EXPERIMENTS, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

SOURCE_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "kind": {"const": "pdc"},
                "tau": {"type": "number", "minimum": 0},
                "n_max": {"type": "integer", "minimum": 0},
            },
            "required": ["kind", "tau"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "singlet"},
                "n": {"type": "integer", "minimum": 0},
            },
            "required": ["kind", "n"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "eq4"},
                "alpha": {"type": "number", "minimum": 0, "maximum": 1},
            },
            "required": ["kind", "alpha"],
            "additionalProperties": False,
        },
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "experiment": {"enum": sorted(EXPERIMENTS)},
        "name": {"type": "string", "pattern": r"^[A-Za-z0-9._-]+$"},
        "seed": {"type": "integer", "minimum": 0},
        "params": {
            "type": "object",
            "properties": {"source": SOURCE_SCHEMA},
        },
    },
    "required": ["experiment"],
    "additionalProperties": False,
}


class ConfigError(Exception):
    pass


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def _dump_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(x)) for x in row])


def cmd_run(args: argparse.Namespace) -> int:
    config = _load_json(args.config)
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config rejected: {exc.message}") from exc
    experiment = config["experiment"]
    params = config.get("params", {})
    seed = config.get("seed")
    name = config.get("name") or _default_name(experiment, params)

    out_dir = Path(args.out_dir or os.environ.get("NOONSIM_OUT_DIR", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)

    try:
        artifacts = run_experiment(experiment, params, seed)
    except (ValueError, ZeroNormError) as exc:
        raise ConfigError(str(exc)) from exc

    tag = experiment + (f" [{_variant(params)}]" if _variant(params) else "")
    print(f"{tag}: {EXPERIMENTS[experiment].description}")

    written: list[Path] = []
    if args.format == "json":
        payload = dict(artifacts.summary)
        if artifacts.rows is not None:
            payload["columns"] = artifacts.header
            payload["rows"] = [list(map(float, row)) for row in artifacts.rows]
        path = out_dir / f"{name}.json"
        path.write_text(_dump_json(payload))
        written.append(path)
    else:
        if artifacts.rows is not None:
            csv_path = out_dir / f"{name}.csv"
            _write_csv(csv_path, artifacts.header, artifacts.rows)
            written.append(csv_path)
        summary_path = out_dir / f"{name}.summary.json"
        summary_path.write_text(_dump_json(artifacts.summary))
        written.append(summary_path)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _variant(params: dict) -> str:
    for key in ("basis_a", "basis"):
        if key in params:
            return str(params[key])
    return ""


def _default_name(experiment: str, params: dict) -> str:
    variant = _variant(params)
    return f"{experiment}_{variant}" if variant else experiment


def cmd_list(_: argparse.Namespace) -> int:
    for key in EXPERIMENTS:
        print(f"{key:11s} {EXPERIMENTS[key].description}")
    return EXIT_OK


def cmd_dump_state(args: argparse.Namespace) -> int:
    spec = _load_json(args.source)
    try:
        jsonschema.validate(spec, SOURCE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"source rejected: {exc.message}") from exc
    try:
        source, meta = source_from_json(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    payload = source.to_json()
    payload.update(meta)
    sys.stdout.write(_dump_json(payload))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noonsim",
        description="heralded multiphoton path-entanglement simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment config")
    run_p.add_argument("config", help="path to the experiment config JSON")
    run_p.add_argument("--out-dir", default=None, help="output directory")
    run_p.add_argument("--format", choices=("csv", "json"), default="csv")
    run_p.set_defaults(func=cmd_run)

    list_p = sub.add_parser("list", help="list built-in experiments")
    list_p.set_defaults(func=cmd_list)

    dump_p = sub.add_parser("dump-state", help="print a source state as JSON")
    dump_p.add_argument("source", help="path to the source spec JSON")
    dump_p.set_defaults(func=cmd_dump_state)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RuntimeError, ZeroNormError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
