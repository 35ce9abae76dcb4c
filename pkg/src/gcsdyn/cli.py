"""Command line: ``gcsdyn simulate | verify | sweep``.

Exit codes: 0 success, 1 computational failure, 2 configuration error.
The output directory of ``simulate`` and ``sweep`` can be overridden with the
``GCSDYN_OUTPUT_DIR`` environment variable.
"""

from __future__ import annotations

import argparse
import copy
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .checks import format_table, run_checks
from .exceptions import GCSError
from .scenario import ConfigError, load_config, parse_config, run_scenario

OUTPUT_ENV = "GCSDYN_OUTPUT_DIR"
EXIT_OK, EXIT_FAILURE, EXIT_CONFIG = 0, 1, 2


def _output_dir(cfg_data: dict) -> Path:
    return Path(os.environ.get(OUTPUT_ENV) or cfg_data["output"]["dir"])


def _write(result, cfg_data: dict, stem: str | None = None) -> tuple[Path, Path]:
    out = _output_dir(cfg_data)
    out.mkdir(parents=True, exist_ok=True)
    stem = stem or cfg_data["output"]["stem"]
    csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
    csv_path.write_text(result.csv_text, encoding="utf-8")
    json_path.write_text(json.dumps(result.summary, indent=2, sort_keys=True) + "\n",
                         encoding="utf-8")
    return csv_path, json_path


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as err:
        print(err, file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"cannot read config: {err}", file=sys.stderr)
        return EXIT_FAILURE
    try:
        result = run_scenario(cfg)
        csv_path, json_path = _write(result, cfg.data)
    except (GCSError, ValueError, RuntimeError, OSError) as err:
        print(f"computation failed: {err}", file=sys.stderr)
        return EXIT_FAILURE
    s = result.summary
    print(f"wrote {csv_path} and {json_path}")
    for key in ("min_fidelity", "max_norm_drift", "wronskian_drift", "sup_disc_distance",
                "max_abs_discrepancy"):
        if s.get(key) is not None:
            print(f"  {key} = {s[key]:.6e}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_checks(args.filter)
    if not results:
        print(f"no check matches {args.filter!r}", file=sys.stderr)
        return EXIT_CONFIG
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE


# --------------------------------------------------------------------------
# sweep

def _set_path(tree: dict, path: str, value):
    keys = path.split(".")
    node = tree
    for key in keys[:-1]:
        if not isinstance(node, dict) or key not in node:
            raise ConfigError(f"sweep.{path}", f"no field {key!r} in the base scenario")
        node = node[key]
    if not isinstance(node, dict):
        raise ConfigError(f"sweep.{path}", "parent is not an object")
    node[keys[-1]] = value


def expand_sweep(raw: dict) -> tuple[list[str], list[tuple[dict, dict]]]:
    """Cartesian product of the ``sweep`` arrays, in sorted path order.

    Returns the swept paths and ``(coordinates, scenario)`` pairs.  Scenarios
    are not validated here; invalid ones are reported per scenario.
    """
    grid = raw.get("sweep")
    if not isinstance(grid, dict) or not grid:
        raise ConfigError("sweep", "expected an object mapping dotted field paths to arrays")
    paths = sorted(grid)
    for p in paths:
        if not isinstance(grid[p], list) or not grid[p]:
            raise ConfigError(f"sweep.{p}", "expected a non-empty array of values")
    base = {k: v for k, v in raw.items() if k != "sweep"}
    out = []
    for values in itertools.product(*(grid[p] for p in paths)):
        scenario = copy.deepcopy(base)
        for p, v in zip(paths, values):
            _set_path(scenario, p, copy.deepcopy(v))
        out.append((dict(zip(paths, values)), scenario))
    return paths, out


def _run_one(item):
    index, coords, scenario, stem = item
    entry = {"index": index, "coords": coords}
    try:
        cfg = parse_config(scenario)
        result = run_scenario(cfg)
        _write(result, cfg.data, f"{stem}_{index:04d}")
        summary = dict(result.summary)
        summary.pop("wall_time", None)
        entry.update(status="ok", summary=summary)
    except ConfigError as err:
        entry.update(status="config_error", error=str(err))
    except (GCSError, ValueError, RuntimeError, OSError) as err:
        entry.update(status="failed", error=f"{type(err).__name__}: {err}")
    return entry


def cmd_sweep(args) -> int:
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as err:
        print(f"cannot read config: {err}", file=sys.stderr)
        return EXIT_FAILURE
    try:
        raw = json.loads(text)
        if not isinstance(raw, dict):
            raise ConfigError("<file>", "top level must be an object")
        paths, scenarios = expand_sweep(raw)
        base = parse_config({k: v for k, v in raw.items() if k != "sweep"}, text)
    except json.JSONDecodeError as err:
        print(ConfigError("<file>", f"invalid JSON: {err.msg}", err.lineno), file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as err:
        print(err, file=sys.stderr)
        return EXIT_CONFIG

    stem = base.data["output"]["stem"]
    items = [(i, coords, sc, stem) for i, (coords, sc) in enumerate(scenarios)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            entries = list(pool.map(_run_one, items))
    else:
        entries = [_run_one(it) for it in items]
    entries.sort(key=lambda e: e["index"])

    from . import __version__
    report = {"version": __version__, "paths": paths, "count": len(entries),
              "failures": sum(e["status"] != "ok" for e in entries), "scenarios": entries}
    out = _output_dir(base.data)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{stem}_sweep.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {path}: {len(entries)} scenarios, {report['failures']} failed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcsdyn",
        description="Coherent-state dynamics: classical flows and quantum stability checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario file, writing CSV and JSON")
    p.add_argument("config", help="scenario JSON file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the invariant suite and print a pass/fail table")
    p.add_argument("--filter", default=None, help="only run checks whose name contains this")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="run a scenario over a parameter grid")
    p.add_argument("config", help="scenario JSON file with a 'sweep' section")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
