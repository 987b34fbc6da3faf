"""Command-line front end.

Subcommands:
  toalab run <name> --config <path> [--out <dir>] [--seed <u64>]
  toalab list
  toalab validate --config <path>

Exit codes: 0 all checks passed, 1 a physics check failed, 2 bad usage or
configuration, 3 numerical stability abort.

Outputs land in <out>/<name>/: one series-<label>.csv per recorded
series, summary.json with the measured scalars and check results, and
manifest.json echoing the fully resolved configuration.  Apart from the
timing fields in the manifest, reruns with identical config and seed are
byte-identical.  The output root defaults to ./runs and can be overridden
with --out or the TOALAB_OUT environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from .experiments import ConfigError, EXPERIMENTS, catalog, default_config, \
    validate_config, run_experiment
from .grid import GridError
from .propagate import PropagationError
from .protocols import ProtocolError
from .toa import ToaError


def _fmt(value):
    """Repr-faithful, locale-free scalar formatting for CSV cells."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _json_dump(path, payload):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            loaded = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(loaded, dict):
        raise ConfigError("top-level config must be a JSON object")
    return loaded


def _cmd_list(_args):
    width = max(len(name) for name, _, _ in catalog())
    for name, description, claim in catalog():
        print(f"{name:<{width}}  {description}")
        print(f"{'':<{width}}  claim: {claim}")
    return 0


def _cmd_validate(args):
    loaded = _load_config(args.config)
    name = loaded.pop("experiment", None)
    if name is None:
        raise ConfigError("config must carry an 'experiment' key for validation")
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}")
    validate_config(loaded, default_config(name))
    print(f"ok: valid configuration for {name}")
    return 0


def _cmd_run(args):
    name = args.name
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}")
    loaded = _load_config(args.config)
    declared = loaded.pop("experiment", name)
    if declared != name:
        raise ConfigError(
            f"config declares experiment {declared!r} but {name!r} was requested")
    out_root = args.out or os.environ.get("TOALAB_OUT", "runs")
    out_dir = os.path.join(out_root, name)
    os.makedirs(out_dir, exist_ok=True)

    started = time.time()
    result = run_experiment(name, loaded, seed=args.seed)
    elapsed = time.time() - started

    for label, (header, rows) in sorted(result["series"].items()):
        _write_csv(os.path.join(out_dir, f"series-{label}.csv"), header, rows)
    summary = {
        "experiment": name,
        "passed": result["passed"],
        "checks": result["checks"],
        "summary": result["summary"],
    }
    _json_dump(os.path.join(out_dir, "summary.json"), summary)
    manifest = {
        "experiment": name,
        "version": __version__,
        "seed": args.seed,
        "config": result["config"],
        "series": sorted(result["series"]),
        "checks": result["checks"],
        "passed": result["passed"],
        "wall_time_seconds": elapsed,
    }
    _json_dump(os.path.join(out_dir, "manifest.json"), manifest)

    for chk in result["checks"]:
        state = "PASS" if chk["passed"] else "FAIL"
        print(f"[{state}] {name}: {chk['name']} value={chk['value']!r} "
              f"target={chk['target']!r} tol={chk['tolerance']!r}")
    print(f"wrote {out_dir} ({elapsed:.1f}s)")
    return 0 if result["passed"] else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="toalab",
        description="Numerical experiments on quantum arrival-time measurement models")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one named experiment")
    p_run.add_argument("name", help="experiment name (see 'toalab list')")
    p_run.add_argument("--config", default=None, help="JSON config file")
    p_run.add_argument("--out", default=None, help="output root directory")
    p_run.add_argument("--seed", type=int, default=0, help="RNG seed")

    sub.add_parser("list", help="list available experiments")

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("--config", required=True, help="JSON config file")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    handlers = {"run": _cmd_run, "list": _cmd_list, "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PropagationError, ProtocolError, ToaError, GridError,
            FloatingPointError) as exc:
        print(f"stability abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
