"""Command-line runner: ``toa-lab <experiment> [--config F] [--override k=v] [--out DIR]``.

Exit status: 0 success, 2 configuration error, 3 a built-in check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .experiments import CRITERIA, EXPERIMENTS, ConfigError, Outcome, resolve, validate

EXIT_OK, EXIT_CONFIG, EXIT_TOLERANCE = 0, 2, 3


def parse_config_text(text: str) -> dict:
    """JSON object, or ``key = value`` lines with ``#`` comments."""
    stripped = text.strip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
        if not isinstance(data, dict):
            raise ConfigError({"<config>": "JSON config must be an object"})
        return {str(k): (",".join(map(str, v)) if isinstance(v, list) else v) for k, v in data.items()}
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError({f"line {n}": f"expected key = value, got {raw.strip()!r}"})
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def parse_overrides(items: list[str]) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError({item: "override must look like key=value"})
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "item"):  # numpy scalar
        return _cell(v.item())
    return str(v)


def write_outputs(out_dir: Path, name: str, params: dict, outcome: Outcome, warnings: list[str], elapsed: float) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "data.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(outcome.columns)
        for row in outcome.rows:
            w.writerow([_cell(v) for v in row])
    manifest = {
        "experiment": name,
        "version": __version__,
        "config": params,
        "checks": [
            {"name": c.name, "value": c.value, "target": c.target, "passed": c.passed} for c in outcome.checks
        ],
        "passed": outcome.passed,
        "warnings": warnings,
        "notes": outcome.notes,
        "columns": outcome.columns,
        "elapsed_seconds": round(elapsed, 3),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    (out_dir / "summary.txt").write_text(summary(name, outcome, warnings) + "\n")


def summary(name: str, outcome: Outcome, warnings: list[str]) -> str:
    lines = [f"{name}: {'PASS' if outcome.passed else 'FAIL'} ({len(outcome.rows)} rows)"]
    lines += [f"  {c.line()}" for c in outcome.checks]
    lines += [f"  warning: {w}" for w in warnings]
    lines += [f"  note: {n}" for n in outcome.notes]
    return "\n".join(lines)


def _set_threads(n: int | None) -> None:
    if n is None:
        return
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    if not 1 <= n <= limit:
        raise ConfigError({"--threads": f"must lie in [1, {limit}]"})
    numba.set_num_threads(n)


def run_one(name: str, given: dict, out_dir: Path | None, validate_only: bool) -> int:
    exp = EXPERIMENTS[name]
    params = resolve(exp, given)
    warnings = validate(exp, params)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    if validate_only:
        print(f"{name}: configuration valid")
        return EXIT_OK
    start = time.perf_counter()
    outcome = exp.runner(params)
    elapsed = time.perf_counter() - start
    if out_dir is not None:
        write_outputs(out_dir, name, params, outcome, warnings, elapsed)
    print(summary(name, outcome, warnings))
    if not outcome.passed:
        failed = ", ".join(c.name for c in outcome.checks if not c.passed)
        print(f"{name}: tolerance failure: {failed}", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toa-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value text file or JSON object")
    common.add_argument("--out", type=Path, help="output directory (nothing written when omitted)")
    common.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    common.add_argument("--threads", type=int, help="worker threads for the wave-equation kernels")
    common.add_argument("--validate-only", action="store_true", help="check the configuration and stop")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, exp in EXPERIMENTS.items():
        sub.add_parser(name, parents=[common], help=exp.summary, description=exp.summary)
    crit = sub.add_parser("criterion", parents=[common], help="run the experiments behind one acceptance criterion")
    crit.add_argument("number", type=int, choices=sorted(CRITERIA))
    sub.add_parser("list", help="list experiments and their default parameters")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for name, exp in EXPERIMENTS.items():
            print(f"{name}: {exp.summary}")
            for k, v in exp.defaults.items():
                print(f"    {k} = {v}")
        return EXIT_OK
    try:
        _set_threads(args.threads)
        given = parse_config_text(args.config.read_text()) if args.config else {}
        given.update(parse_overrides(args.override))
        if args.command == "criterion":
            names = CRITERIA[args.number]
            if given:
                raise ConfigError({k: "overrides are not accepted for acceptance runs" for k in given})
            status = EXIT_OK
            for name in names:
                out = args.out / name if args.out else None
                status = max(status, run_one(name, {}, out, args.validate_only))
            return status
        return run_one(args.command, given, args.out, args.validate_only)
    except ConfigError as err:
        for key, msg in err.problems.items():
            print(f"config error: {key}: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
