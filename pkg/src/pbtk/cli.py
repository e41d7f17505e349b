"""Command line entry point: ``pbtk {pf,epf,dpb,gauss2d,verify-all,run}``.

Parameters come from an optional TOML or JSON config, overridden by flags.
The base tolerance is taken from ``--tol``, then ``PBTK_TOL``, then the
config ``tol`` key, then 1e-10.

Exit status: 0 when every check passes, 1 on any failed check, 2 on a
config or input error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from . import __version__
from .numkernel import TolerancePolicy
from .suites import DEFAULTS, SUITES, VERIFY_ALL_OVERRIDES, verify_all

COMMANDS = ("pf", "epf", "dpb", "gauss2d", "verify-all")
TOP_KEYS = {"command", "seed", "tol", "output", *DEFAULTS}
OUTPUT_KEYS = {"report", "csv_dir"}
DEFAULT_TOL = 1e-10


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config


def load_config(path: str | os.PathLike) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a table/object")
    validate_config(data)
    return data


def _is_num(v, integer=False) -> bool:
    if isinstance(v, bool):
        return False
    return isinstance(v, int) if integer else isinstance(v, (int, float))


def _check_type(where: str, value, default):
    """Numeric parameters accept a scalar or a non-empty list (sweeps)."""
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, str):
        ok = isinstance(value, str)
    else:
        integer = isinstance(default, int) or (isinstance(default, list) and all(isinstance(d, int) for d in default))
        if default is None:
            integer = False
        items = value if isinstance(value, list) else [value]
        ok = bool(items) and all(_is_num(v, integer) for v in items)
        if default is None and value is None:
            ok = True
    if not ok:
        kind = "boolean" if isinstance(default, bool) else "string" if isinstance(default, str) else "number or list of numbers"
        raise ConfigError(f"{where}: expected {kind}, got {value!r}")


def validate_config(data: dict) -> None:
    """Strict schema: unknown keys and wrong types are errors."""
    for key in data:
        if key not in TOP_KEYS:
            raise ConfigError(f"unknown key {key!r}; allowed: {sorted(TOP_KEYS)}")
    if "command" in data and data["command"] not in COMMANDS:
        raise ConfigError(f"command: expected one of {list(COMMANDS)}, got {data['command']!r}")
    if "seed" in data and (not isinstance(data["seed"], int) or isinstance(data["seed"], bool)):
        raise ConfigError(f"seed: expected an integer, got {data['seed']!r}")
    if "tol" in data:
        _check_tol("tol", data["tol"])
    out = data.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("output: expected a table")
    for key, value in out.items():
        if key not in OUTPUT_KEYS:
            raise ConfigError(f"output.{key}: unknown key; allowed: {sorted(OUTPUT_KEYS)}")
        if not isinstance(value, str):
            raise ConfigError(f"output.{key}: expected a path string")
    for section, defaults in DEFAULTS.items():
        block = data.get(section, {})
        if not isinstance(block, dict):
            raise ConfigError(f"{section}: expected a table")
        for key, value in block.items():
            if key not in defaults:
                raise ConfigError(f"{section}.{key}: unknown key; allowed: {sorted(defaults)}")
            _check_type(f"{section}.{key}", value, defaults[key])


def _check_tol(where: str, value) -> float:
    try:
        tol = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a positive number, got {value!r}") from None
    if not tol > 0 or tol != tol or tol == float("inf"):
        raise ConfigError(f"{where}: expected a positive finite number, got {value!r}")
    return tol


# ---------------------------------------------------------------------------
# outputs


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML or JSON config file (flags override it)")
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--csv-dir", help="write CSV series into this directory")
    p.add_argument("--tol", help="base relative tolerance (default 1e-10)")
    p.add_argument("--seed", type=int, help="random seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbtk", description="Numerical verification of pseudo-fermion and pseudo-boson identities.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pf", help="two-level pseudo-fermion model and model Hamiltonians")
    p.add_argument("--delta", type=float)
    p.add_argument("--omega", type=float, help="|omega|")
    p.add_argument("--theta", type=float)
    p.add_argument("--no-models", dest="models", action="store_false", default=None, help="skip the DG/GMM/MO instances")
    _add_common(p)

    p = sub.add_parser("epf", help="extended pseudo-fermions on M+1 levels")
    p.add_argument("--M", type=int, nargs="+")
    p.add_argument("--basis", choices=["standard", "random"])
    p.add_argument("--n-bases", type=int)
    p.add_argument("--kappa-max", type=float)
    _add_common(p)

    p = sub.add_parser("dpb", help="truncated pseudo-bosons and bi-coherent states")
    p.add_argument("--cutoff", type=int)
    p.add_argument("--similarity", choices=["random", "identity"])
    p.add_argument("--kappa", type=float, help="condition number of the random similarity")
    p.add_argument("--radius", type=float, help="quadrature radius (default: tail rule)")
    p.add_argument("--n-r", type=int)
    _add_common(p)

    p = sub.add_parser("gauss2d", help="two-dimensional non-Hermitian oscillator")
    p.add_argument("--epsilon", type=float, nargs="+")
    p.add_argument("--xi", type=int, nargs="+", choices=[1, -1])
    p.add_argument("--n-max", type=int)
    p.add_argument("--no-exact", dest="exact", action="store_false", default=None, help="float arithmetic for the annihilation checks")
    _add_common(p)

    p = sub.add_parser("verify-all", help="every suite with the full sweeps")
    _add_common(p)

    p = sub.add_parser("run", help="run the command named in a config file")
    p.add_argument("config", help="TOML or JSON config with a 'command' key")
    p.add_argument("--report")
    p.add_argument("--csv-dir")
    p.add_argument("--tol")
    p.add_argument("--seed", type=int)
    return parser


FLAG_KEYS = {
    "pf": ["delta", "omega", "theta", "models"],
    "epf": ["M", "basis", "n_bases", "kappa_max"],
    "dpb": ["cutoff", "similarity", "kappa", "radius", "n_r"],
    "gauss2d": ["epsilon", "xi", "n_max", "exact"],
}


def resolve(args: argparse.Namespace, env=os.environ) -> dict:
    """Merge defaults, config and flags into one run description."""
    cfg = load_config(args.config) if getattr(args, "config", None) else {}
    command = args.command
    if command == "run":
        command = cfg.get("command")
        if command is None:
            raise ConfigError(f"{args.config}: 'command' key is required for 'pbtk run'")
    elif "command" in cfg and cfg["command"] != command:
        raise ConfigError(f"config command {cfg['command']!r} conflicts with subcommand {command!r}")

    params = copy.deepcopy(DEFAULTS)
    if command == "verify-all":
        for section, over in VERIFY_ALL_OVERRIDES.items():
            params[section].update(copy.deepcopy(over))
    for section in DEFAULTS:
        params[section].update(copy.deepcopy(cfg.get(section, {})))
    if command in FLAG_KEYS:
        for key in FLAG_KEYS[command]:
            value = getattr(args, key, None)
            if value is not None:
                if isinstance(value, list) and len(value) == 1:
                    value = value[0]
                params[command][key] = value

    tol = DEFAULT_TOL
    if "tol" in cfg:
        tol = _check_tol("tol", cfg["tol"])
    if env.get("PBTK_TOL"):
        tol = _check_tol("PBTK_TOL", env["PBTK_TOL"])
    if args.tol is not None:
        tol = _check_tol("--tol", args.tol)

    out = cfg.get("output", {})
    return {
        "command": command,
        "params": params,
        "tol": tol,
        "seed": args.seed if args.seed is not None else cfg.get("seed", 0),
        "report": args.report if args.report is not None else out.get("report"),
        "csv_dir": args.csv_dir if args.csv_dir is not None else out.get("csv_dir"),
    }


def execute(run: dict):
    tol = TolerancePolicy(run["tol"])
    command = run["command"]
    if command == "verify-all":
        return verify_all(run["params"], tol, run["seed"])
    return SUITES[command](run["params"][command], tol, run["seed"])


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = resolve(args)
        report, series = execute(run)
    except ConfigError as exc:
        print(f"pbtk: config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, KeyError, TypeError) as exc:
        # invalid parameters surface from the numerical modules
        print(f"pbtk: input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    text = report.to_json() + "\n"
    if run["report"]:
        atomic_write(run["report"], text)
    if run["csv_dir"]:
        for name, (header, rows) in series.items():
            atomic_write(Path(run["csv_dir"]) / f"{name}.csv", csv_text(header, rows))
    s = report.summary()
    if run["report"] or run["csv_dir"]:
        print(f"{run['command']}: {s['passed']}/{s['total']} checks passed")
    else:
        sys.stdout.write(text)
    for e in report.failed:
        print(f"FAIL {e.check}: residual {e.residual:.3e} > tolerance {e.tolerance:.3e} {json.dumps(e.to_dict()['context'], sort_keys=True)}", file=sys.stderr)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0 if report.ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
