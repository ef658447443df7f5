"""Command line entry point.

    debroglie run CONFIG [--set key=value ...] [--output DIR]
    debroglie validate CONFIG [--set key=value ...]
    debroglie units --mass "40 amu" --gradient "1e9 Hz/cm"

Exit codes: 0 success, 2 invalid configuration, 3 numerical guard tripped.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import load_config, parse_si, set_dotted
from .errors import ConfigurationError
from .io import plain
from .runner import run, units_report, validate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _override(config: dict, items) -> dict:
    for item in items or ():
        key, sep, text = item.partition("=")
        if not sep or not key:
            raise ConfigurationError(f"--set: expected key=value, got {item!r}")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        set_dotted(config, key.strip(), value)
    return config


def _load(args) -> dict:
    config = _override(load_config(args.config), args.set)
    if getattr(args, "output", None):
        config["output"] = args.output
    return config


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="debroglie",
                                 description="Pulse synthesis and two-level wave-packet simulation.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="validate and execute a scenario config")
    r.add_argument("config")
    r.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a dotted config key (value parsed as JSON if possible)")
    r.add_argument("--output", help="output directory (overrides config 'output')")

    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("config")
    v.add_argument("--set", action="append", metavar="KEY=VALUE")

    u = sub.add_parser("units", help="natural length and time scales for SI inputs")
    u.add_argument("--mass", required=True, help='e.g. "40 amu"')
    u.add_argument("--gradient", required=True, help='cyclic frequency gradient, e.g. "1e9 Hz/cm"')
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "units":
            m = units_report(parse_si(args.mass, "mass", "--mass"),
                             parse_si(args.gradient, "gradient", "--gradient"))
            print(json.dumps(m, indent=2))
            return EXIT_OK
        config = _load(args)
    except (ConfigurationError, OSError) as exc:
        print(f"ERROR {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        findings = validate(config)
        for f in findings:
            print(f)
        if any(f.level == "error" for f in findings):
            return EXIT_CONFIG
        print("OK")
        return EXIT_OK

    code, metrics = run(config)
    if code == EXIT_OK:
        print(json.dumps(plain(metrics), indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
