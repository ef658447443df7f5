"""Shared helper: load a shipped config, apply overrides, run it."""
import json
import sys
from pathlib import Path

from debroglie.config import set_dotted
from debroglie.io import plain
from debroglie.runner import run

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run_config(name: str, output: str | None, overrides: dict | None = None) -> dict:
    cfg = json.loads((CONFIGS / name).read_text())
    for key, value in (overrides or {}).items():
        set_dotted(cfg, key, value)
    if output:
        cfg["output"] = output
    code, metrics = run(cfg)
    if code:
        print(json.dumps(plain(metrics), indent=2), file=sys.stderr)
        sys.exit(code)
    return metrics
