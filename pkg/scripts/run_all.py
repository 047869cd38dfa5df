#!/usr/bin/env python3
"""Run every bundled experiment config and collect the artifacts under out/.

Usage: python scripts/run_all.py [--out-dir out]
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from noonsim.cli import main as noonsim_main

CONFIG_DIR = Path(__file__).parent / "configs"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out")
    args = parser.parse_args()

    failures = 0
    for config in sorted(CONFIG_DIR.glob("*.json")):
        print(f"=== {config.name} ===")
        rc = noonsim_main(["run", str(config), "--out-dir", args.out_dir])
        if rc != 0:
            print(f"FAILED with exit code {rc}", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
