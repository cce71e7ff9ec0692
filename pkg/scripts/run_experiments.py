"""Run every config under scripts/configs through the CLI and write CSVs.

Usage: python3 scripts/run_experiments.py [--out DIR]
"""
import argparse
from pathlib import Path

from jkwalk.cli import main as cli_main

HERE = Path(__file__).parent
JOBS = [
    ("compare", "fig2_0"), ("compare", "fig2_40"), ("compare", "fig2_50"), ("compare", "fig2_80"),
    ("compare", "fig3_0"), ("compare", "fig3_40"), ("compare", "fig3_50"), ("compare", "fig3_80"),
    ("scaled-dist", "fig4_0"), ("scaled-dist", "fig4_40"), ("scaled-dist", "fig4_50"),
    ("scaled-dist", "fig4_80"), ("scaled-dist", "halfline"),
    ("compare", "reduction"), ("compare", "residue"),
    ("genfun-check", "genfun"), ("tree-check", "tree_3"), ("tree-check", "tree_2_3"),
    ("theory", "fig2_80"),
]
STATUS = {0: "ok", 1: "invalid", 2: "tolerance exceeded"}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for cmd, name in JOBS:
        dest = out / f"{cmd}_{name}.csv"
        code = cli_main([cmd, "--config", str(HERE / "configs" / f"{name}.json"), "--out", str(dest)])
        print(f"{cmd:13s} {name:10s} exit {code} ({STATUS.get(code, '?')})  -> {dest}")


if __name__ == "__main__":
    main()
