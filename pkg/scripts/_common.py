"""Shared helpers for the experiment drivers in this directory."""

import argparse
import pathlib
import sys

from rescluster.simlab.cli import main

COMBOS = [("gauss", "gauss"), ("t", "t"), ("huber", "huber"), ("huber", "tukey")]


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--outdir", default="results")
    p.add_argument("--mc", type=int, default=None, help="override the Monte Carlo count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    return p


def run(experiment: str, tag: str, extra: list[str], opts) -> int:
    out = pathlib.Path(opts.outdir)
    out.mkdir(parents=True, exist_ok=True)
    argv = [experiment, *extra, "--seed", str(opts.seed), "--workers", str(opts.workers),
            "--out", str(out / f"{experiment}_{tag}.jsonl")]
    if opts.mc is not None:
        argv += ["--mc", str(opts.mc)]
    print(f"$ rescluster {' '.join(argv)}", file=sys.stderr)
    return main(argv)
