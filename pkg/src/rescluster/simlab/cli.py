"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 every
candidate model invalid.
"""

from __future__ import annotations

import argparse
import logging
import sys

from ..core import ResClusterError
from ..em import EmConfig
from ..enumeration import AllCandidatesInvalid, score_range, select_k
from .config import BIC_LOSSES, EM_LOSSES, EXPERIMENTS, PENALTY_CHOICES, ConfigError, ExperimentConfig
from .experiments import ExperimentResult, ReplicateResult, run_experiment
from .ingest import ingest_csv
from .output import summary_text, write_results

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INVALID = 0, 2, 3, 4

log = logging.getLogger("rescluster")


def _nk(text: str):
    parts = [p for p in text.split(",") if p.strip()]
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N_k or N1,N2,N3, got {text!r}") from None
    if len(vals) == 1:
        return vals[0]
    if len(vals) == 3:
        return tuple(vals)
    raise argparse.ArgumentTypeError(f"expected one or three sizes, got {text!r}")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--em-loss", choices=[c for c in EM_LOSSES], default="huber")
    p.add_argument("--bic-loss", choices=list(BIC_LOSSES), default=None,
                   help="loss used in the criterion (default: same as --em-loss)")
    p.add_argument("--penalty", choices=list(PENALTY_CHOICES), default="finite")
    p.add_argument("--lmin", type=int, default=1)
    p.add_argument("--lmax", type=int, default=None, help="largest candidate (default 7 for experiments)")
    p.add_argument("--nk", type=_nk, action="append", help="samples per cluster; repeat for sweeps; N1,N2,N3 for imbalance")
    p.add_argument("--eps", type=float, action="append", help="outlier fraction; repeatable")
    p.add_argument("--mc", type=int, default=0, help="Monte Carlo runs per condition")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--qh", type=float, default=0.8, help="chi-square quantile for Huber's threshold")
    p.add_argument("--tukey-c", type=float, default=4.685)
    p.add_argument("--nu", type=float, default=3.0, help="t degrees of freedom")
    p.add_argument("--out", default=None, help="JSON-lines result path; a .summary.txt is written next to it")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rescluster", description="Robust Bayesian cluster enumeration.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        _common(p)
        if name == "enumerate":
            p.add_argument("--input", help="CSV file with one observation per row (omit for synthetic data)")
            p.add_argument("--delimiter", default=",")
            p.add_argument("--header", action="store_true", help="skip the first line")
        if name == "sensitivity":
            p.add_argument("--grid-step", type=float, default=5.0)
        if name == "runtime":
            p.add_argument("--sweep", choices=["n", "r"], default="n")
            p.add_argument("--dims", type=int, action="append", help="dimensions for the r sweep; repeatable")
    return parser


def config_from_args(args) -> ExperimentConfig:
    try:
        em = EmConfig(max_iters=args.max_iters, tol=args.tol, restarts=args.restarts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    kw = dict(
        experiment=args.experiment, em_loss=args.em_loss, bic_loss=args.bic_loss or args.em_loss,
        penalty=args.penalty, n_per_cluster=tuple(args.nk or ()), eps_grid=tuple(args.eps or ()),
        mc_runs=args.mc, seed=args.seed, l_min=args.lmin, l_max=args.lmax if args.lmax is not None else 7,
        qh=args.qh, tukey_c=args.tukey_c, nu=args.nu, em=em, output_path=args.out, workers=args.workers,
    )
    if args.experiment == "sensitivity":
        kw["grid_step"] = args.grid_step
    if args.experiment == "runtime":
        kw["sweep"] = args.sweep
        if args.dims:
            kw["dims"] = tuple(args.dims)
    return ExperimentConfig(**kw)


def _enumerate_file(cfg: ExperimentConfig, args) -> ExperimentResult:
    data = ingest_csv(args.input, args.delimiter, args.header)
    if cfg.l_max > data.n:
        raise ConfigError(f"--lmax {cfg.l_max} exceeds the number of observations ({data.n})")
    em_loss, bic_loss = cfg.losses(data.dim)
    out = score_range(data, cfg.l_min, cfg.l_max, em_loss, bic_loss, cfg.penalties, cfg.em.with_seed(cfg.seed))
    k_hat = {}
    for p, scores in out.items():
        try:
            k_hat[p] = select_k(scores)
        except AllCandidatesInvalid:
            k_hat[p] = None
    per_l = {p: [s.score if s.valid else None for s in v] for p, v in out.items()}
    cond = {"input": str(args.input), "n": data.n, "r": data.dim}
    return ExperimentResult(cfg, [ReplicateResult(0, cond, 0, k_hat, per_l, 0.0)])


def _print_scores(res: ExperimentResult):
    rep = res.replicates[0]
    pens = list(rep.per_l_scores)
    print("l    " + " ".join(f"{p:>14}" for p in pens))
    n_l = max(len(v) for v in rep.per_l_scores.values())
    for i in range(n_l):
        l = res.cfg.l_min + i
        cells = []
        for p in pens:
            v = rep.per_l_scores[p][i]
            cells.append(f"{'invalid':>14}" if v is None else f"{v:14.4f}")
        print(f"{l:<4} " + " ".join(cells))
    for p in pens:
        k = rep.k_hat[p]
        print(f"K_hat ({p}): {'none (all candidates invalid)' if k is None else k}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.experiment == "enumerate" and args.input is not None and args.lmax is None:
            raise ConfigError("enumerate --input needs --lmax")
        cfg = config_from_args(args)
        if args.experiment == "enumerate" and args.input is not None:
            res = _enumerate_file(cfg, args)
            _print_scores(res)
            if args.out:
                write_results(res, args.out)
            if all(k is None for k in res.replicates[0].k_hat.values()):
                return EXIT_INVALID
            return EXIT_OK
        res = run_experiment(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResClusterError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.out:
        path, summary = write_results(res, args.out)
        log.info("wrote %s and %s", path, summary)
    sys.stdout.write(summary_text(res))
    if res.replicates and all(all(k is None for k in r.k_hat.values()) for r in res.replicates):
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
