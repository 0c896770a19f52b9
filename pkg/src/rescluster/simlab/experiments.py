"""Monte Carlo experiment recipes on the synthetic benchmarks.

Every replicate is a pure function of ``(config, condition index, replicate
index)``, so results do not depend on the worker count or completion order.
Wall-clock timings are collected separately from the deterministic results.
"""

from __future__ import annotations

import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..core import Dataset, ResClusterError
from ..criteria import score_candidate
from ..datagen import ThreeBlobSpec, gen_t3_pair, gen_three_blobs, place_single_outlier, replace_outliers
from ..em import DegenerateCluster, em_fit
from ..enumeration import AllCandidatesInvalid, candidate_seed, hard_cluster, score_range, select_k
from .config import ConfigError, ExperimentConfig, replicate_seed

log = logging.getLogger(__name__)

T3_SEPARATION = 15.0


@dataclass(frozen=True)
class Task:
    cfg: ExperimentConfig
    cond_index: int
    condition: dict
    replicate: int


@dataclass(frozen=True)
class ReplicateResult:
    cond_index: int
    condition: dict
    replicate: int
    k_hat: dict  # penalty -> selected l, or None if the replicate failed
    per_l_scores: dict  # penalty -> list of scores (None for invalid candidates)
    runtime_s: float
    error: str = ""


@dataclass(frozen=True)
class DetectionRecord:
    condition: dict
    penalty: str
    p_detect: float
    k_hat_histogram: dict
    mc_runs: int
    mean_runtime_s: float

    def __post_init__(self):
        if sum(self.k_hat_histogram.values()) != self.mc_runs:
            raise ValueError("histogram counts must sum to the number of runs")


@dataclass
class ExperimentResult:
    cfg: ExperimentConfig
    replicates: list[ReplicateResult] = field(default_factory=list)
    records: list[DetectionRecord] = field(default_factory=list)
    tables: list[dict] = field(default_factory=list)  # deterministic extra rows
    timings: dict = field(default_factory=dict)  # wall-clock data, kept out of the records

    def detection(self, penalty: str | None = None, **condition) -> DetectionRecord:
        for rec in self.records:
            if (penalty is None or rec.penalty == penalty) and all(rec.condition.get(k) == v for k, v in condition.items()):
                return rec
        raise KeyError(f"no record for penalty={penalty} condition={condition}")


# -- data for one replicate ---------------------------------------------------


def _nk_key(nk):
    return list(nk) if isinstance(nk, tuple) else nk


def sensitivity_grid(step: float, half_width: float = 20.0) -> np.ndarray:
    """Grid positions symmetric about the origin; a step wider than the range leaves only the centre."""
    k = int(np.floor(half_width / step + 1e-9))
    return np.arange(-k, k + 1) * step


def conditions(cfg: ExperimentConfig) -> list[dict]:
    exp = cfg.experiment
    if exp in ("breakdown", "pdet", "enumerate"):
        return [{"nk": _nk_key(nk), "eps": e} for nk in cfg.n_per_cluster for e in cfg.eps_grid]
    if exp == "sensitivity":
        axis = sensitivity_grid(cfg.grid_step, cfg.grid_half_width)
        nk = _nk_key(cfg.n_per_cluster[0])
        return [{"nk": nk, "x": float(a), "y": float(b)} for b in axis for a in axis]
    if exp == "convergence":
        return [{"nk": _nk_key(nk), "eps": cfg.eps_grid[0]} for nk in cfg.n_per_cluster]
    if exp == "runtime":
        if cfg.sweep == "n":
            return [{"nk": _nk_key(nk), "n": 3 * nk if isinstance(nk, int) else sum(nk)} for nk in cfg.n_per_cluster]
        nk = cfg.n_per_cluster[0]
        if not isinstance(nk, int):
            raise ConfigError("the r sweep needs a single N_k")
        return [{"nk": nk, "r": int(r)} for r in cfg.dims]
    raise ConfigError(f"no recipe for experiment {exp!r}")


def true_k(cfg: ExperimentConfig) -> int:
    return 2 if (cfg.experiment == "runtime" and cfg.sweep == "r") else 3


def make_data(cfg: ExperimentConfig, condition: dict, seed: int) -> Dataset:
    nk = condition["nk"]
    nk = tuple(nk) if isinstance(nk, list) else nk
    if "r" in condition:
        return gen_t3_pair(condition["r"], nk, T3_SEPARATION, seed)[0]
    data, _ = gen_three_blobs(ThreeBlobSpec(nk), seed)
    if "x" in condition:
        return place_single_outlier(data, (condition["x"], condition["y"]), seed)
    if condition.get("eps", 0.0) > 0:
        data, _ = replace_outliers(data, condition["eps"], seed=seed)
    return data


# -- replicates ---------------------------------------------------------------


def _scores_to_json(scores):
    return [float(s.score) if s.valid else None for s in scores]


def run_replicate(task: Task) -> ReplicateResult:
    cfg = task.cfg
    seed = replicate_seed(cfg.seed, cfg.experiment, task.cond_index, task.replicate)
    t0 = time.perf_counter()
    try:
        data = make_data(cfg, task.condition, seed)
        em_loss, bic_loss = cfg.losses(data.dim)
        l_max = min(cfg.l_max, data.n)
        out = score_range(data, cfg.l_min, l_max, em_loss, bic_loss, cfg.penalties, cfg.em.with_seed(seed))
    except ResClusterError as exc:
        log.warning("replicate %d of condition %s failed: %s", task.replicate, task.condition, exc)
        none = {p: None for p in cfg.penalties}
        return ReplicateResult(task.cond_index, task.condition, task.replicate, none, {p: [] for p in cfg.penalties},
                               time.perf_counter() - t0, str(exc))
    k_hat = {}
    for p, scores in out.items():
        try:
            k_hat[p] = select_k(scores)
        except AllCandidatesInvalid:
            k_hat[p] = None
    per_l = {p: _scores_to_json(s) for p, s in out.items()}
    return ReplicateResult(task.cond_index, task.condition, task.replicate, k_hat, per_l, time.perf_counter() - t0)


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _run_replicates(cfg: ExperimentConfig) -> list[ReplicateResult]:
    conds = conditions(cfg)
    tasks = [Task(cfg, i, c, r) for i, c in enumerate(conds) for r in range(cfg.mc_runs)]
    results = _map(run_replicate, tasks, cfg.workers)
    return sorted(results, key=lambda x: (x.cond_index, x.replicate))


def aggregate(cfg: ExperimentConfig, reps: list[ReplicateResult]) -> list[DetectionRecord]:
    k_true = true_k(cfg)
    by_cond: dict[int, list[ReplicateResult]] = {}
    for r in reps:
        by_cond.setdefault(r.cond_index, []).append(r)
    records = []
    for idx in sorted(by_cond):
        group = by_cond[idx]
        mean_rt = float(np.mean([g.runtime_s for g in group]))
        for p in cfg.penalties:
            hist = Counter("none" if g.k_hat[p] is None else str(g.k_hat[p]) for g in group)
            hist = dict(sorted(hist.items(), key=lambda kv: (kv[0] == "none", kv[0].zfill(4))))
            p_detect = hist.get(str(k_true), 0) / len(group)
            records.append(DetectionRecord(group[0].condition, p, p_detect, hist, len(group), mean_rt))
    return records


def _timings(reps: list[ReplicateResult]) -> dict:
    return {"total_replicate_s": float(sum(r.runtime_s for r in reps))}


def _detection_experiment(cfg: ExperimentConfig, expected: str) -> ExperimentResult:
    if cfg.experiment != expected:
        raise ConfigError(f"expected a {expected} config, got {cfg.experiment}")
    reps = _run_replicates(cfg)
    records = aggregate(cfg, reps)
    timings = _timings(reps)
    timings["mean_runtime_s"] = {str(i): r.mean_runtime_s for i, r in enumerate(records)}
    return ExperimentResult(cfg, reps, records, [], timings)


def run_breakdown(cfg: ExperimentConfig) -> ExperimentResult:
    """Detection probability against the replacement-outlier fraction."""
    return _detection_experiment(cfg, "breakdown")


def run_pdet_vs_n(cfg: ExperimentConfig) -> ExperimentResult:
    """Detection probability over a sweep of cluster sizes."""
    return _detection_experiment(cfg, "pdet")


def run_sensitivity(cfg: ExperimentConfig) -> ExperimentResult:
    """Detection probability as a function of one outlier's position."""
    return _detection_experiment(cfg, "sensitivity")


def run_enumerate(cfg: ExperimentConfig) -> ExperimentResult:
    return _detection_experiment(cfg, "enumerate")


def run_convergence(cfg: ExperimentConfig) -> ExperimentResult:
    """All three criteria on the same fits, for each N_k in the sweep."""
    if cfg.experiment != "convergence":
        raise ConfigError(f"expected a convergence config, got {cfg.experiment}")
    cfg = cfg.with_(penalty="all")
    reps = _run_replicates(cfg)
    records = aggregate(cfg, reps)
    tables = []
    for idx, cond in enumerate(conditions(cfg)):
        group = [r for r in reps if r.cond_index == idx and not r.error]
        ls = list(range(cfg.l_min, cfg.l_min + max((len(g.per_l_scores["finite"]) for g in group), default=0)))
        mean_curves = {}
        for p in cfg.penalties:
            cols = np.array([[np.nan if v is None else v for v in g.per_l_scores[p]] for g in group], dtype=float)
            mean_curves[p] = [None if np.all(np.isnan(c)) else float(np.nanmean(c)) for c in cols.T] if len(group) else []
        agree = sum(1 for g in group if len(set(g.k_hat.values())) == 1 and g.k_hat["finite"] == true_k(cfg))
        tables.append({"condition": cond, "l": ls, "mean_scores": mean_curves, "all_select_true_k": agree,
                       "max_rel_gap_finite_asymptotic": [_max_rel_gap(g) for g in group]})
    return ExperimentResult(cfg, reps, records, tables, _timings(reps))


def _max_rel_gap(rep: ReplicateResult):
    gaps = [abs(f - a) / abs(a) for f, a in zip(rep.per_l_scores["finite"], rep.per_l_scores["asymptotic"])
            if f is not None and a is not None and a != 0]
    return max(gaps) if gaps else None


# -- runtime ------------------------------------------------------------------


def _time_point(cfg: ExperimentConfig, cond_index: int, condition: dict, repeat: int):
    """Seconds for the shared EM fits and for each criterion's scoring pass."""
    seed = replicate_seed(cfg.seed, cfg.experiment, cond_index, repeat)
    data = make_data(cfg, condition, seed)
    em_loss, bic_loss = cfg.losses(data.dim)
    em_cfg = cfg.em.with_seed(seed)
    t_em = 0.0
    t_score = {p: 0.0 for p in cfg.penalties}
    scores = {p: [] for p in cfg.penalties}
    for l in range(cfg.l_min, min(cfg.l_max, data.n) + 1):
        t0 = time.perf_counter()
        try:
            est = em_fit(data, l, em_loss, em_cfg.with_seed(candidate_seed(seed, l)))
        except DegenerateCluster:
            t_em += time.perf_counter() - t0
            continue
        part = hard_cluster(est)
        t_em += time.perf_counter() - t0
        for p in cfg.penalties:
            t1 = time.perf_counter()
            scores[p].append(score_candidate(data, est, part, bic_loss, p))
            t_score[p] += time.perf_counter() - t1
    k_hat = {}
    for p in cfg.penalties:
        try:
            k_hat[p] = select_k(scores[p])
        except AllCandidatesInvalid:
            k_hat[p] = None
    return t_em, t_score, k_hat, {p: _scores_to_json(s) for p, s in scores.items()}


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def run_runtime(cfg: ExperimentConfig) -> ExperimentResult:
    """Runtime scaling over N (three-blob data) or r (t_3 pairs).

    The EM fits are shared between criteria; a criterion's total time is the
    fit time plus its own scoring time, averaged over ``max(mc_runs, 3)``
    repetitions. Timings and slopes go to ``timings`` only.
    """
    if cfg.experiment != "runtime":
        raise ConfigError(f"expected a runtime config, got {cfg.experiment}")
    cfg = cfg.with_(penalty="all")
    reps_per_point = max(cfg.mc_runs, 3)
    conds = conditions(cfg)
    replicates, points = [], []
    for idx, cond in enumerate(conds):
        totals = {p: [] for p in cfg.penalties}
        for rep in range(reps_per_point):
            t_em, t_score, k_hat, per_l = _time_point(cfg, idx, cond, rep)
            for p in cfg.penalties:
                totals[p].append(t_em + t_score[p])
            replicates.append(ReplicateResult(idx, cond, rep, k_hat, per_l, t_em + sum(t_score.values())))
        points.append({"condition": cond, "mean_s": {p: float(np.mean(v)) for p, v in totals.items()}})
    axis = "n" if cfg.sweep == "n" else "r"
    xs = [pt["condition"][axis] for pt in points]
    slopes = {p: loglog_slope(xs, [pt["mean_s"][p] for pt in points]) for p in cfg.penalties} if len(xs) > 1 else {}
    records = aggregate(cfg, replicates)
    return ExperimentResult(cfg, replicates, records, [], {"axis": axis, "points": points, "slopes": slopes})


RUNNERS = {
    "enumerate": run_enumerate,
    "breakdown": run_breakdown,
    "sensitivity": run_sensitivity,
    "convergence": run_convergence,
    "runtime": run_runtime,
    "pdet": run_pdet_vs_n,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[cfg.experiment](cfg)
