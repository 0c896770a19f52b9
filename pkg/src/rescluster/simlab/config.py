"""Experiment configuration and replicate seeding."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace

from ..core import ResClusterError
from ..criteria import PENALTIES
from ..em import EmConfig
from ..losses import DEFAULT_NU, DEFAULT_QH, DEFAULT_TUKEY_C, LossModel

EXPERIMENTS = ("enumerate", "breakdown", "sensitivity", "convergence", "runtime", "pdet")
EM_LOSSES = ("gauss", "t", "huber")
BIC_LOSSES = ("gauss", "t", "huber", "tukey")
PENALTY_CHOICES = PENALTIES + ("all",)

DEFAULT_EPS_GRID = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3)
DEFAULT_MC = {"breakdown": 100, "pdet": 100, "sensitivity": 50, "convergence": 20, "runtime": 3, "enumerate": 1}
DEFAULT_NK = {"breakdown": (250,), "pdet": (10, 20, 50, 100, 250), "sensitivity": (50,),
              "convergence": (5, 10, 50, 500), "runtime": (200, 400, 800, 1600), "enumerate": (250,)}


class ConfigError(ResClusterError, ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines an experiment's machine-readable output.

    ``n_per_cluster`` holds one entry per sweep point; an entry is either a
    single N_k or a triple of per-cluster sizes. ``workers`` and
    ``output_path`` do not affect results and are excluded from the hash.
    """

    experiment: str
    em_loss: str = "huber"
    bic_loss: str = "huber"
    penalty: str = "finite"
    n_per_cluster: tuple = ()
    eps_grid: tuple[float, ...] = ()
    mc_runs: int = 0
    seed: int = 0
    l_min: int = 1
    l_max: int = 7
    grid_step: float = 5.0
    grid_half_width: float = 20.0
    sweep: str = "n"
    dims: tuple[int, ...] = (2, 4, 8)
    qh: float = DEFAULT_QH
    tukey_c: float = DEFAULT_TUKEY_C
    nu: float = DEFAULT_NU
    em: EmConfig = field(default_factory=EmConfig)
    output_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.em_loss not in EM_LOSSES:
            raise ConfigError(f"EM loss must be one of {EM_LOSSES}, got {self.em_loss!r}")
        if self.bic_loss not in BIC_LOSSES:
            raise ConfigError(f"BIC loss must be one of {BIC_LOSSES}, got {self.bic_loss!r}")
        if self.penalty not in PENALTY_CHOICES:
            raise ConfigError(f"penalty must be one of {PENALTY_CHOICES}, got {self.penalty!r}")
        nk = self.n_per_cluster or DEFAULT_NK[self.experiment]
        nk = tuple(_size_entry(v) for v in nk)
        eps = tuple(float(e) for e in (self.eps_grid or (DEFAULT_EPS_GRID if self.experiment == "breakdown" else (0.0,))))
        if any(not (0.0 <= e < 1.0) for e in eps):
            raise ConfigError("eps values must lie in [0, 1)")
        mc = self.mc_runs or DEFAULT_MC[self.experiment]
        if mc < 1:
            raise ConfigError("mc_runs must be at least 1")
        if not (1 <= self.l_min <= self.l_max):
            raise ConfigError(f"need 1 <= lmin <= lmax, got {self.l_min}, {self.l_max}")
        if self.grid_step <= 0:
            raise ConfigError("grid step must be positive")
        if self.sweep not in ("n", "r"):
            raise ConfigError("runtime sweep must be 'n' or 'r'")
        if any(d < 1 for d in self.dims):
            raise ConfigError("dimensions must be positive")
        if not (0.0 < self.qh < 1.0) or self.tukey_c <= 0 or self.nu <= 0:
            raise ConfigError("need 0 < qH < 1, tukey-c > 0 and nu > 0")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        object.__setattr__(self, "n_per_cluster", nk)
        object.__setattr__(self, "eps_grid", eps)
        object.__setattr__(self, "mc_runs", int(mc))

    @property
    def penalties(self) -> tuple[str, ...]:
        return PENALTIES if self.penalty == "all" else (self.penalty,)

    def losses(self, dim: int) -> tuple[LossModel, LossModel]:
        kw = dict(qh=self.qh, tukey_c=self.tukey_c, nu=self.nu)
        return LossModel.from_name(self.em_loss, dim, **kw), LossModel.from_name(self.bic_loss, dim, **kw)

    def canonical(self) -> dict:
        d = asdict(self)
        d.pop("output_path")
        d.pop("workers")
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, default=list).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


def _size_entry(v):
    if isinstance(v, (tuple, list)):
        if len(v) != 3 or any(int(x) < 1 for x in v):
            raise ConfigError(f"imbalanced sizes need three positive counts, got {v!r}")
        return tuple(int(x) for x in v)
    if int(v) < 1:
        raise ConfigError(f"N_k must be positive, got {v!r}")
    return int(v)


def replicate_seed(master: int, tag: str, condition: int, replicate: int) -> int:
    """64-bit seed for one replicate, independent of scheduling order."""
    msg = f"{master}|{tag}|{condition}|{replicate}".encode()
    return int.from_bytes(hashlib.blake2b(msg, digest_size=8).digest(), "little")
