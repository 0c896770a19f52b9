"""Loss functions of squared Mahalanobis distance and their derivatives.

Every model supplies ``rho(t)``, ``psi(t) = rho'(t)`` and ``eta(t) = psi'(t)``.
Gaussian, t and Huber are ML losses with ``rho = -ln g`` for a density
generator ``g``; Tukey's biweight has no density and can only be used to
score a fit, never to drive the E-step.

All normalization constants are kept in ``rho`` so criteria computed under
different losses share a common scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .core import ResClusterError

KINDS = ("gaussian", "t", "huber", "tukey")

DEFAULT_QH = 0.8
DEFAULT_TUKEY_C = 4.685
DEFAULT_NU = 3.0

LOG_2PI = math.log(2.0 * math.pi)


class NegativeDistance(ResClusterError, ValueError):
    pass


class NoDensityGenerator(ResClusterError, ValueError):
    pass


class QuantileOutOfRange(ResClusterError, ValueError):
    pass


class PoleInNormalization(ResClusterError, ValueError):
    pass


def chi2_cdf(x: float, dof: float) -> float:
    return float(stats.chi2.cdf(x, dof))


def huber_c_from_quantile(r: int, qh: float = DEFAULT_QH) -> float:
    """Huber threshold c with c^2 equal to the ``qh`` quantile of chi^2_r."""
    if not (0.0 < qh < 1.0):
        raise QuantileOutOfRange(f"qH must lie strictly between 0 and 1, got {qh}")
    return math.sqrt(float(stats.chi2.ppf(qh, r)))


def huber_consistency_b(r: int, c: float) -> float:
    """Fisher-consistency constant b = F_{r+2}(c^2) + (c^2/r)(1 - F_r(c^2))."""
    if c <= 0:
        raise ValueError("c must be positive")
    c2 = c * c
    # survival function keeps precision when c^2 is far in the tail
    return float(stats.chi2.cdf(c2, r + 2) + (c2 / r) * stats.chi2.sf(c2, r))


def huber_log_normalization(r: int, c: float, b: float) -> float:
    """ln A_H, the normalizing constant of Huber's density generator."""
    c2 = c * c
    gap = c2 - b * r
    if abs(gap) < 1e-10:
        raise PoleInNormalization(f"c^2 - b r = {gap:.3e} is too close to zero")
    s = r / 2.0
    x = c2 / (2.0 * b)
    # (2b)^{r/2} * lower incomplete gamma(r/2, x)
    log_core = s * math.log(2.0 * b) + special.gammaln(s) + math.log(special.gammainc(s, x))
    log_tail = math.log(2.0 * b) + r * math.log(c) - x - math.log(gap)
    log_integral = np.logaddexp(log_core, log_tail)
    return float(special.gammaln(s) - s * math.log(math.pi) - log_integral)


@dataclass(frozen=True)
class LossModel:
    """One of the four supported losses, fixed for a dimension ``dim``.

    Use the ``gaussian``/``student_t``/``huber``/``tukey`` constructors rather
    than building instances directly; they derive the dependent constants.
    """

    kind: str
    dim: int
    nu: float | None = None
    c: float | None = None
    b: float | None = None
    log_ah: float | None = None
    log_norm_t: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}; expected one of {KINDS}")
        if self.dim < 1:
            raise ValueError("dimension must be a positive integer")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def gaussian(cls, dim: int) -> "LossModel":
        return cls("gaussian", dim)

    @classmethod
    def student_t(cls, dim: int, nu: float = DEFAULT_NU) -> "LossModel":
        if nu <= 0:
            raise ValueError("nu must be positive")
        log_norm = (
            special.gammaln((nu + dim) / 2.0)
            - special.gammaln(nu / 2.0)
            - (dim / 2.0) * math.log(math.pi * nu)
        )
        return cls("t", dim, nu=float(nu), log_norm_t=float(log_norm))

    @classmethod
    def huber(cls, dim: int, qh: float = DEFAULT_QH, c: float | None = None) -> "LossModel":
        if c is None:
            c = huber_c_from_quantile(dim, qh)
        b = huber_consistency_b(dim, c)
        return cls("huber", dim, c=float(c), b=b, log_ah=huber_log_normalization(dim, c, b))

    @classmethod
    def tukey(cls, dim: int, c: float = DEFAULT_TUKEY_C) -> "LossModel":
        if c <= 0:
            raise ValueError("c must be positive")
        return cls("tukey", dim, c=float(c))

    @classmethod
    def from_name(cls, name: str, dim: int, *, qh=DEFAULT_QH, tukey_c=DEFAULT_TUKEY_C, nu=DEFAULT_NU):
        """Build a loss from a short CLI-style name (``gauss``, ``t``, ``huber``, ``tukey``)."""
        key = name.lower()
        if key in ("gauss", "gaussian"):
            return cls.gaussian(dim)
        if key == "t":
            return cls.student_t(dim, nu)
        if key == "huber":
            return cls.huber(dim, qh)
        if key == "tukey":
            return cls.tukey(dim, tukey_c)
        raise ValueError(f"unknown loss {name!r}")

    @property
    def has_density(self) -> bool:
        return self.kind != "tukey"

    # -- loss triple ----------------------------------------------------------

    @staticmethod
    def _check(t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise NegativeDistance("squared Mahalanobis distance must be non-negative")
        return t

    def rho(self, t):
        t = self._check(t)
        r = self.dim
        if self.kind == "gaussian":
            out = 0.5 * t + 0.5 * r * LOG_2PI
        elif self.kind == "t":
            out = -self.log_norm_t + 0.5 * (self.nu + r) * np.log1p(t / self.nu)
        elif self.kind == "huber":
            c2, b = self.c**2, self.b
            inner = t <= c2
            safe = np.where(inner, c2, t)
            out = -self.log_ah + np.where(inner, t / (2 * b), c2 / (2 * b) * (np.log(safe / c2) + 1.0))
        else:
            c2 = self.c**2
            inner = t <= c2
            cubic = t**3 / (6 * c2**2) - t**2 / (2 * c2) + t / 2
            out = np.where(inner, cubic, c2 / 6) + 0.5 * r * LOG_2PI
        return out[()] if out.ndim == 0 else out

    def psi(self, t):
        t = self._check(t)
        if self.kind == "gaussian":
            out = np.full_like(t, 0.5)
        elif self.kind == "t":
            out = 0.5 * (self.nu + self.dim) / (self.nu + t)
        elif self.kind == "huber":
            c2, b = self.c**2, self.b
            inner = t <= c2
            safe = np.where(inner, c2, t)
            out = np.where(inner, 1.0 / (2 * b), c2 / (2 * b) / safe)
        else:
            c2 = self.c**2
            out = np.where(t <= c2, t**2 / (2 * c2**2) - t / c2 + 0.5, 0.0)
        return out[()] if out.ndim == 0 else out

    def eta(self, t):
        t = self._check(t)
        if self.kind == "gaussian":
            out = np.zeros_like(t)
        elif self.kind == "t":
            out = -0.5 * (self.nu + self.dim) / (self.nu + t) ** 2
        elif self.kind == "huber":
            c2, b = self.c**2, self.b
            inner = t <= c2
            safe = np.where(inner, c2, t)
            out = np.where(inner, 0.0, -c2 / (2 * b) / safe / safe)
        else:
            c2 = self.c**2
            out = np.where(t <= c2, t / c2**2 - 1.0 / c2, 0.0)
        return out[()] if out.ndim == 0 else out

    def log_g(self, t):
        """ln g(t); only defined for losses that come from a density."""
        if not self.has_density:
            raise NoDensityGenerator("Tukey's loss has no density generator")
        return -self.rho(t)

    def describe(self) -> str:
        if self.kind == "t":
            return f"t(nu={self.nu:g})"
        if self.kind in ("huber", "tukey"):
            return f"{self.kind}(c={self.c:.4g})"
        return self.kind
