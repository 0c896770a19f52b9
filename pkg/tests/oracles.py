"""Independent reference implementations used by the test-suite.

Nothing here imports the package's numerical code; losses, chi-square
quantiles and the cluster log-likelihood are re-derived from their
definitions, partly in extended precision with mpmath.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np

LOG_2PI = math.log(2 * math.pi)


# -- chi-square via the incomplete-gamma power series ------------------------


def reg_lower_gamma(s: float, x: float, terms: int = 500) -> float:
    """P(s, x) = gamma(s, x) / Gamma(s) from its power series."""
    if x <= 0:
        return 0.0
    term = 1.0 / s
    total = term
    for k in range(1, terms):
        term *= x / (s + k)
        total += term
        if term < total * 1e-17:
            break
    return math.exp(s * math.log(x) - x - math.lgamma(s)) * total


def chi2_cdf(x: float, k: int) -> float:
    return reg_lower_gamma(k / 2.0, x / 2.0)


def chi2_quantile(q: float, k: int) -> float:
    lo, hi = 0.0, 1.0
    while chi2_cdf(hi, k) < q:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if chi2_cdf(mid, k) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- loss functions in mpmath ---------------------------------------------------


def mp_huber_constants(r: int, qh: float = 0.8):
    mp.mp.dps = 40
    c2 = mp.findroot(lambda x: mp.gammainc(mp.mpf(r) / 2, 0, x / 2, regularized=True) - mp.mpf(qh),
                     (mp.mpf("1e-8"), mp.mpf(400)), solver="bisect", tol=mp.mpf("1e-35"))
    cdf = lambda x, k: mp.gammainc(mp.mpf(k) / 2, 0, x / 2, regularized=True)
    b = cdf(c2, r + 2) + c2 / r * (1 - cdf(c2, r))
    half = mp.mpf(r) / 2

    def integrand(t):
        inner = t / (2 * b) if t <= c2 else c2 / (2 * b) * (mp.log(t / c2) + 1)
        return t ** (half - 1) * mp.exp(-inner)

    total = mp.pi**half / mp.gamma(half) * (mp.quad(integrand, [0, c2]) + mp.quad(integrand, [c2, mp.inf]))
    return c2, b, -mp.log(total)


def mp_rho(kind: str, r: int, nu=3, huber=None):
    """rho(t) for gaussian / t / huber as an mpmath callable."""
    if kind == "gaussian":
        const = mp.mpf(r) / 2 * mp.log(2 * mp.pi)
        return lambda t: t / 2 + const
    if kind == "t":
        nu = mp.mpf(nu)
        lognorm = mp.loggamma((nu + r) / 2) - mp.loggamma(nu / 2) - mp.mpf(r) / 2 * mp.log(mp.pi * nu)
        return lambda t: -lognorm + (nu + r) / 2 * mp.log(1 + t / nu)
    if kind == "huber":
        c2, b, log_ah = huber

        def rho(t):
            if t <= c2:
                return -log_ah + t / (2 * b)
            return -log_ah + c2 / (2 * b) * (mp.log(t / c2) + 1)

        return rho
    raise ValueError(kind)


def _unvech(v, r):
    s = mp.matrix(r, r)
    k = 0
    for j in range(r):
        for i in range(j, r):
            s[i, j] = v[k]
            s[j, i] = v[k]
            k += 1
    return s


def cluster_loglik(theta, x, rho):
    """-sum rho(t) + N ln N - (N/2) ln|S| with theta = (mu, vech S)."""
    n, r = len(x), len(x[0])
    mu = theta[:r]
    s = _unvech(theta[r:], r)
    s_inv = mp.inverse(s)
    total = mp.mpf(0)
    for row in x:
        d = mp.matrix([row[i] - mu[i] for i in range(r)])
        total += rho((d.T * s_inv * d)[0])
    return -total + n * mp.log(n) - mp.mpf(n) / 2 * mp.log(mp.det(s))


def fd_hessian(f, theta, h=mp.mpf("1e-12")):
    """Central second differences of ``f`` at ``theta`` (mpmath scalars)."""
    q = len(theta)
    hess = np.zeros((q, q))

    def at(i, si, j, sj):
        t = list(theta)
        t[i] += si * h
        t[j] += sj * h
        return f(t)

    for i in range(q):
        for j in range(i, q):
            val = (at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) / (4 * h * h)
            hess[i, j] = hess[j, i] = float(val)
    return hess


# -- stationary points of the per-cluster log-likelihood ----------------------


def np_psi(kind: str, r: int, t, nu=3.0, c2=None, b=None):
    if kind == "gaussian":
        return np.full_like(t, 0.5)
    if kind == "t":
        return 0.5 * (nu + r) / (nu + t)
    return np.where(t <= c2, 1 / (2 * b), c2 / (2 * b * np.maximum(t, c2)))


def fixed_point(x: np.ndarray, psi, iters: int = 20000, tol: float = 1e-15):
    """Iterate mu = sum psi x / sum psi, S = (2/N) sum psi x x^T to convergence.

    Returns ``(mu, S, converged)``.
    """
    n, r = x.shape
    mu = x.mean(0)
    s = np.cov(x.T, bias=True).reshape(r, r)
    for _ in range(iters):
        d = x - mu
        t = np.einsum("ij,ij->i", d @ np.linalg.inv(s), d)
        w = psi(t)
        mu_new = w @ x / w.sum()
        d = x - mu_new
        s_new = 2.0 * (d * w[:, None]).T @ d / n
        s_new = 0.5 * (s_new + s_new.T)
        step = max(np.abs(mu_new - mu).max(), np.abs(s_new - s).max())
        mu, s = mu_new, s_new
        if step < tol * max(1.0, np.abs(s).max()):
            return mu, s, True
    return mu, s, False


def datafit_oracle(points, mu, scatter, rho_np) -> float:
    """Direct summation of -sum rho + N ln N - (N/2) ln|S|, one point at a time."""
    n = len(points)
    s_inv = np.linalg.inv(scatter)
    total = 0.0
    for x in points:
        d = np.asarray(x) - mu
        total -= rho_np(float(d @ s_inv @ d))
    sign, logdet = np.linalg.slogdet(scatter)
    return total + (n * math.log(n) if n else 0.0) - 0.5 * n * logdet
