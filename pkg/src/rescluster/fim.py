"""Observed Fisher information of one cluster in (mu, vech S) coordinates.

The blocks are the second derivatives of the per-cluster log-likelihood
``-sum rho(t_n) + N_m ln N_m - (N_m/2) ln|S|`` evaluated at fixed-point
estimates, where the identities ``sum psi(t) x_hat = 0`` and
``S = (2/N_m) sum psi(t) x_hat x_hat^T`` have been used to drop terms. Away
from a fixed point they are therefore an approximation of the Hessian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from .core import ClusterParams, DimensionMismatch, ResClusterError
from .losses import LossModel
from .matcalc import DuplicationMatrix, duplication_matrix

CHUNK = 1024


class SingularBlock(ResClusterError, np.linalg.LinAlgError):
    pass


@dataclass(frozen=True, eq=False)
class FimBlocks:
    f_mumu: np.ndarray
    f_muS: np.ndarray
    f_SS: np.ndarray

    @property
    def q(self) -> int:
        return self.f_mumu.shape[0] + self.f_SS.shape[0]

    @property
    def f_Smu(self) -> np.ndarray:
        return self.f_muS.T

    def information(self) -> np.ndarray:
        """The assembled q x q matrix J = -[[F_mumu, F_muS], [F_Smu, F_SS]]."""
        return -np.block([[self.f_mumu, self.f_muS], [self.f_Smu, self.f_SS]])


@dataclass(frozen=True)
class FimLogDet:
    value: float
    positive_definite: bool


def _sym_products(y: np.ndarray) -> np.ndarray:
    """Rows D^T (y_n kron y_n), i.e. vech(y y^T) with off-diagonals doubled."""
    r = y.shape[1]
    rows, cols = np.triu_indices(r)
    mult = np.where(rows == cols, 1.0, 2.0)
    return y[:, rows] * y[:, cols] * mult


def fim_blocks(points: np.ndarray, params: ClusterParams, loss: LossModel, dup: DuplicationMatrix | None = None) -> FimBlocks:
    x = np.atleast_2d(np.asarray(points, dtype=float))
    r = params.dim
    if x.shape[1] != r or loss.dim != r:
        raise DimensionMismatch("points, cluster parameters and loss must share one dimension")
    dup = dup or duplication_matrix(r)
    d = dup.mat
    n = x.shape[0]

    s_inv = params.solve(np.eye(r))
    s_inv = 0.5 * (s_inv + s_inv.T)
    p = r * (r + 1) // 2
    eta_yy = np.zeros((r, r))
    psi_sum = 0.0
    mu_s = np.zeros((r, p))
    ss = np.zeros((p, p))
    # fourth-moment sums are accumulated chunk-wise to bound memory at O(CHUNK r^2 + r^4)
    for start in range(0, n, CHUNK):
        xc = x[start:start + CHUNK] - params.mu
        y = params.solve(xc.T).T  # rows S^{-1} x_hat
        t = np.einsum("ij,ij->i", xc, y)
        eta = loss.eta(t)
        psi_sum += float(np.sum(loss.psi(t)))
        w = _sym_products(y)
        ey = y * eta[:, None]
        eta_yy += ey.T @ y
        mu_s += ey.T @ w
        ss += (w * eta[:, None]).T @ w

    f_mumu = -4.0 * eta_yy - 2.0 * psi_sum * s_inv
    f_mus = -2.0 * mu_s
    f_ss = -ss - 0.5 * n * d.T @ np.kron(s_inv, s_inv) @ d
    return FimBlocks(0.5 * (f_mumu + f_mumu.T), f_mus, 0.5 * (f_ss + f_ss.T))


def _is_pd(a: np.ndarray) -> bool:
    try:
        cholesky(a, lower=True, check_finite=False)
        return True
    except LinAlgError:
        return False


def fim_logdet(blocks: FimBlocks) -> FimLogDet:
    """ln|J| through the partitioned determinant |-F_mumu| |Schur complement|.

    The absolute values of both determinants are used; the flag records
    whether both factors were positive definite.
    """
    a = -blocks.f_mumu
    if not np.all(np.isfinite(a)) or np.linalg.cond(a) > 1e12:
        raise SingularBlock("-F_mumu is numerically singular")
    schur = -blocks.f_SS + blocks.f_Smu @ np.linalg.solve(blocks.f_mumu, blocks.f_muS)
    schur = 0.5 * (schur + schur.T)
    sign_a, logdet_a = np.linalg.slogdet(a)
    sign_s, logdet_s = np.linalg.slogdet(schur)
    if sign_s == 0 or not np.isfinite(logdet_s):
        raise SingularBlock("Schur complement of the information matrix is singular")
    return FimLogDet(float(logdet_a + logdet_s), _is_pd(a) and _is_pd(schur))
