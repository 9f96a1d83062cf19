"""Exact Gaussian information arithmetic on stacked-window models.

Entropies come from Cholesky log-determinants, conditional quantities from
Schur complements of the conditioning block.  When the target is univariate
the conditional mutual information is computed as half the log ratio of two
prediction-error variances, which avoids cancelling two large entropies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularCovariance
from .model import GaussianJointModel, Selectors, VariableSelector

LOG_2PIE = math.log(2.0 * math.pi * math.e)

# On a Cholesky failure, add jitter once and retry; a second failure is a
# reportable singularity, not something to mask.
JITTER_FACTOR = 1e-12
DET_FLOOR_LOG = math.log(1e-300)


def _submatrix(model: GaussianJointModel, idx: list[int]) -> np.ndarray:
    return model.cov[np.ix_(idx, idx)]


def _cholesky(mat: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        pass
    jitter = JITTER_FACTOR * np.trace(mat) / max(mat.shape[0], 1)
    try:
        return np.linalg.cholesky(mat + jitter * np.eye(mat.shape[0]))
    except np.linalg.LinAlgError:
        raise SingularCovariance(
            f"covariance block of size {mat.shape[0]} is not positive definite "
            f"(jitter {jitter:.3g} did not help)") from None


def _logdet(mat: np.ndarray) -> float:
    if mat.shape[0] == 0:
        return 0.0
    L = _cholesky(mat)
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    if logdet < DET_FLOOR_LOG:
        raise SingularCovariance(f"determinant underflow, log det = {logdet:.3g}")
    return logdet


def gaussian_entropy(model: GaussianJointModel,
                     variables: VariableSelector | Selectors) -> float:
    """Differential entropy ``0.5 * log((2*pi*e)^k det G)`` of the selected block.

    The empty selection has entropy zero by convention.
    """
    idx = model.resolve(variables)
    k = len(idx)
    if k == 0:
        return 0.0
    return 0.5 * (k * LOG_2PIE + _logdet(_submatrix(model, idx)))


@dataclass(frozen=True)
class PredictionError:
    """Residual variance (determinant for multivariate targets) of the best
    linear prediction of ``target`` from ``conditioners``."""

    variance_det: float
    target: tuple[VariableSelector, ...]
    conditioners: tuple[VariableSelector, ...]


def _schur_complement(model: GaussianJointModel, tgt: list[int],
                      cond: list[int]) -> np.ndarray:
    cov = model.cov
    G_tt = cov[np.ix_(tgt, tgt)]
    if not cond:
        return G_tt
    G_cc = cov[np.ix_(cond, cond)]
    G_tc = cov[np.ix_(tgt, cond)]
    L = _cholesky(G_cc)
    half = np.linalg.solve(L, G_tc.T)
    return G_tt - half.T @ half


def prediction_error(model: GaussianJointModel,
                     target: VariableSelector | Selectors,
                     conditioners: VariableSelector | Selectors = ()) -> PredictionError:
    """Schur complement of the conditioning block; with no conditioners this is
    just the determinant of the target block."""
    if isinstance(target, VariableSelector):
        target = (target,)
    if isinstance(conditioners, VariableSelector):
        conditioners = (conditioners,)
    tgt = model.resolve(target)
    if not tgt:
        raise ValueError("prediction target is empty")
    cond = model.resolve(conditioners)
    schur = _schur_complement(model, tgt, cond)
    if schur.shape[0] == 1:
        var = float(schur[0, 0])
        if var <= 0.0:
            raise SingularCovariance(f"nonpositive residual variance {var:.3g}")
    else:
        var = math.exp(_logdet(schur))
    return PredictionError(var, tuple(target), tuple(conditioners))


def _log_variance_ratio(model: GaussianJointModel, tgt: list[int],
                        cond: list[int], extra: list[int]) -> float:
    num = _schur_complement(model, tgt, cond)[0, 0]
    den = _schur_complement(model, tgt, cond + extra)[0, 0]
    if num <= 0.0 or den <= 0.0:
        raise SingularCovariance(
            f"nonpositive residual variance in ratio ({num:.3g} / {den:.3g})")
    return 0.5 * math.log(num / den)


def conditional_mutual_information(model: GaussianJointModel,
                                   a: VariableSelector | Selectors,
                                   b: VariableSelector | Selectors,
                                   c: VariableSelector | Selectors = ()) -> float:
    """I(A; B | C) in nats.

    Returns 0 for an empty A or B block.  A univariate side is handled through
    the prediction-variance ratio; the general case falls back to
    ``H(A|C) + H(B|C) - H(A,B|C)``.
    """
    ia, ib, ic = model.resolve(a), model.resolve(b), model.resolve(c)
    if not ia or not ib:
        return 0.0
    if len(ib) == 1:
        return _log_variance_ratio(model, ib, ic, ia)
    if len(ia) == 1:
        return _log_variance_ratio(model, ia, ic, ib)
    h_c = _logdet(_submatrix(model, ic)) if ic else 0.0
    h_ac = _logdet(_submatrix(model, ia + ic))
    h_bc = _logdet(_submatrix(model, ib + ic))
    h_abc = _logdet(_submatrix(model, ia + ib + ic))
    return 0.5 * (h_ac + h_bc - h_abc - h_c)
